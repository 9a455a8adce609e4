#pragma once

#include <cstddef>

namespace simplexdyn {

/// Numerical thresholds used across the library.
///
/// Every certificate and validation step compares against one of these
/// fields, so overriding a value here (or through the CLI's tolerance
/// override file) changes the behaviour of the whole pipeline consistently.
struct Tolerances {
  /// Simplex membership and row-stochasticity; negative entries above
  /// `-simplex` are clamped to zero.
  double simplex = 1e-12;
  /// Max-entry residual |(C^T c - c)_i| required of a Perron vector.
  double eigen_residual = 1e-10;
  /// Stop power iteration once the l1 change between sweeps drops below this.
  double power_change = 1e-13;
  std::size_t power_max_iter = 1'000'000;
  /// Column sums of an analytic Jacobian.
  double jacobian_colsum = 1e-10;
  /// Column sums accepted by the tangent-gain evaluation.
  double gain_colsum = 1e-8;
  /// ||f(p) - p||_1 for a point to count as a fixed point.
  double fixed_point_residual = 1e-9;
  /// Fixed points closer than this (l1) are merged.
  double dedup_radius = 1e-4;
  /// Entries must exceed this to count as strictly positive.
  double positivity = 1e-12;
  /// A gain must be below 1 - margin to certify contraction; a spectral
  /// radius above 1 + margin signals instability.
  double contraction_margin = 1e-9;
  /// ||f(p) - p||_1 accepted by local certification.
  double certify_residual = 1e-8;
  /// Orbit defect accepted by orbit certification.
  double orbit_defect = 1e-8;
  /// ||p(t+q) - p(t)||_1 threshold used while scanning a trajectory.
  double orbit_match = 1e-6;
  /// A fixed point with an entry at or below this lies on the boundary.
  double boundary = 1e-9;
};

}  // namespace simplexdyn

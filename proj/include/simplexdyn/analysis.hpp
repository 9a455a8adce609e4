#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "simplexdyn/core.hpp"
#include "simplexdyn/dynamics.hpp"
#include "simplexdyn/model.hpp"

namespace simplexdyn {

/// Differential of f, stored as the matrix Q^T acting on column tangents
/// (delta -> Q^T delta). Columns sum to one; entries may be negative.
struct JacobianMatrix {
  Matrix action;
  /// Point of evaluation; empty for products along a trajectory.
  std::optional<SimplexVector> at;

  std::size_t size() const noexcept { return static_cast<std::size_t>(action.rows()); }
};

/// Q^T = C1^T + (C0^T - C1^T) [diag(r(Wp)) + diag(p .* r'(Wp)) W].
inline JacobianMatrix jacobian(const ModelSpec& model, const SimplexVector& p) {
  if (p.size() != model.size()) throw DimensionError("jacobian: dimension mismatch");
  const Matrix& c1t = model.influence().entries().transpose();
  const Matrix& c0t = model.stay().entries().transpose();
  const Vector d = model.reinforcement_at(p);
  const Vector slope = model.reinforcement_slope_at(p);
  Matrix inner = p.entries().cwiseProduct(slope).asDiagonal() * model.grouping().entries();
  inner.diagonal() += d;
  Matrix qt = c1t + (c0t - c1t) * inner;
  return {std::move(qt), p};
}

/// Central-difference Jacobian along the tangent directions e_i - e_n.
///
/// Only the action on the tangent space is determined by the differences;
/// the last column is fixed by requiring M p = f(p), so compare results
/// with `tangent_discrepancy`, not entry by entry.
inline JacobianMatrix jacobian_fd(const ModelSpec& model, const SimplexVector& p, double h = 1e-6) {
  if (p.size() != model.size()) throw DimensionError("jacobian_fd: dimension mismatch");
  if (!(h > 0.0)) throw DomainError("jacobian_fd: step must be positive");
  if (p.min_entry() < h) throw DomainError("jacobian_fd: point too close to the boundary for this step");
  const auto n = static_cast<Eigen::Index>(p.size());
  Matrix m(n, n);
  const Vector fp = detail::raw_step(model, p);
  Vector last = fp;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    Vector dir = Vector::Zero(n);
    dir[i] = 1.0;
    dir[n - 1] = -1.0;
    const SimplexVector plus(p.entries() + h * dir);
    const SimplexVector minus(p.entries() - h * dir);
    m.col(i) = (detail::raw_step(model, plus) - detail::raw_step(model, minus)) / (2.0 * h);
    last -= p.entries()[i] * m.col(i);
  }
  // M = [d_1 + u, ..., d_{n-1} + u, u] with u chosen so that M p = f(p).
  for (Eigen::Index i = 0; i + 1 < n; ++i) m.col(i) += last;
  m.col(n - 1) = last;
  return {std::move(m), p};
}

/// max_i ||(A - B)(e_i - e_n)||_1: disagreement of two tangent actions.
inline double tangent_discrepancy(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("tangent_discrepancy: size mismatch");
  const Eigen::Index n = a.cols();
  const Matrix diff = a - b;
  double worst = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    worst = std::max(worst, (diff.col(i) - diff.col(n - 1)).lpNorm<1>());
  }
  return worst;
}

/// Induced l1 norm of Q^T restricted to the tangent space:
/// 1/2 max_{j,k} sum_i |Q^T_{ij} - Q^T_{ik}|, the Dobrushin ergodicity
/// coefficient when Q^T is column-stochastic.
inline double l1_tangent_gain(const Matrix& qt, double colsum_tol = Tolerances{}.gain_colsum) {
  if (qt.rows() != qt.cols() || qt.rows() == 0) throw DimensionError("l1_tangent_gain: matrix must be square");
  for (Eigen::Index j = 0; j < qt.cols(); ++j) {
    const double s = qt.col(j).sum();
    if (std::abs(s - 1.0) > colsum_tol) {
      throw DomainError("l1_tangent_gain: column " + std::to_string(j) + " sums to " + std::to_string(s));
    }
  }
  double best = 0.0;
  for (Eigen::Index j = 0; j < qt.cols(); ++j)
    for (Eigen::Index k = j + 1; k < qt.cols(); ++k)
      best = std::max(best, (qt.col(j) - qt.col(k)).lpNorm<1>());
  return 0.5 * best;
}

inline double l1_tangent_gain(const JacobianMatrix& q, double colsum_tol = Tolerances{}.gain_colsum) {
  return l1_tangent_gain(q.action, colsum_tol);
}

/// Q^T in the coordinates y -> (y, -sum y) of the tangent space.
inline Matrix tangent_restriction(const Matrix& qt) {
  const Eigen::Index n = qt.rows();
  if (n < 2) return Matrix::Zero(0, 0);
  Matrix basis = Matrix::Zero(n, n - 1);
  basis.topRows(n - 1).setIdentity();
  basis.row(n - 1).setConstant(-1.0);
  return (qt * basis).topRows(n - 1);
}

/// Largest eigenvalue modulus of Q^T on the tangent space.
inline double tangent_spectral_radius(const Matrix& qt) {
  const Matrix r = tangent_restriction(qt);
  if (r.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(r, false);
  if (es.info() != Eigen::Success) throw ConvergenceError("tangent_spectral_radius: eigen solve failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Jacobian of the m-th iterate at p: Q(f^{m-1}(p))^T ... Q(f(p))^T Q(p)^T.
inline JacobianMatrix iterant_jacobian(const ModelSpec& model, const SimplexVector& p, std::size_t m) {
  const auto n = static_cast<Eigen::Index>(model.size());
  Matrix prod = Matrix::Identity(n, n);
  SimplexVector x = p;
  for (std::size_t k = 0; k < m; ++k) {
    prod = jacobian(model, x).action * prod;
    if (k + 1 < m) x = step(model, x);
  }
  return {std::move(prod), std::nullopt};
}

/// All barycentric points (i_1, ..., i_n)/density with sum i_k = density.
/// With `interior_only`, every i_k >= 1.
inline std::vector<SimplexVector> barycentric_grid(std::size_t n, std::size_t density, bool interior_only = false) {
  if (n == 0) throw DimensionError("barycentric_grid: empty dimension");
  if (density == 0) throw DomainError("barycentric_grid: density must be >= 1");
  std::vector<SimplexVector> out;
  const std::size_t lo = interior_only ? 1 : 0;
  if (lo * n > density) return out;
  const std::size_t free = density - lo * n;
  // Enumerate compositions of `free` into n parts.
  std::vector<std::size_t> part(n, 0);
  part[n - 1] = free;
  while (true) {
    Vector v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      v[static_cast<Eigen::Index>(i)] = static_cast<double>(part[i] + lo) / static_cast<double>(density);
    out.push_back(SimplexVector::from_weights(std::move(v)));
    // Next composition: move one unit from the last nonzero slot before the
    // tail into its left neighbour, reset the tail.
    std::size_t j = n - 1;
    while (j > 0 && part[j] == 0) --j;
    if (j == 0) break;
    const std::size_t tail = part[j];
    part[j] = 0;
    ++part[j - 1];
    part[n - 1] = tail - 1;
  }
  return out;
}

/// Grid density used when the caller does not pick one: 20 for n = 3,
/// reduced for larger n so the grid stays around 10^4 points.
inline std::size_t default_grid_density(std::size_t n) {
  if (n <= 3) return 20;
  std::size_t d = 20;
  auto count = [n](std::size_t dens) {
    double c = 1.0;
    for (std::size_t k = 1; k < n; ++k) c *= static_cast<double>(dens + k) / static_cast<double>(k);
    return c;
  };
  while (d > std::max<std::size_t>(n, 2) && count(d) > 1e4) --d;
  return d;
}

struct GainBound {
  double value = 0.0;
  /// True when `value` is the exact maximum over the simplex; otherwise it
  /// is the maximum over sampled points, a lower bound on the true max.
  bool exact = false;
  std::size_t points_evaluated = 0;
  std::optional<SimplexVector> argmax;
};

/// max over the simplex of the tangent gain of df.
///
/// For linear reinforcement the Jacobian is affine in p and the gain is a
/// convex function of it, so the vertices attain the maximum. Other
/// families are sampled on a barycentric grid.
inline GainBound max_gain_over_simplex(const ModelSpec& model, std::size_t grid_density) {
  if (grid_density == 0) throw DomainError("max_gain_over_simplex: density must be >= 1");
  const std::size_t n = model.size();
  const Family fam = model.reinforcement().family();
  const bool affine = fam == Family::LinearAttract || fam == Family::LinearRepel;
  std::vector<SimplexVector> pts;
  if (affine) {
    for (std::size_t i = 0; i < n; ++i) pts.push_back(SimplexVector::vertex(n, i));
  } else {
    pts = barycentric_grid(n, grid_density);
  }
  GainBound out;
  out.exact = affine;
  out.value = -1.0;
  for (const auto& p : pts) {
    const double g = l1_tangent_gain(jacobian(model, p));
    if (g > out.value) {
      out.value = g;
      out.argmax = p;
    }
    ++out.points_evaluated;
  }
  return out;
}

}  // namespace simplexdyn

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "simplexdyn/core.hpp"
#include "simplexdyn/model.hpp"

namespace simplexdyn {

/// A sequence of simplex points; points[0] is the initial condition.
struct Trajectory {
  std::vector<SimplexVector> points;
  /// Time between consecutive points (1 for the discrete map).
  double time_step = 1.0;

  std::size_t size() const noexcept { return points.size(); }
  const SimplexVector& back() const { return points.back(); }
};

namespace detail {

// Drift beyond this between algebraic closure and the renormalized result
// indicates a broken model rather than rounding.
inline constexpr double kMassDrift = 1e-9;

inline Vector raw_step(const ModelSpec& model, const SimplexVector& p) {
  const Vector d = model.reinforcement_at(p);
  const Vector held = d.cwiseProduct(p.entries());
  return model.stay().entries().transpose() * held +
         model.influence().entries().transpose() * (p.entries() - held);
}

inline SimplexVector renormalize(const Vector& q, const char* what) {
  const double s = q.sum();
  if (std::abs(s - 1.0) > kMassDrift) {
    throw DomainError(std::string(what) + ": mass drifted to " + std::to_string(s));
  }
  return SimplexVector::from_weights(q);
}

}  // namespace detail

/// Pi(p) = D C0 + (I - D) C1 with D = diag(r(W p)).
inline RowStochasticMatrix transition_matrix(const ModelSpec& model, const SimplexVector& p) {
  if (p.size() != model.size()) throw DimensionError("transition_matrix: dimension mismatch");
  const Vector d = model.reinforcement_at(p);
  const Matrix pi = d.asDiagonal() * model.stay().entries() +
                    (Vector::Ones(d.size()) - d).asDiagonal() * model.influence().entries();
  return RowStochasticMatrix(pi, model.tolerances().simplex);
}

/// f(p) = Pi(p)^T p.
inline SimplexVector step(const ModelSpec& model, const SimplexVector& p) {
  if (p.size() != model.size()) throw DimensionError("step: dimension mismatch");
  return detail::renormalize(detail::raw_step(model, p), "step");
}

/// `steps` applications of f; returns steps + 1 points.
inline Trajectory iterate(const ModelSpec& model, const SimplexVector& p0, std::size_t steps) {
  if (p0.size() != model.size()) throw DimensionError("iterate: dimension mismatch");
  Trajectory traj;
  traj.points.reserve(steps + 1);
  traj.points.push_back(p0);
  for (std::size_t t = 0; t < steps; ++t) traj.points.push_back(step(model, traj.points.back()));
  return traj;
}

/// f^m(p).
inline SimplexVector step_n(const ModelSpec& model, SimplexVector p, std::size_t m) {
  for (std::size_t k = 0; k < m; ++k) p = step(model, p);
  return p;
}

/// The Perron vector of Pi(p): the stationary distribution of the frozen
/// transition matrix rather than one step of it.
inline SimplexVector fp_update(const ModelSpec& model, const SimplexVector& p) {
  const RowStochasticMatrix pi = transition_matrix(model, p);
  if (!pi.irreducible()) {
    throw PreconditionError("fp_update: transition matrix is reducible at this point");
  }
  return perron_vector(pi, model.tolerances());
}

/// Explicit Euler for dp/dt = L^T (I - diag(r(p))) p with L = C - I.
inline Trajectory euler_flow(const ModelSpec& model, const SimplexVector& p0, double h, std::size_t steps) {
  if (!(h > 0.0 && h <= 0.1)) throw DomainError("euler_flow: step size must lie in (0, 0.1]");
  if (!model.identity_stay()) throw PreconditionError("euler_flow: continuous-time form requires C0 = I");
  if (p0.size() != model.size()) throw DimensionError("euler_flow: dimension mismatch");
  const Matrix& c = model.influence().entries();
  const double tol = model.tolerances().simplex;
  Trajectory traj;
  traj.time_step = h;
  traj.points.reserve(steps + 1);
  traj.points.push_back(p0);
  for (std::size_t t = 0; t < steps; ++t) {
    const SimplexVector& p = traj.points.back();
    const Vector free = (Vector::Ones(p.entries().size()) - model.reinforcement_at(p)).cwiseProduct(p.entries());
    const Vector next = p.entries() + h * (c.transpose() * free - free);
    if (next.minCoeff() < -tol) {
      throw DomainError("euler_flow: step " + std::to_string(t) + " left the simplex (min entry " +
                        std::to_string(next.minCoeff()) + ")");
    }
    traj.points.push_back(detail::renormalize(next, "euler_flow"));
  }
  return traj;
}

}  // namespace simplexdyn

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simplexdyn/analysis.hpp"
#include "simplexdyn/core.hpp"
#include "simplexdyn/dynamics.hpp"
#include "simplexdyn/model.hpp"

namespace simplexdyn {

enum class FixedPointMethod { KappaSolve, ClosedForm, Multistart, PicardGrouping };

inline std::string_view to_string(FixedPointMethod m) {
  switch (m) {
    case FixedPointMethod::KappaSolve: return "kappa_solve";
    case FixedPointMethod::ClosedForm: return "closed_form";
    case FixedPointMethod::Multistart: return "multistart";
    case FixedPointMethod::PicardGrouping: return "picard_grouping";
  }
  return "?";
}

struct FixedPoint {
  SimplexVector point;
  /// ||f(p) - p||_1.
  double residual = 0.0;
  /// Scale in (1 - r(p_i)) p_i = kappa c_i, when the solver produced one.
  std::optional<double> kappa;
  /// Some entry is (numerically) zero; interior-only certificates do not apply.
  bool boundary = false;
};

struct FixedPointReport {
  std::vector<FixedPoint> points;
  FixedPointMethod method = FixedPointMethod::Multistart;
};

/// A periodic orbit of minimal period `period`, listed so that
/// step(points[i]) = points[(i + 1) % period]. The lexicographically
/// smallest point comes first.
struct OrbitReport {
  std::vector<SimplexVector> points;
  std::size_t period = 0;
  double max_defect = 0.0;
};

inline double fixed_point_residual(const ModelSpec& model, const SimplexVector& p) {
  return l1_distance(step(model, p), p);
}

namespace detail {

inline FixedPoint make_fixed_point(const ModelSpec& model, SimplexVector p, std::optional<double> kappa = {}) {
  const double res = fixed_point_residual(model, p);
  const bool boundary = p.min_entry() <= model.tolerances().boundary;
  return {std::move(p), res, kappa, boundary};
}

inline void require_plain_structure(const ModelSpec& model, const char* who) {
  if (!model.identity_stay() || !model.identity_grouping()) {
    throw PreconditionError(std::string(who) + " requires C0 = I and W = I");
  }
}

// Orders reports lexicographically by coordinates.
inline bool lex_less(const SimplexVector& a, const SimplexVector& b) {
  return std::lexicographical_compare(a.entries().begin(), a.entries().end(), b.entries().begin(),
                                      b.entries().end());
}

// Scalar map phi(x) = (1 - r(x)) x; fixed points satisfy phi(p_i) = kappa c_i.
inline double held_back(const Reinforcement& r, double x) { return (1.0 - r.value(x)) * x; }

// Inverse of an increasing phi on [0, 1] by bisection.
inline double invert_increasing(const Reinforcement& r, double target) {
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (held_back(r, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline Vector reduced_to_full(const Vector& y) {
  Vector p(y.size() + 1);
  p.head(y.size()) = y;
  p[y.size()] = 1.0 - y.sum();
  return p;
}

// Nearest simplex point after clamping negatives.
inline std::optional<SimplexVector> project(const Vector& p) {
  Vector q = p.cwiseMax(0.0);
  const double s = q.sum();
  if (!(s > 0.0) || !q.allFinite()) return std::nullopt;
  return SimplexVector::from_weights(q / s);
}

/// Damped Newton for f^period(p) = p in the reduced coordinates
/// y = (p_1, ..., p_{n-1}). Returns the converged point or nothing if the
/// reduced Jacobian becomes singular or the line search stalls.
inline std::optional<SimplexVector> newton_periodic_point(const ModelSpec& model, const SimplexVector& start,
                                                          std::size_t period, double accept,
                                                          int max_iter = 100) {
  const auto n = static_cast<Eigen::Index>(model.size());
  if (n < 2) return start;
  auto residual = [&](const SimplexVector& p) -> Vector {
    return step_n(model, p, period).entries() - p.entries();
  };
  SimplexVector p = start;
  Vector g = residual(p);
  double gnorm = g.lpNorm<1>();
  Matrix basis = Matrix::Zero(n, n - 1);
  basis.topRows(n - 1).setIdentity();
  basis.row(n - 1).setConstant(-1.0);
  for (int it = 0; it < max_iter && gnorm > 1e-15; ++it) {
    Matrix a = iterant_jacobian(model, p, period).action;
    a.diagonal().array() -= 1.0;
    const Matrix jr = (a * basis).topRows(n - 1);
    Eigen::FullPivLU<Matrix> lu(jr);
    if (!lu.isInvertible() || lu.rcond() < 1e-14) return std::nullopt;
    const Vector dy = lu.solve(-g.head(n - 1));
    const Vector dp = reduced_to_full(dy) - Vector::Unit(n, n - 1);  // dp_n = -sum dy
    bool moved = false;
    for (double alpha = 1.0; alpha > 1e-10; alpha *= 0.5) {
      auto trial = project(p.entries() + alpha * dp);
      if (!trial) continue;
      const Vector gt = residual(*trial);
      const double tn = gt.lpNorm<1>();
      if (tn < (1.0 - 1e-4 * alpha) * gnorm) {
        p = *trial;
        g = gt;
        gnorm = tn;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (gnorm <= accept) return p;
  return std::nullopt;
}

inline std::vector<std::size_t> first_primes(std::size_t count) {
  std::vector<std::size_t> primes;
  for (std::size_t k = 2; primes.size() < count; ++k) {
    bool prime = true;
    for (std::size_t q : primes) {
      if (q * q > k) break;
      if (k % q == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(k);
  }
  return primes;
}

inline double radical_inverse(std::size_t index, std::size_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double out = 0.0;
  while (index > 0) {
    out += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return out;
}

}  // namespace detail

/// Deterministic start set: centroid, vertices pulled inward by 1e-3, then
/// `count` Halton points mapped to the simplex through sorted spacings.
inline std::vector<SimplexVector> multistart_points(std::size_t n, std::size_t count) {
  std::vector<SimplexVector> out;
  out.push_back(SimplexVector::uniform(n));
  const Vector centre = SimplexVector::uniform(n).entries();
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(SimplexVector::from_weights((1.0 - 1e-3) * SimplexVector::vertex(n, i).entries() + 1e-3 * centre));
  }
  if (n < 2) return out;
  const auto primes = detail::first_primes(n - 1);
  std::vector<double> u(n - 1);
  for (std::size_t k = 1; k <= count; ++k) {
    for (std::size_t d = 0; d + 1 < n; ++d) u[d] = detail::radical_inverse(k, primes[d]);
    std::sort(u.begin(), u.end());
    Vector p(static_cast<Eigen::Index>(n));
    double prev = 0.0;
    for (std::size_t d = 0; d + 1 < n; ++d) {
      p[static_cast<Eigen::Index>(d)] = u[d] - prev;
      prev = u[d];
    }
    p[static_cast<Eigen::Index>(n - 1)] = 1.0 - prev;
    // Keep starts off the boundary where Newton steps are clipped.
    p = (p.array() + 1e-6).matrix();
    out.push_back(SimplexVector::from_weights(std::move(p)));
  }
  return out;
}

/// Unique fixed point for C0 = I, W = I in regimes where phi(x) = (1 - r(x)) x
/// is increasing on [0, 1]: solves sum_i phi^{-1}(kappa c_i) = 1 by nested
/// bisection.
inline FixedPointReport solve_kappa(const ModelSpec& model) {
  detail::require_plain_structure(model, "solve_kappa");
  const Reinforcement& r = model.reinforcement();
  const double g = r.gamma();
  switch (r.family()) {
    case Family::ExpAttract:
      if (g > 1.0) throw PreconditionError("solve_kappa: ExpAttract needs gamma <= 1");
      break;
    case Family::LinearAttract:
      if (g > 0.5) throw PreconditionError("solve_kappa: LinearAttract needs gamma <= 1/2");
      break;
    case Family::ExpRepel:
    case Family::LinearRepel:
      if (!(g > 0.0)) throw PreconditionError("solve_kappa: repelling families need gamma > 0");
      break;
    case Family::Custom: throw PreconditionError("solve_kappa: custom reinforcement is not supported");
  }

  const SimplexVector c = perron_vector(model.influence(), model.tolerances());
  const double phi_max = detail::held_back(r, 1.0);
  const double kappa_max = phi_max / c.entries().maxCoeff();
  const auto n = static_cast<Eigen::Index>(c.size());

  auto solve_at = [&](double kappa, Vector& p) {
    for (Eigen::Index i = 0; i < n; ++i) {
      p[i] = detail::invert_increasing(r, std::min(kappa * c.entries()[i], phi_max));
    }
    return p.sum();
  };

  Vector p(n);
  Vector p_hi(n);
  double lo = 0.0, s_lo = 0.0;
  double hi = kappa_max, s_hi = solve_at(hi, p_hi);
  if (s_hi < 1.0) throw ConvergenceError("solve_kappa: s(kappa_max) < 1");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double s = solve_at(mid, p);
    if (s < s_lo || s > s_hi) throw ConvergenceError("solve_kappa: s(kappa) not monotone along bisection");
    if (s < 1.0) {
      lo = mid;
      s_lo = s;
    } else {
      hi = mid;
      s_hi = s;
      p_hi = p;
      if (s == 1.0) break;
    }
  }
  SimplexVector star = SimplexVector::from_weights(p_hi);
  FixedPointReport report;
  report.method = FixedPointMethod::KappaSolve;
  report.points.push_back(detail::make_fixed_point(model, std::move(star), hi));
  if (report.points.front().residual > model.tolerances().fixed_point_residual) {
    throw ConvergenceError("solve_kappa: residual " + std::to_string(report.points.front().residual));
  }
  return report;
}

/// p_i = sqrt(c_i) / sum_j sqrt(c_j), the fixed point of r(x) = 1 - gamma x
/// for every gamma.
inline SimplexVector closed_form_sqrt(const RowStochasticMatrix& c, const Tolerances& tol = {}) {
  const SimplexVector pv = perron_vector(c, tol);
  return SimplexVector::from_weights(pv.entries().cwiseSqrt());
}

/// Damped Newton from a deterministic start set; converged points are
/// deduplicated and returned in lexicographic order. A start whose reduced
/// Jacobian turns singular is dropped.
inline FixedPointReport multistart_solve(const ModelSpec& model, std::size_t n_starts) {
  if (n_starts == 0) throw DomainError("multistart_solve: need at least one start");
  const Tolerances& tol = model.tolerances();
  FixedPointReport report;
  report.method = FixedPointMethod::Multistart;
  for (const auto& start : multistart_points(model.size(), n_starts)) {
    auto found = detail::newton_periodic_point(model, start, 1, tol.fixed_point_residual);
    if (!found) continue;
    FixedPoint fp = detail::make_fixed_point(model, *found);
    if (fp.residual > tol.fixed_point_residual) continue;
    auto dup = std::find_if(report.points.begin(), report.points.end(), [&](const FixedPoint& q) {
      return l1_distance(q.point, fp.point) < tol.dedup_radius;
    });
    if (dup == report.points.end()) {
      report.points.push_back(std::move(fp));
    } else if (fp.residual < dup->residual) {
      *dup = std::move(fp);
    }
  }
  std::sort(report.points.begin(), report.points.end(),
            [](const FixedPoint& a, const FixedPoint& b) { return detail::lex_less(a.point, b.point); });
  return report;
}

/// Perron entries all strictly below 1/2.
inline bool check_grouping_hypothesis(const RowStochasticMatrix& c, const Tolerances& tol = {}) {
  return perron_vector(c, tol).entries().maxCoeff() < 0.5;
}

/// Fixed point of the grouped model by Picard iteration on
/// p_j = (c_j / (1 - r_j)) / sum_k (c_k / (1 - r_k)), r_k = r((W p)_k).
/// Falls back to `multistart_solve` when the iteration does not settle.
inline FixedPointReport grouping_fixed_point(const ModelSpec& model, std::size_t max_iter) {
  if (!model.identity_stay()) throw PreconditionError("grouping_fixed_point requires C0 = I");
  const Reinforcement& r = model.reinforcement();
  const bool supported = (r.family() == Family::LinearAttract || r.family() == Family::ExpAttract) &&
                         r.gamma() == 1.0;
  if (!supported) {
    throw PreconditionError("grouping_fixed_point supports r(x) = x and r(x) = 1 - exp(-x) only");
  }
  const Tolerances& tol = model.tolerances();
  const Vector c = perron_vector(model.influence(), tol).entries();

  SimplexVector p = SimplexVector::uniform(model.size());
  bool settled = false;
  for (std::size_t it = 0; it < max_iter; ++it) {
    const Vector free = Vector::Ones(c.size()) - model.reinforcement_at(p);
    if (free.minCoeff() <= 0.0) break;
    const SimplexVector next = SimplexVector::from_weights(c.cwiseQuotient(free));
    const double change = l1_distance(next, p);
    p = next;
    if (change < 1e-15) {
      settled = true;
      break;
    }
  }
  if (settled || fixed_point_residual(model, p) <= tol.fixed_point_residual) {
    FixedPoint fp = detail::make_fixed_point(model, p);
    if (fp.residual <= tol.fixed_point_residual) {
      return {{std::move(fp)}, FixedPointMethod::PicardGrouping};
    }
  }
  FixedPointReport fallback = multistart_solve(model, 64);
  if (fallback.points.empty()) throw ConvergenceError("grouping_fixed_point: Picard and multistart both failed");
  return fallback;
}

/// Looks for a periodic orbit in the last third of `traj`: the smallest
/// q <= max_period with ||p(t+q) - p(t)||_1 small over the final 2q
/// indices. q = 1 means the trajectory settled on a fixed point and yields
/// no orbit. The detected point is polished by Newton on f^q.
inline std::optional<OrbitReport> detect_orbit(const ModelSpec& model, const Trajectory& traj,
                                               std::size_t max_period) {
  if (max_period == 0) throw DomainError("detect_orbit: max_period must be >= 1");
  if (traj.size() < 3 * max_period) throw DomainError("detect_orbit: trajectory shorter than 3 * max_period");
  const Tolerances& tol = model.tolerances();
  const std::size_t total = traj.size();
  const std::size_t tail_start = total - total / 3;

  std::size_t period = 0;
  for (std::size_t q = 1; q <= max_period && period == 0; ++q) {
    if (total < q + 1) break;
    std::size_t run = 0;
    for (std::size_t t = total - 1 - q; t + 1 > tail_start; --t) {
      if (l1_distance(traj.points[t + q], traj.points[t]) > tol.orbit_match) break;
      ++run;
      if (t == 0) break;
    }
    if (run >= 2 * q) period = q;
  }
  if (period <= 1) return std::nullopt;

  SimplexVector base = traj.back();
  if (auto polished = detail::newton_periodic_point(model, base, period, tol.orbit_defect)) base = *polished;

  // A shorter true period would show up as a divisor of q.
  for (std::size_t d = 1; d < period; ++d) {
    if (period % d == 0 && l1_distance(step_n(model, base, d), base) <= tol.orbit_defect) return std::nullopt;
  }

  OrbitReport orbit;
  orbit.period = period;
  orbit.points.push_back(base);
  for (std::size_t k = 1; k < period; ++k) orbit.points.push_back(step(model, orbit.points.back()));
  const auto first = std::min_element(orbit.points.begin(), orbit.points.end(), detail::lex_less);
  std::rotate(orbit.points.begin(), first, orbit.points.end());
  for (std::size_t k = 0; k < period; ++k) {
    orbit.max_defect =
        std::max(orbit.max_defect, l1_distance(step(model, orbit.points[k]), orbit.points[(k + 1) % period]));
  }
  if (orbit.max_defect > tol.orbit_defect) return std::nullopt;
  return orbit;
}

}  // namespace simplexdyn

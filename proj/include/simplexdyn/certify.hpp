#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simplexdyn/analysis.hpp"
#include "simplexdyn/dynamics.hpp"
#include "simplexdyn/fixedpoint.hpp"
#include "simplexdyn/model.hpp"

namespace simplexdyn {

enum class Verdict { GloballyAttractive, LocallyAttractive, OrbitAttractive, Unstable, Inconclusive };

/// Which argument produced a verdict.
enum class Basis {
  JacobianPositivity,  ///< Q strictly positive on the open simplex
  IterantPositivity,   ///< Jacobian of some iterate f^m strictly positive on the open simplex
  PowerPositivity,     ///< (df at p*)^m strictly positive
  TangentGain,         ///< induced tangent gain of an iterate below one
  OrbitProduct,        ///< cyclic Jacobian product around an orbit strictly positive
  GainExceedsOne,      ///< every checked gain > 1 and a tangent eigenvalue outside the unit disc
};

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::GloballyAttractive: return "GloballyAttractive";
    case Verdict::LocallyAttractive: return "LocallyAttractive";
    case Verdict::OrbitAttractive: return "OrbitAttractive";
    case Verdict::Unstable: return "Unstable";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

inline std::string_view to_string(Basis b) {
  switch (b) {
    case Basis::JacobianPositivity: return "jacobian_positivity";
    case Basis::IterantPositivity: return "iterant_positivity";
    case Basis::PowerPositivity: return "power_positivity";
    case Basis::TangentGain: return "tangent_gain";
    case Basis::OrbitProduct: return "orbit_product";
    case Basis::GainExceedsOne: return "gain_exceeds_one";
  }
  return "?";
}

struct StabilityCertificate {
  Verdict verdict = Verdict::Inconclusive;
  std::optional<Basis> basis;
  /// Tangent gain of the certifying iterate; 1 - factor is the margin.
  std::optional<double> contraction_factor;
  /// m of the certifying iterate (or the orbit period).
  std::optional<std::size_t> iterant_order;
  std::size_t evidence_points_sampled = 0;
  /// False when the verdict rests on sampled points rather than an
  /// analytic argument.
  bool proof_grade = false;
  std::optional<double> spectral_radius;
  std::optional<SimplexVector> fixed_point;
  /// Tangent gain for each checked order (local) or each orbit start (orbit).
  std::vector<double> gains;
  std::string diagnostic;
};

inline constexpr std::size_t kDefaultMaxOrder = 12;

namespace detail {

inline bool strictly_positive(const Matrix& m, double threshold) { return (m.array() > threshold).all(); }

// Smallest m with (I | pattern(C^T))^m entrywise true, or nothing within
// the Wielandt bound.
inline std::optional<std::size_t> primitivity_order(const Matrix& ct, std::size_t m_max) {
  using Pattern = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;
  Pattern base = (ct.array() > 0.0).cast<int>();
  base.diagonal().setOnes();
  Pattern acc = base;
  for (std::size_t m = 1; m <= m_max; ++m) {
    if ((acc.array() > 0).all()) return m;
    acc = ((base * acc).array() > 0).cast<int>();
  }
  return std::nullopt;
}

inline std::optional<SimplexVector> find_interior_fixed_point(const ModelSpec& model, std::string& diagnostic,
                                                             std::size_t& interior_count) {
  FixedPointReport report;
  const Family fam = model.reinforcement().family();
  const double g = model.reinforcement().gamma();
  const bool plain = model.identity_stay() && model.identity_grouping();
  const bool monotone = plain && ((fam == Family::ExpAttract && g <= 1.0) ||
                                  (fam == Family::LinearAttract && g <= 0.5) ||
                                  ((fam == Family::ExpRepel || fam == Family::LinearRepel) && g > 0.0));
  try {
    report = monotone ? solve_kappa(model) : multistart_solve(model, 64);
  } catch (const ConvergenceError& e) {
    diagnostic = e.what();
    return std::nullopt;
  }
  std::optional<SimplexVector> out;
  interior_count = 0;
  for (const auto& fp : report.points) {
    if (fp.boundary) continue;
    ++interior_count;
    if (!out) out = fp.point;
  }
  if (!out) diagnostic = "no interior fixed point found";
  return out;
}

}  // namespace detail

/// Local certificate at a fixed point p*. For m = 1..m_max the first
/// argument that fires wins: (Q^T)^m strictly positive, then tangent gain
/// of (Q^T)^m below one. Failing both at every order, a tangent eigenvalue
/// outside the unit disc marks the point unstable.
inline StabilityCertificate certify_local(const ModelSpec& model, const SimplexVector& p_star,
                                          std::size_t m_max = kDefaultMaxOrder) {
  const Tolerances& tol = model.tolerances();
  const double res = fixed_point_residual(model, p_star);
  if (res > tol.certify_residual) {
    throw NotInvariantError("certify_local: point is not a fixed point (residual " + std::to_string(res) + ")");
  }
  StabilityCertificate cert;
  cert.fixed_point = p_star;
  cert.evidence_points_sampled = 1;
  cert.proof_grade = true;
  if (!p_star.interior(tol.boundary)) cert.diagnostic = "fixed point lies on the boundary of the simplex";
  const Matrix qt = jacobian(model, p_star).action;
  Matrix power = qt;
  for (std::size_t m = 1; m <= m_max; ++m) {
    if (m > 1) power = qt * power;
    const double gain = l1_tangent_gain(power, std::max(tol.gain_colsum, static_cast<double>(m) * tol.jacobian_colsum));
    cert.gains.push_back(gain);
    if (detail::strictly_positive(power, tol.positivity)) {
      cert.verdict = Verdict::LocallyAttractive;
      cert.basis = Basis::PowerPositivity;
      cert.contraction_factor = gain;
      cert.iterant_order = m;
      return cert;
    }
    if (gain < 1.0 - tol.contraction_margin) {
      cert.verdict = Verdict::LocallyAttractive;
      cert.basis = Basis::TangentGain;
      cert.contraction_factor = gain;
      cert.iterant_order = m;
      return cert;
    }
  }
  cert.spectral_radius = tangent_spectral_radius(qt);
  if (*cert.spectral_radius > 1.0 + tol.contraction_margin) {
    cert.verdict = Verdict::Unstable;
    cert.basis = Basis::GainExceedsOne;
  } else {
    cert.verdict = Verdict::Inconclusive;
    cert.diagnostic = "no iterate up to order " + std::to_string(m_max) + " certifies contraction";
  }
  return cert;
}

/// Global certificate. With C0 = I, W = I and a family/gamma pair that keeps
/// the Jacobian column-stochastic, positivity of some iterate follows from
/// the sparsity pattern of I + C^T alone (proof grade). Otherwise interior
/// grid points are sampled and the Jacobian of f^m along each trajectory
/// must be strictly positive for one common m (sampled evidence only).
inline StabilityCertificate certify_global(const ModelSpec& model, std::size_t grid_density = 20,
                                           std::size_t m_max = kDefaultMaxOrder) {
  const Tolerances& tol = model.tolerances();
  StabilityCertificate cert;
  std::size_t interior_count = 0;
  auto p_star = detail::find_interior_fixed_point(model, cert.diagnostic, interior_count);
  if (!p_star) return cert;
  cert.fixed_point = p_star;
  if (interior_count > 1) {
    cert.diagnostic = std::to_string(interior_count) + " interior fixed points; none can be globally attractive";
    return cert;
  }

  const bool plain = model.identity_stay() && model.identity_grouping();
  if (plain && guaranteed_contractive(model) && model.influence().irreducible()) {
    if (auto m = detail::primitivity_order(model.influence().entries().transpose(), m_max)) {
      cert.verdict = Verdict::GloballyAttractive;
      cert.basis = Basis::IterantPositivity;
      cert.iterant_order = *m;
      cert.proof_grade = true;
      return cert;
    }
  }

  // Sampled route: for each interior grid point, the orders m at which the
  // iterant Jacobian along its trajectory is strictly positive.
  const auto grid = barycentric_grid(model.size(), std::max(grid_density, model.size()), true);
  std::vector<char> common(m_max + 1, 1);
  common[0] = 0;
  for (const auto& p : grid) {
    const auto n = static_cast<Eigen::Index>(model.size());
    Matrix prod = Matrix::Identity(n, n);
    SimplexVector x = p;
    for (std::size_t m = 1; m <= m_max; ++m) {
      prod = jacobian(model, x).action * prod;
      x = step(model, x);
      if (!detail::strictly_positive(prod, tol.positivity)) common[m] = 0;
    }
    ++cert.evidence_points_sampled;
  }
  for (std::size_t m = 1; m <= m_max; ++m) {
    if (common[m]) {
      cert.verdict = Verdict::GloballyAttractive;
      cert.basis = m == 1 ? Basis::JacobianPositivity : Basis::IterantPositivity;
      cert.iterant_order = m;
      cert.proof_grade = false;
      cert.diagnostic = "sampled evidence on " + std::to_string(cert.evidence_points_sampled) + " interior grid points";
      return cert;
    }
  }
  cert.diagnostic = "no common order up to " + std::to_string(m_max) + " gives a positive iterant Jacobian on the grid";
  return cert;
}

/// Orbit certificate from the cyclic Jacobian products
/// Q(p_{i+m-1})^T ... Q(p_i)^T, one per starting index i.
inline StabilityCertificate certify_orbit(const ModelSpec& model, const OrbitReport& orbit,
                                          std::size_t m_max = kDefaultMaxOrder) {
  const Tolerances& tol = model.tolerances();
  const std::size_t m = orbit.points.size();
  if (m == 0 || orbit.period != m) throw NotInvariantError("certify_orbit: malformed orbit");
  double defect = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    defect = std::max(defect, l1_distance(step(model, orbit.points[i]), orbit.points[(i + 1) % m]));
  }
  if (defect > tol.orbit_defect) {
    throw NotInvariantError("certify_orbit: orbit defect " + std::to_string(defect));
  }
  if (m == 1) return certify_local(model, orbit.points.front(), m_max);

  StabilityCertificate cert;
  cert.iterant_order = m;
  cert.evidence_points_sampled = m;
  cert.proof_grade = true;
  std::vector<Matrix> jac;
  for (const auto& p : orbit.points) jac.push_back(jacobian(model, p).action);
  std::optional<std::size_t> fired;
  std::vector<Matrix> products;
  for (std::size_t i = 0; i < m; ++i) {
    Matrix prod = jac[i];
    for (std::size_t k = 1; k < m; ++k) prod = jac[(i + k) % m] * prod;
    const double gain =
        l1_tangent_gain(prod, std::max(tol.gain_colsum, static_cast<double>(m) * tol.jacobian_colsum));
    cert.gains.push_back(gain);
    if (!fired) {
      if (detail::strictly_positive(prod, tol.positivity)) {
        fired = i;
        cert.basis = Basis::OrbitProduct;
        cert.contraction_factor = gain;
      } else if (gain < 1.0 - tol.contraction_margin) {
        fired = i;
        cert.basis = Basis::TangentGain;
        cert.contraction_factor = gain;
      }
    }
    products.push_back(std::move(prod));
  }
  if (fired) {
    cert.verdict = Verdict::OrbitAttractive;
    return cert;
  }
  cert.spectral_radius = tangent_spectral_radius(products.front());
  if (*cert.spectral_radius > 1.0 + tol.contraction_margin) {
    cert.verdict = Verdict::Unstable;
    cert.basis = Basis::GainExceedsOne;
  } else {
    cert.diagnostic = "no cyclic product certifies contraction";
  }
  return cert;
}

}  // namespace simplexdyn

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "simplexdyn/core.hpp"

namespace simplexdyn {

/// Shape of the reinforcement function r : [0,1] -> [0,1].
enum class Family {
  LinearAttract,  ///< r(x) = gamma x
  LinearRepel,    ///< r(x) = 1 - gamma x
  ExpAttract,     ///< r(x) = 1 - exp(-gamma x)
  ExpRepel,       ///< r(x) = exp(-gamma x)
  Custom,         ///< user supplied; simulation only
};

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::LinearAttract: return "LinearAttract";
    case Family::LinearRepel: return "LinearRepel";
    case Family::ExpAttract: return "ExpAttract";
    case Family::ExpRepel: return "ExpRepel";
    case Family::Custom: return "Custom";
  }
  return "?";
}

inline std::optional<Family> family_from_string(std::string_view s) {
  for (Family f : {Family::LinearAttract, Family::LinearRepel, Family::ExpAttract, Family::ExpRepel}) {
    if (s == to_string(f)) return f;
  }
  return std::nullopt;
}

/// The reinforcement function shared by every state.
class Reinforcement {
 public:
  Reinforcement(Family family, double gamma) : family_(family), gamma_(gamma) {
    if (family == Family::Custom) throw DomainError("use Reinforcement::custom for user functions");
    if (!std::isfinite(gamma) || gamma < 0.0) throw DomainError("gamma must be finite and >= 0");
    if ((family == Family::LinearAttract || family == Family::LinearRepel) && gamma > 1.0) {
      throw DomainError("linear reinforcement requires gamma <= 1, got " + std::to_string(gamma));
    }
    for (double x : {0.0, 1.0}) {
      const double r = value(x);
      if (r < 0.0 || r > 1.0) throw DomainError("reinforcement leaves [0,1]");
    }
  }

  /// A user-supplied r with its derivative. Accepted by the simulation and
  /// Jacobian routines; rejected by every certification path.
  static Reinforcement custom(std::function<double(double)> r, std::function<double(double)> dr) {
    if (!r || !dr) throw DomainError("custom reinforcement needs both r and r'");
    Reinforcement out;
    out.custom_ = std::make_shared<const CustomFns>(CustomFns{std::move(r), std::move(dr)});
    for (int k = 0; k <= 64; ++k) {
      const double v = out.value(k / 64.0);
      if (!(v >= 0.0 && v <= 1.0)) throw DomainError("custom reinforcement leaves [0,1]");
    }
    return out;
  }

  Family family() const noexcept { return family_; }
  double gamma() const noexcept { return gamma_; }

  /// r(x) without a domain check.
  double value(double x) const {
    switch (family_) {
      case Family::LinearAttract: return gamma_ * x;
      case Family::LinearRepel: return 1.0 - gamma_ * x;
      case Family::ExpAttract: return -std::expm1(-gamma_ * x);
      case Family::ExpRepel: return std::exp(-gamma_ * x);
      case Family::Custom: return custom_->r(x);
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  /// r'(x) without a domain check.
  double derivative(double x) const {
    switch (family_) {
      case Family::LinearAttract: return gamma_;
      case Family::LinearRepel: return -gamma_;
      case Family::ExpAttract: return gamma_ * std::exp(-gamma_ * x);
      case Family::ExpRepel: return -gamma_ * std::exp(-gamma_ * x);
      case Family::Custom: return custom_->dr(x);
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  Reinforcement with_gamma(double gamma) const {
    if (family_ == Family::Custom) throw DomainError("custom reinforcement has no gamma");
    return {family_, gamma};
  }

 private:
  struct CustomFns {
    std::function<double(double)> r;
    std::function<double(double)> dr;
  };

  Reinforcement() : family_(Family::Custom), gamma_(std::numeric_limits<double>::quiet_NaN()) {}

  Family family_;
  double gamma_;
  std::shared_ptr<const CustomFns> custom_;
};

namespace detail {

inline double checked_unit(double x, double tol) {
  if (!(x >= -tol && x <= 1.0 + tol)) throw DomainError("reinforcement argument outside [0,1]: " + std::to_string(x));
  return std::clamp(x, 0.0, 1.0);
}

}  // namespace detail

inline double r_eval(const Reinforcement& r, double x) {
  return r.value(detail::checked_unit(x, Tolerances{}.simplex));
}

inline double r_derivative(const Reinforcement& r, double x) {
  return r.derivative(detail::checked_unit(x, Tolerances{}.simplex));
}

struct ModelOptions {
  /// C0; identity when absent.
  std::optional<RowStochasticMatrix> stay;
  /// W; identity when absent.
  std::optional<RowStochasticMatrix> grouping;
  Tolerances tolerances{};
  /// Skip the irreducible/aperiodic requirement on the influence matrix.
  bool allow_reducible = false;
};

/// f(p) = (C0^T D(p) + C1^T (I - D(p))) p with D(p) = diag(r(W p)).
class ModelSpec {
 public:
  ModelSpec(RowStochasticMatrix influence, Reinforcement reinforcement, ModelOptions options = {})
      : c1_(std::move(influence)),
        c0_(options.stay ? std::move(*options.stay) : RowStochasticMatrix::identity(c1_.size())),
        w_(options.grouping ? std::move(*options.grouping) : RowStochasticMatrix::identity(c1_.size())),
        r_(std::move(reinforcement)),
        tol_(options.tolerances),
        allow_reducible_(options.allow_reducible) {
    if (c0_.size() != c1_.size() || w_.size() != c1_.size()) {
      throw DimensionError("model matrices must share one dimension");
    }
    if (!allow_reducible_ && !(c1_.irreducible() && c1_.aperiodic())) {
      throw PreconditionError("influence matrix must be irreducible and aperiodic");
    }
  }

  const RowStochasticMatrix& influence() const noexcept { return c1_; }
  const RowStochasticMatrix& stay() const noexcept { return c0_; }
  const RowStochasticMatrix& grouping() const noexcept { return w_; }
  const Reinforcement& reinforcement() const noexcept { return r_; }
  const Tolerances& tolerances() const noexcept { return tol_; }
  std::size_t size() const noexcept { return c1_.size(); }

  bool identity_stay() const { return c0_.is_identity(); }
  bool identity_grouping() const { return w_.is_identity(); }

  ModelSpec with_reinforcement(Reinforcement r) const {
    ModelSpec out = *this;
    out.r_ = std::move(r);
    return out;
  }

  ModelSpec with_gamma(double gamma) const { return with_reinforcement(r_.with_gamma(gamma)); }

  ModelSpec with_tolerances(const Tolerances& tol) const {
    ModelSpec out = *this;
    out.tol_ = tol;
    return out;
  }

  /// r(W p), entrywise.
  Vector reinforcement_at(const SimplexVector& p) const {
    if (p.size() != size()) throw DimensionError("model/point dimension mismatch");
    Vector x = w_.entries() * p.entries();
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = r_.value(detail::checked_unit(x[i], 1e-9));
    return x;
  }

  /// r'(W p), entrywise.
  Vector reinforcement_slope_at(const SimplexVector& p) const {
    if (p.size() != size()) throw DimensionError("model/point dimension mismatch");
    Vector x = w_.entries() * p.entries();
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = r_.derivative(detail::checked_unit(x[i], 1e-9));
    return x;
  }

 private:
  RowStochasticMatrix c1_;
  RowStochasticMatrix c0_;
  RowStochasticMatrix w_;
  Reinforcement r_;
  Tolerances tol_;
  bool allow_reducible_;
};

/// Whether the family/gamma pair keeps the Jacobian multiplier
/// g(x) = r(x) + x r'(x) inside [0,1] on [0,1], which makes the Jacobian
/// column-stochastic everywhere. `false` means "not guaranteed", not
/// "not contractive".
///
/// Only meaningful for C0 = I and W = I.
inline bool guaranteed_contractive(const ModelSpec& model) {
  if (!model.identity_stay() || !model.identity_grouping()) {
    throw PreconditionError("guaranteed_contractive requires C0 = I and W = I");
  }
  const double g = model.reinforcement().gamma();
  switch (model.reinforcement().family()) {
    case Family::ExpAttract:
    case Family::ExpRepel: return g <= 1.0;
    case Family::LinearAttract:
    case Family::LinearRepel: return g <= 0.5;
    case Family::Custom: return false;
  }
  return false;
}

}  // namespace simplexdyn

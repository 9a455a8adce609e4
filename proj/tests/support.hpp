// Shared fixtures, generators and independent oracles for the test suites.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "simplexdyn/simplexdyn.hpp"

namespace testing_support {

using simplexdyn::Family;
using simplexdyn::Matrix;
using simplexdyn::ModelOptions;
using simplexdyn::ModelSpec;
using simplexdyn::Reinforcement;
using simplexdyn::RowStochasticMatrix;
using simplexdyn::SimplexVector;
using simplexdyn::Vector;

inline RowStochasticMatrix single_leader() { return {{0.8, 0.1, 0.1}, {0.4, 0.2, 0.4}, {0.4, 0.4, 0.2}}; }
inline RowStochasticMatrix symmetric_ring() { return {{0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}}; }
inline RowStochasticMatrix two_step() { return {{0.0, 0.0, 1.0}, {0.5, 0.5, 0.0}, {0.5, 0.5, 0.0}}; }
inline RowStochasticMatrix oscillating() { return {{0.0, 0.0, 1.0}, {0.8, 0.0, 0.2}, {0.8, 0.2, 0.0}}; }
inline RowStochasticMatrix pair_grouping() { return {{0.5, 0.5, 0.0}, {0.5, 0.5, 0.0}, {0.0, 0.0, 1.0}}; }

inline ModelSpec make_model(const RowStochasticMatrix& c, Family f, double gamma) {
  return ModelSpec(c, Reinforcement(f, gamma));
}

inline ModelSpec grouping_model(const RowStochasticMatrix& w) {
  ModelOptions opts;
  opts.grouping = w;
  return ModelSpec(single_leader(), Reinforcement(Family::ExpAttract, 1.0), opts);
}

inline SimplexVector point(std::initializer_list<double> xs) { return SimplexVector(xs); }

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }
inline double max_abs_diff(const SimplexVector& a, std::initializer_list<double> b) {
  double worst = 0.0;
  std::size_t i = 0;
  for (double x : b) worst = std::max(worst, std::abs(a[i++] - x));
  return worst;
}

inline const std::vector<Family>& closed_families() {
  static const std::vector<Family> f{Family::LinearAttract, Family::LinearRepel, Family::ExpAttract, Family::ExpRepel};
  return f;
}

// ---------------------------------------------------------------------------
// Generators (fixed seeds at the call sites).

using Rng = std::mt19937_64;

inline SimplexVector random_simplex(Rng& rng, std::size_t n, double floor = 0.0) {
  std::exponential_distribution<double> e(1.0);
  Vector w(static_cast<Eigen::Index>(n));
  for (auto& x : w) x = e(rng) + floor;
  return SimplexVector::from_weights(w);
}

/// Irreducible and aperiodic: positive diagonal (unless `zero_diagonal`)
/// and a positive cycle 0 -> 1 -> ... -> n-1 -> 0, plus random extra edges.
inline RowStochasticMatrix random_stochastic(Rng& rng, std::size_t n, bool zero_diagonal = false,
                                             double density = 0.6) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::bernoulli_distribution keep(density);
  const auto m = static_cast<Eigen::Index>(n);
  Matrix a = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == j) {
        if (!zero_diagonal) a(i, j) = u(rng);
      } else if (keep(rng) || j == (i + 1) % m) {
        a(i, j) = u(rng);
      }
    }
  }
  if (zero_diagonal && n >= 3) a(0, 2) = u(rng);  // a 2-cycle and a 3-cycle through node 0
  if (zero_diagonal && n >= 2) a(1, 0) = u(rng);
  for (Eigen::Index i = 0; i < m; ++i) a.row(i) /= a.row(i).sum();
  return RowStochasticMatrix(a);
}

inline double random_gamma(Rng& rng, Family f) {
  if (f == Family::LinearAttract || f == Family::LinearRepel) return std::uniform_real_distribution<double>(0.05, 1.0)(rng);
  return std::uniform_real_distribution<double>(0.1, 6.0)(rng);
}

/// Random model; with `general`, C0 and W are random stochastic matrices too.
inline ModelSpec random_model(Rng& rng, Family f, std::size_t n, bool general = false) {
  ModelOptions opts;
  if (general) {
    opts.stay = random_stochastic(rng, n, false, 0.5);
    opts.grouping = random_stochastic(rng, n, false, 0.5);
  }
  return ModelSpec(random_stochastic(rng, n), Reinforcement(f, random_gamma(rng, f)), opts);
}

// ---------------------------------------------------------------------------
// Independent oracles. None of these call library numerics.

inline double oracle_r(Family f, double g, double x) {
  switch (f) {
    case Family::LinearAttract: return g * x;
    case Family::LinearRepel: return 1.0 - g * x;
    case Family::ExpAttract: return 1.0 - std::exp(-g * x);
    case Family::ExpRepel: return std::exp(-g * x);
    default: return 0.0;
  }
}

/// The map written out directly from its definition: state i keeps mass
/// r_i p_i (moved by C0) and hands (1 - r_i) p_i to C1.
inline Vector oracle_step(const Matrix& c1, const Matrix& c0, const Matrix& w, Family f, double g, const Vector& p) {
  const Vector wp = w * p;
  Vector out = Vector::Zero(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double r = oracle_r(f, g, wp[i]);
    for (Eigen::Index j = 0; j < p.size(); ++j) out[j] += p[i] * (r * c0(i, j) + (1.0 - r) * c1(i, j));
  }
  return out;
}

inline Vector oracle_step(const ModelSpec& m, const Vector& p) {
  return oracle_step(m.influence().entries(), m.stay().entries(), m.grouping().entries(), m.reinforcement().family(),
                     m.reinforcement().gamma(), p);
}

/// Stationary vector from a dense eigen decomposition of C^T.
inline Vector oracle_perron(const Matrix& c) {
  Eigen::EigenSolver<Matrix> es(c.transpose());
  Eigen::Index best = 0;
  double gap = 1e300;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double d = std::abs(es.eigenvalues()[k] - std::complex<double>(1.0, 0.0));
    if (d < gap) {
      gap = d;
      best = k;
    }
  }
  Vector v = es.eigenvectors().col(best).real();
  return v / v.sum();
}

/// Largest ||Q^T delta||_1 / ||delta||_1 over a sample of zero-sum deltas,
/// including every e_j - e_k.
inline double oracle_sampled_gain(const Matrix& qt, Rng& rng, std::size_t samples) {
  const Eigen::Index n = qt.rows();
  double best = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) {
      if (j == k) continue;
      Vector d = Vector::Zero(n);
      d[j] = 1.0;
      d[k] = -1.0;
      best = std::max(best, (qt * d).lpNorm<1>() / 2.0);
    }
  std::normal_distribution<double> z(0.0, 1.0);
  for (std::size_t s = 0; s < samples; ++s) {
    Vector d(n);
    for (auto& x : d) x = z(rng);
    d.array() -= d.mean();
    best = std::max(best, (qt * d).lpNorm<1>() / d.lpNorm<1>());
  }
  return best;
}

/// Bisection on a sign change of `g` over [lo, hi].
inline double bisect(const std::function<double(double)>& g, double lo, double hi) {
  double glo = g(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Fixed-point coordinate y = p_2 = p_3 for the single-leader influence
/// matrix with ExpAttract gamma = 4, from the one-variable reduction
/// (1 - 2y)/y * exp(-4 (1 - 3y)) = 4.
inline double oracle_single_leader_minor() {
  return bisect([](double y) { return (1.0 - 2.0 * y) / y * std::exp(-4.0 * (1.0 - 3.0 * y)) - 4.0; }, 1e-6, 1.0 / 3.0);
}

/// Roots a of exp(-4(1-a))(1-a) = exp(-2a) a/2 (the cyclic family (1-a, a/2, a/2)
/// for the symmetric ring, ExpAttract gamma = 4) inside [lo, hi].
inline double oracle_ring_a(double lo, double hi) {
  return bisect([](double a) { return std::exp(-4.0 * (1.0 - a)) * (1.0 - a) - std::exp(-2.0 * a) * a / 2.0; }, lo, hi);
}

/// Classic RK4 on dp/dt = C^T (1 - r(p)) p - (1 - r(p)) p, integrated to time T.
inline Vector oracle_flow_rk4(const Matrix& c, Family f, double g, Vector p, double t_end, std::size_t steps) {
  auto field = [&](const Vector& x) {
    Vector free(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) free[i] = (1.0 - oracle_r(f, g, x[i])) * x[i];
    return Vector(c.transpose() * free - free);
  };
  const double h = t_end / static_cast<double>(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    const Vector k1 = field(p);
    const Vector k2 = field(p + 0.5 * h * k1);
    const Vector k3 = field(p + 0.5 * h * k2);
    const Vector k4 = field(p + h * k3);
    p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return p;
}

}  // namespace testing_support

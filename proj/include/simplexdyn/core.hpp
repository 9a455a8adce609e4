#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "simplexdyn/errors.hpp"
#include "simplexdyn/tolerances.hpp"

namespace simplexdyn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace detail {

inline std::string describe(const Vector& v) {
  std::ostringstream os;
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

inline void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw DomainError(std::string(what) + " has non-finite entries");
}

// Clamps entries in [-tol, 0) to zero; rejects anything more negative.
inline void clamp_small_negatives(Vector& v, double tol, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] < -tol) {
      throw DomainError(std::string(what) + " entry " + std::to_string(i) +
                        " is negative: " + std::to_string(v[i]));
    }
    if (v[i] < 0.0) v[i] = 0.0;
  }
}

}  // namespace detail

/// A probability vector: nonnegative entries summing to one.
class SimplexVector {
 public:
  /// Validates `entries` against the simplex. Entries in [-tol, 0) are
  /// clamped and the sum must be within `tol` of one; the stored vector is
  /// renormalized afterwards.
  explicit SimplexVector(Vector entries, double tol = Tolerances{}.simplex) : v_(std::move(entries)) {
    if (v_.size() == 0) throw DimensionError("simplex vector must be non-empty");
    detail::require_finite(v_, "simplex vector");
    detail::clamp_small_negatives(v_, tol, "simplex vector");
    const double s = v_.sum();
    if (std::abs(s - 1.0) > tol) {
      throw DomainError("simplex vector sums to " + std::to_string(s) + ", not 1");
    }
    v_ /= s;
  }

  SimplexVector(std::initializer_list<double> entries, double tol = Tolerances{}.simplex)
      : SimplexVector(Eigen::Map<const Vector>(entries.begin(), static_cast<Eigen::Index>(entries.size())),
                      tol) {}

  /// Divides nonnegative weights by their sum.
  static SimplexVector from_weights(Vector weights, double tol = Tolerances{}.simplex) {
    detail::require_finite(weights, "weight vector");
    detail::clamp_small_negatives(weights, tol, "weight vector");
    const double s = weights.sum();
    if (!(s > 0.0)) throw DomainError("weight vector has zero mass");
    return SimplexVector(Tag{}, weights / s);
  }

  static SimplexVector uniform(std::size_t n) {
    if (n == 0) throw DimensionError("simplex vector must be non-empty");
    return SimplexVector(Tag{}, Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
  }

  static SimplexVector vertex(std::size_t n, std::size_t i) {
    if (i >= n) throw DimensionError("vertex index out of range");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
    v[static_cast<Eigen::Index>(i)] = 1.0;
    return SimplexVector(Tag{}, std::move(v));
  }

  const Vector& entries() const noexcept { return v_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(v_.size()); }
  double operator[](std::size_t i) const { return v_[static_cast<Eigen::Index>(i)]; }
  double min_entry() const { return v_.minCoeff(); }

  /// True when every entry exceeds `tol`.
  bool interior(double tol = 0.0) const { return v_.minCoeff() > tol; }

  std::vector<double> to_std() const { return {v_.data(), v_.data() + v_.size()}; }

 private:
  struct Tag {};
  SimplexVector(Tag, Vector v) : v_(std::move(v)) {}

  Vector v_;
};

/// A zero-sum direction in the tangent space of the simplex.
class TangentVector {
 public:
  explicit TangentVector(Vector entries, double tol = Tolerances{}.simplex) : v_(std::move(entries)) {
    detail::require_finite(v_, "tangent vector");
    if (std::abs(v_.sum()) > tol) {
      throw DomainError("tangent vector sums to " + std::to_string(v_.sum()) + ", not 0");
    }
  }

  /// b - a.
  static TangentVector difference(const SimplexVector& b, const SimplexVector& a) {
    if (b.size() != a.size()) throw DimensionError("tangent difference: dimension mismatch");
    return TangentVector(b.entries() - a.entries(), 4 * Tolerances{}.simplex);
  }

  /// e_j - e_k.
  static TangentVector vertex_difference(std::size_t n, std::size_t j, std::size_t k) {
    if (j >= n || k >= n) throw DimensionError("vertex index out of range");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
    v[static_cast<Eigen::Index>(j)] += 1.0;
    v[static_cast<Eigen::Index>(k)] -= 1.0;
    return TangentVector(std::move(v));
  }

  const Vector& entries() const noexcept { return v_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(v_.size()); }
  double l1_norm() const { return v_.lpNorm<1>(); }

 private:
  Vector v_;
};

/// Graph properties of the digraph of strictly positive entries.
struct Connectivity {
  bool irreducible = false;
  bool aperiodic = false;
};

namespace detail {

using Adjacency = std::vector<std::vector<std::size_t>>;

inline Adjacency positive_digraph(const Matrix& m) {
  const auto n = static_cast<std::size_t>(m.rows());
  Adjacency adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.0) adj[i].push_back(j);
  return adj;
}

// Kosaraju with explicit stacks; returns the component id of every node.
inline std::vector<std::size_t> strong_components(const Adjacency& adj, std::size_t& count) {
  const std::size_t n = adj.size();
  Adjacency rev(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v : adj[u]) rev[v].push_back(u);

  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<char> seen(n, 0);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    seen[s] = 1;
    stack.emplace_back(s, 0);
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      if (next < adj[u].size()) {
        const std::size_t v = adj[u][next++];
        if (!seen[v]) {
          seen[v] = 1;
          stack.emplace_back(v, 0);
        }
      } else {
        order.push_back(u);
        stack.pop_back();
      }
    }
  }

  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> comp(n, unset);
  count = 0;
  std::vector<std::size_t> work;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[*it] != unset) continue;
    comp[*it] = count;
    work.push_back(*it);
    while (!work.empty()) {
      const std::size_t u = work.back();
      work.pop_back();
      for (std::size_t v : rev[u]) {
        if (comp[v] == unset) {
          comp[v] = count;
          work.push_back(v);
        }
      }
    }
    ++count;
  }
  return comp;
}

inline Connectivity analyze_pattern(const Matrix& m) {
  const Adjacency adj = positive_digraph(m);
  const std::size_t n = adj.size();
  std::size_t ncomp = 0;
  const auto comp = strong_components(adj, ncomp);

  Connectivity out;
  out.irreducible = (ncomp == 1);
  out.aperiodic = true;

  // Period of each component: gcd over internal edges of the BFS level
  // defect level[u] + 1 - level[v]. Components without internal edges carry
  // no cycles and impose nothing.
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> level(n, unset);
  std::vector<std::size_t> queue;
  for (std::size_t root = 0; root < n; ++root) {
    if (level[root] != unset) continue;
    level[root] = 0;
    queue.assign(1, root);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t u = queue[head];
      for (std::size_t v : adj[u]) {
        if (comp[v] == comp[root] && level[v] == unset) {
          level[v] = level[u] + 1;
          queue.push_back(v);
        }
      }
    }
    long long period = 0;
    for (std::size_t u : queue) {
      for (std::size_t v : adj[u]) {
        if (comp[v] != comp[u]) continue;
        const long long defect = static_cast<long long>(level[u]) + 1 - static_cast<long long>(level[v]);
        period = std::gcd(period, defect < 0 ? -defect : defect);
      }
    }
    if (period > 1) out.aperiodic = false;
  }
  return out;
}

}  // namespace detail

/// A square row-stochastic matrix together with the connectivity of its
/// positive-entry digraph.
class RowStochasticMatrix {
 public:
  /// Entries in [-tol, 0) are clamped and each row renormalized; rows must
  /// sum to one within `tol`.
  explicit RowStochasticMatrix(Matrix entries, double tol = Tolerances{}.simplex) : m_(std::move(entries)) {
    if (m_.rows() == 0 || m_.rows() != m_.cols()) {
      throw DimensionError("stochastic matrix must be square and non-empty");
    }
    if (!m_.allFinite()) throw DomainError("stochastic matrix has non-finite entries");
    for (Eigen::Index i = 0; i < m_.rows(); ++i) {
      for (Eigen::Index j = 0; j < m_.cols(); ++j) {
        if (m_(i, j) < -tol) {
          throw DomainError("stochastic matrix entry (" + std::to_string(i) + "," + std::to_string(j) +
                            ") is negative");
        }
        if (m_(i, j) < 0.0) m_(i, j) = 0.0;
      }
      const double s = m_.row(i).sum();
      if (std::abs(s - 1.0) > tol) {
        throw DomainError("stochastic matrix row " + std::to_string(i) + " sums to " + std::to_string(s));
      }
      m_.row(i) /= s;
    }
    conn_ = detail::analyze_pattern(m_);
  }

  RowStochasticMatrix(std::initializer_list<std::initializer_list<double>> rows,
                      double tol = Tolerances{}.simplex)
      : RowStochasticMatrix(from_rows(rows), tol) {}

  static RowStochasticMatrix identity(std::size_t n) {
    return RowStochasticMatrix(Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  }

  const Matrix& entries() const noexcept { return m_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  bool irreducible() const noexcept { return conn_.irreducible; }
  bool aperiodic() const noexcept { return conn_.aperiodic; }
  Connectivity connectivity() const noexcept { return conn_; }

  bool is_identity() const { return m_.isIdentity(0.0); }

 private:
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix m(n, n);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
      if (static_cast<Eigen::Index>(row.size()) != n) throw DimensionError("stochastic matrix must be square");
      Eigen::Index j = 0;
      for (double x : row) m(i, j++) = x;
      ++i;
    }
    return m;
  }

  Matrix m_;
  Connectivity conn_;
};

/// sum_i |a_i - b_i|.
inline double l1_distance(const SimplexVector& a, const SimplexVector& b) {
  if (a.size() != b.size()) throw DimensionError("l1_distance: dimension mismatch");
  return (a.entries() - b.entries()).lpNorm<1>();
}

inline Connectivity check_connectivity(const RowStochasticMatrix& c) { return c.connectivity(); }

/// The stationary distribution c of an irreducible chain (C^T c = c).
///
/// Power iteration on (C^T + I)/2, which shares its Perron vector with C^T
/// but is aperiodic even when C is not.
inline SimplexVector perron_vector(const RowStochasticMatrix& c, const Tolerances& tol = {}) {
  if (!c.irreducible()) {
    throw PreconditionError("perron_vector: matrix is reducible, no unique positive eigenvector");
  }
  const Matrix lazy = 0.5 * (c.entries().transpose() + Matrix::Identity(c.entries().rows(), c.entries().cols()));
  const auto n = static_cast<Eigen::Index>(c.size());
  Vector x = Vector::Constant(n, 1.0 / static_cast<double>(n));
  Vector next(n);
  std::size_t it = 0;
  for (; it < tol.power_max_iter; ++it) {
    next.noalias() = lazy * x;
    next /= next.sum();
    const double change = (next - x).lpNorm<1>();
    x.swap(next);
    if (change < tol.power_change) break;
  }
  const double residual = (c.entries().transpose() * x - x).lpNorm<Eigen::Infinity>();
  if (residual > tol.eigen_residual) {
    throw ConvergenceError("perron_vector: residual " + std::to_string(residual) + " after " +
                           std::to_string(it) + " iterations");
  }
  if (x.minCoeff() <= 0.0) throw ConvergenceError("perron_vector: non-positive entry in result");
  return SimplexVector::from_weights(std::move(x));
}

}  // namespace simplexdyn

#pragma once

#include <stdexcept>
#include <string>

namespace simplexdyn {

/// Base class of everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand sizes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value is outside the domain of an operation (non-stochastic matrix,
/// entry off the simplex, gamma out of range, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A structural requirement of an algorithm is not met, e.g. a reducible
/// matrix where a unique Perron vector is needed, or a model outside the
/// regime an analytic condition was derived for.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative method did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A point (or orbit) handed to a certification routine is not a fixed
/// point (orbit) within tolerance.
class NotInvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace simplexdyn

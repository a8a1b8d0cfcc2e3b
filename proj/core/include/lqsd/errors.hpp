#pragma once

#include <stdexcept>
#include <string>

namespace lqsd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters violate a model invariant (e.g. a non-positive Gaussian coefficient).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain on which an operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Iterative procedure failed to converge or to bracket a root.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A computed quantity that is fixed by theory (total mass, sample size) is off.
class ToleranceError : public Error {
 public:
  using Error::Error;
};

}  // namespace lqsd

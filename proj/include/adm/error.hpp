#pragma once

#include <stdexcept>
#include <string>

namespace adm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition or domain violation on an argument.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two fields live on different lattices.
class LatticeMismatch : public Error {
 public:
  LatticeMismatch() : Error("lattice mismatch") {}
};

/// The filter has no bounded inverse on the truncated lattice.
class NonInvertibleFilter : public Error {
 public:
  NonInvertibleFilter() : Error("non-invertible filter") {}
};

/// A time integration produced NaN or Inf.
class BlowUp : public Error {
 public:
  BlowUp(long step, const std::string& what)
      : Error("blow-up at step " + std::to_string(step) + ": " + what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace adm

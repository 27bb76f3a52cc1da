#pragma once

#include <stdexcept>
#include <string>

namespace symmwell {

/// Raised when an iterative or factorisation step cannot meet its accuracy
/// contract. Carries the best residual reached before giving up.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// A construction that is undefined at an exceptional point was requested
/// on a spectrum whose eigenvectors are (numerically) self-orthogonal.
class ExceptionalPointError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Input lies outside the domain where an operation is defined
/// (e.g. a complex characteristic polynomial along an EP search path).
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace symmwell

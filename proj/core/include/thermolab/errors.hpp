#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace thermolab {

/// Raised when an operation's precondition is violated by its arguments.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical kernel breaks down (singular factor, NaN, no convergence).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// i*beta is (numerically) an eigenvalue of the generator.
class EigenvalueCollision : public NumericalFailure {
 public:
  EigenvalueCollision(double beta, std::complex<double> eigenvalue, const std::string& what)
      : NumericalFailure(what), beta_(beta), eigenvalue_(eigenvalue) {}

  double beta() const { return beta_; }
  std::complex<double> eigenvalue() const { return eigenvalue_; }

 private:
  double beta_;
  std::complex<double> eigenvalue_;
};

}  // namespace thermolab

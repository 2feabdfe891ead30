#pragma once

#include <stdexcept>
#include <string>

namespace bnsswap {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument to an operation (order out of range, invalid asset pair, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of a function, e.g. a CGF evaluated past its pole.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A law with zero variance where a positive one is required.
class DegenerateLawError : public Error {
 public:
  using Error::Error;
};

// Parameter combination for which a formula divides by zero.
class SingularConfigurationError : public Error {
 public:
  using Error::Error;
};

// Invalid model parameters.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed or unreadable input (files, JSON, CSV).
class InputError : public Error {
 public:
  using Error::Error;
};

// Statistics cannot be estimated from the supplied data.
class EstimationError : public Error {
 public:
  using Error::Error;
};

// Numerical procedure failed to reach its tolerance.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double best_value, double achieved_error);
  double best_value() const noexcept { return best_value_; }
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double best_value_;
  double achieved_error_;
};

// Constraint matrix [mu 1] is rank deficient.
class ConstraintDegeneracyError : public Error {
 public:
  using Error::Error;
};

// Target return cannot be reached with unit-norm, fully invested weights.
class InfeasibleTargetError : public Error {
 public:
  InfeasibleTargetError(double k, double k_min, double k_max);
  double k_min() const noexcept { return k_min_; }
  double k_max() const noexcept { return k_max_; }

 private:
  double k_min_;
  double k_max_;
};

}  // namespace bnsswap

#pragma once

#include <stdexcept>
#include <string>

namespace sublex {

/// Base class for every exception thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration or invalid construction arguments.
/// The CLI maps this to exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition was violated by the caller
/// (e.g. a target value outside the admissible mean interval).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: non-convergent quadrature, unresolved grids,
/// heavy tails, integer overflow. The CLI maps this to exit code 3.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature hit its subdivision limit before reaching the
/// requested tolerance. Carries the error estimate that was achieved.
class QuadratureError : public NumericError {
 public:
  QuadratureError(const std::string& msg, double achieved)
      : NumericError(msg), achieved_(achieved) {}
  double achieved_tolerance() const { return achieved_; }

 private:
  double achieved_;
};

/// Two successive grid resolutions disagreed by more than the allowed
/// tolerance; the tabulated computation is under-resolved.
class GridResolutionError : public NumericError {
 public:
  GridResolutionError(const std::string& msg, double delta)
      : NumericError(msg), delta_(delta) {}
  double achieved_delta() const { return delta_; }

 private:
  double delta_;
};

/// A factorial block schedule would exceed the configured maximum path
/// length (or the 64-bit range). Carries the largest feasible block count.
class ScheduleOverflowError : public NumericError {
 public:
  ScheduleOverflowError(const std::string& msg, int max_feasible_blocks)
      : NumericError(msg), max_feasible_(max_feasible_blocks) {}
  int max_feasible_blocks() const { return max_feasible_; }

 private:
  int max_feasible_;
};

}  // namespace sublex

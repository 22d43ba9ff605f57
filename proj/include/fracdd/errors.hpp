#pragma once

#include <stdexcept>
#include <string>

namespace fracdd {

/// Base class of every exception thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Argument sits on a pole (e.g. Gamma at a non-positive integer).
struct PoleError : Error {
  using Error::Error;
};

/// Argument outside the supported region of a series or kernel.
struct DomainError : Error {
  using Error::Error;
};

/// Series or iteration did not reach its tolerance within the budget.
struct NonConvergenceError : Error {
  using Error::Error;
  NonConvergenceError(const std::string& what, double last, double previous)
      : Error(what), last_estimate(last), previous_estimate(previous) {}
  double last_estimate = 0.0;
  double previous_estimate = 0.0;
};

/// A kernel was evaluated exactly at its singular point.
struct SingularError : Error {
  using Error::Error;
};

/// The input cannot be handled by the closed-form rule table.
struct UnsupportedError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& message, std::size_t col)
      : Error(message + " at column " + std::to_string(col)), column(col) {}
  std::size_t column;  // 1-based
};

/// A fixed-point map failed its contraction test.
struct ContractionError : Error {
  ContractionError(const std::string& message, double measured)
      : Error(message), ratio(measured) {}
  double ratio;
};

}  // namespace fracdd

#pragma once

#include <stdexcept>
#include <string>

namespace expnls {

/// Raised for invalid user-supplied parameters (grid sizes, stage counts, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an implicit stage system cannot be solved. Usually means the
/// time step is too large for the fixed-point iteration to contract.
class ConvergenceError : public std::runtime_error {
 public:
  enum class Kind { NoConvergence, Diverged };

  ConvergenceError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// A step failure annotated with the step index at which it happened.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(long step, const std::string& what)
      : std::runtime_error(what), step_(step) {}

  long step() const noexcept { return step_; }

 private:
  long step_;
};

}  // namespace expnls

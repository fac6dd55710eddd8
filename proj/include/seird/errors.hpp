#pragma once

#include <stdexcept>
#include <string>

namespace seird {

// Config file rejected: syntax or invariant failure. `line` is 1-based,
// 0 when the problem is not tied to a single line.
struct ConfigError : std::runtime_error {
  ConfigError(int line_, std::string key_, const std::string& message)
      : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + message
                                     : message),
        line(line_),
        key(std::move(key_)) {}

  int line = 0;
  std::string key;
};

// Linear or Newton solve failed to converge within its iteration budget.
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& message, int iterations_ = 0,
                       double residual_ = 0.0)
      : std::runtime_error(message), iterations(iterations_), residual(residual_) {}

  int iterations = 0;
  double residual = 0.0;
};

// A runtime-checked inequality (sign, ordering, or a-priori bound) failed
// beyond the admitted solver slack.
struct InvariantViolation : std::runtime_error {
  explicit InvariantViolation(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace seird

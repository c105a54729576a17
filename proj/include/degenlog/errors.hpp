#pragma once

#include <stdexcept>
#include <string>

namespace degenlog {

/// Invalid configuration: the message names the violated invariant.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Mutually exclusive theorem predictions fired on one scenario.
class ContradictionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace degenlog

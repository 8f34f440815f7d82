#pragma once

#include <stdexcept>
#include <string>

namespace sgchurn {

// Rejected configuration value. The message names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised by solve_stationary when the transition matrix is not irreducible.
class NonErgodicError : public std::runtime_error {
 public:
  NonErgodicError() : std::runtime_error("non-ergodic chain") {}
};

}  // namespace sgchurn

#pragma once

#include <stdexcept>
#include <string>

namespace asclab {

// Two families: configuration errors (bad input, caught before any numerics)
// and numeric failures (a computation could not deliver its contract).
// The CLI maps the first to exit code 2 and the second to exit code 3.

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite or structurally unusable input (NaN matrix, zero operator).
class InvalidInput : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class DimensionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A scalar parameter outside its admissible range (alpha <= 0, beta too big).
class InvalidParameter : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Required problem data is missing, or an unknown key/value was supplied.
class ConfigurationError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A request outside the admissible parameter range of a method
/// (mu >= kappa, p > 2s + a, ...).
class DomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// The operation is undefined for the supplied mode (e.g. noise-free only).
class UnsupportedMode : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class OutOfRange : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A root/crossing that the caller asked for does not exist in the interval.
class NoSolution : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace asclab

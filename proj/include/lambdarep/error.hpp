#pragma once

#include <stdexcept>
#include <string>

namespace lambdarep {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user configuration (grid text, JSON config, policy files, parameters).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Shapes or indices that do not fit together.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// NaN or otherwise unusable numbers.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Operation not valid in the current episode state.
class StateError : public Error {
 public:
  using Error::Error;
};

/// Input outside the supported class (e.g. stochastic dynamics where a single trajectory is required).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}

  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

}  // namespace lambdarep

#pragma once

#include <stdexcept>
#include <string>

namespace gxe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: spline settings, hyperparameters, chain settings, CLI options.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Shape mismatch between matrices/vectors that must agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unreadable input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A distribution was asked for with parameters outside its support.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Cholesky failure or another numerical breakdown. Carries the offending block
/// and, when raised inside a chain, the sweep index.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::string block, long sweep = -1)
      : Error(what + " [block " + block + (sweep >= 0 ? ", sweep " + std::to_string(sweep) : "") + "]"),
        block_(std::move(block)),
        sweep_(sweep) {}

  const std::string& block() const noexcept { return block_; }
  long sweep() const noexcept { return sweep_; }

 private:
  std::string block_;
  long sweep_;
};

/// Convergence diagnostics could not be computed or the PSRF gate failed.
class DiagnosticError : public Error {
 public:
  using Error::Error;
};

}  // namespace gxe

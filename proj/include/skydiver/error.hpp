#pragma once

#include <stdexcept>
#include <string>

namespace skydiver {

// Root of every error the library raises.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Shape or model inconsistency: layer dims, partitions that do not match a
// layer, schedules for the wrong network.
class ConfigError : public Error {
  public:
    using Error::Error;
};

// Non-finite inputs, non-positive thresholds, zero-cycle throughput.
class NumericError : public Error {
  public:
    using Error::Error;
};

// Malformed or truncated files, bad magic/version, unwritable paths.
class FormatError : public Error {
  public:
    using Error::Error;
};

// Exhaustive search asked to exceed its size budget.
class BudgetError : public ConfigError {
  public:
    using ConfigError::ConfigError;
};

} // namespace skydiver

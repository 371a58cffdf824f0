#pragma once

#include <stdexcept>
#include <string>

namespace mlfd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent input data (malformed files, degenerate classes, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument or configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A computation would exceed a configured resource limit.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace mlfd

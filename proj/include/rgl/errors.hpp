#pragma once

#include <stdexcept>
#include <string>

namespace rgl {

/// Bad input data: malformed files, unreachable queries, inconsistent sets.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class UnreachableError : public DataError {
 public:
  using DataError::DataError;
};

/// Rejected run configuration; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rgl

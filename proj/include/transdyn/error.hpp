#pragma once

#include <stdexcept>
#include <string>

namespace transdyn {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable input or unwritable output.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Bad parameter, unknown format tag, mismatched grid, invalid synth config.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A precondition of a model operation was violated by its input data.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace transdyn

#pragma once

#include <stdexcept>
#include <string>

namespace handpose {

/// Bad parameters handed to an operation (violated precondition).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two images that must share a resolution do not.
class DimensionMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read, written or parsed. The message names the file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace handpose

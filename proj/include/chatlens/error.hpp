#pragma once

#include <stdexcept>
#include <string>

namespace chatlens {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that cannot be interpreted: malformed numbers, bad files, unknown ids.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A quantity that is mathematically undefined for the given input
/// (singleton component, one-node cascade, zero variance, ...).
class UndefinedError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a precondition on parameters (k = 0, C <= 0, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

}  // namespace chatlens

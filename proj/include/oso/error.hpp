#pragma once

#include <stdexcept>
#include <string>

namespace oso {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (vector lengths, matrix dimensions).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite input or a numerical kernel that failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Argument outside its mathematical domain (negative singular value, alpha > 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A direct channel that is identically zero, so MRC is undefined.
class DegenerateChannelError : public Error {
 public:
  using Error::Error;
};

/// Too few samples for the requested statistic.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace oso

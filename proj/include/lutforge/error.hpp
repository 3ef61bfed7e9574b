#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lutforge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates an operation's precondition.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Two buffers that must agree in shape (or a bank that must agree in K) do not.
class DimensionMismatch : public Error {
public:
  using Error::Error;
};

/// An image carries the wrong color-space tag for the requested operation.
class TagMismatch : public Error {
public:
  using Error::Error;
};

/// Failure reading or writing a file.
class IoError : public Error {
public:
  using Error::Error;
};

/// A file's contents could not be parsed. `location()` is a 1-based line
/// number for text formats and a byte offset for binary ones.
class ParseError : public IoError {
public:
  enum class Unit { Line, Byte };

  ParseError(const std::string& what, std::size_t location, Unit unit)
      : IoError(what + (unit == Unit::Line ? " (line " : " (byte offset ") +
                std::to_string(location) + ")"),
        location_(location),
        unit_(unit) {}

  std::size_t location() const noexcept { return location_; }
  Unit unit() const noexcept { return unit_; }

private:
  std::size_t location_;
  Unit unit_;
};

/// Optimization produced a non-finite loss or gradient.
class Divergence : public Error {
public:
  Divergence(const std::string& what, long step)
      : Error(what + " at step " + std::to_string(step)), step_(step) {}

  long step() const noexcept { return step_; }

private:
  long step_;
};

}  // namespace lutforge

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace levitype {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live in different series spaces (variable count or degree cap).
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A computation needs coefficients beyond the reliable truncation depth.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// Invalid hypersurface or almost complex structure (dphi(0)=0, J^2 != -I, ...).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Two routes that must agree by theorem disagreed: an implementation bug.
class TheoremViolation : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace levitype

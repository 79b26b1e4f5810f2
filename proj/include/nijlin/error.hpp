#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nijlin {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands disagree on variables, truncation, dimension or precision.
class MismatchError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed textual or structured input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// The input operator field violates the Nijenhuis condition where the
/// algorithm relies on it.
class NotNijenhuisError : public Error {
 public:
  using Error::Error;
};

}  // namespace nijlin

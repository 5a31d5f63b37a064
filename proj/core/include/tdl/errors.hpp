#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tdl {

// Base of every error raised by the library. The CLI maps NumericalError to
// exit code 3 and everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Evaluation at or too close to a pole / zero of a factor.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// Argument outside the supported evaluation range, or an evaluation policy
// that cannot reach it.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Quadrature or series failed its own convergence check.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Input data (a grid, a series, a cache) does not satisfy what the
// operation needs.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace tdl

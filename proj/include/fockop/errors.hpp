#pragma once

#include <stdexcept>
#include <string>

namespace fockop {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand dimensions disagree or a matrix is not square.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An iterative method did not converge, or a quantity is not finite.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A precondition on the mathematical input is violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A symbolic expansion exceeded its configured term cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// The requested exponent range is outside what the theory covers.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Malformed problem file or report.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace fockop

#pragma once

#include <stdexcept>
#include <string>

namespace specobs {

// Argument outside the mathematical domain of an operation (zero state,
// non-positive width, T <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Dimension mismatch between a state and a system, or a malformed matrix.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure did not converge or produced a value that violates
// its own contract (bracket expansion failure, quadrature error too large).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace specobs

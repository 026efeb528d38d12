#pragma once

#include <stdexcept>
#include <string>

namespace saltus {

// Bad input: argument outside its domain, violated precondition or class
// invariant, unknown catalog name. The CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class HorizontalityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A computation that could not deliver its postcondition: no convergence,
// singular system, divergence, under-resolved jump. Exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace saltus

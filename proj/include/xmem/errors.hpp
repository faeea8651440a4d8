#pragma once

#include <stdexcept>
#include <string>

namespace xmem {

/// Violated precondition on an argument (bad correlation, negative weight, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not deliver a trustworthy answer.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Circulant embedding produced eigenvalues that are genuinely negative.
class NonEmbeddableError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace xmem

#pragma once

#include <stdexcept>
#include <string>

namespace vts {

// Invalid argument to a special function or sampler.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Cholesky factorization failed or a matrix is not symmetric positive definite.
class LinearAlgebraError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension or shape mismatch between configuration pieces.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite intermediate during inference; message carries the arm/component context.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A checked invariant (row normalization, mass conservation) was violated.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A fixed context sequence ran out of vectors.
class SequenceError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Traces of different lengths passed to aggregation.
class AggregationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed CSV input; line is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace vts

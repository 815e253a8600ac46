#pragma once

#include <stdexcept>
#include <string>

namespace fraclap {

/// Invalid input: bad argument, dimension mismatch, unknown index.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (singular pivot, non-finite quadrature,
/// no convergence).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fraclap

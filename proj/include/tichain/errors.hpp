#pragma once

#include <stdexcept>

namespace tichain {

/// Thrown when a requested enumeration or table would exceed its budget.
class CapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Thrown when an iterative numerical procedure leaves its valid domain.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tichain

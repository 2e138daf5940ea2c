#pragma once

#include <stdexcept>
#include <string>

namespace langevin {

/// Thrown when an argument violates an operation's admissibility conditions
/// (step size too large, negative distance, bad index range, ...).
class invalid_parameter : public std::invalid_argument {
 public:
  explicit invalid_parameter(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when a computation produces non-finite values or a matrix
/// factorization fails.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace langevin

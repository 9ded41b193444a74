#pragma once

#include <stdexcept>
#include <string>

namespace evscale {

// Thrown when an argument is outside the mathematical domain of an operation.
// Reuses std::domain_error so callers can catch the standard type.
using domain_error = std::domain_error;

// Thrown when a bracketing root search is handed an interval without a sign
// change.
class bracket_error : public std::domain_error {
public:
  explicit bracket_error(const std::string& what) : std::domain_error(what) {}
};

// Thrown when an iterative numeric procedure fails to converge.
class numeric_error : public std::runtime_error {
public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace evscale

#pragma once

#include <stdexcept>
#include <string>

namespace gl2rep {

// Inputs that violate a structural precondition (shape, modulus mismatch, bad parameter).
struct malformed_input : std::invalid_argument {
  explicit malformed_input(const std::string& what) : std::invalid_argument(what) {}
};

// Value outside the mathematical domain of an operation (e.g. non-unit residue).
struct domain_error : std::domain_error {
  explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

// Working precision p^N too small for the requested level.
struct precision_error : std::runtime_error {
  explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};

// A computed certificate failed re-verification; signals a bug, not bad input.
struct consistency_error : std::logic_error {
  explicit consistency_error(const std::string& what) : std::logic_error(what) {}
};

// Request exceeds the feasibility caps; message carries a cost estimate.
struct cap_exceeded : std::runtime_error {
  explicit cap_exceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gl2rep

#pragma once

#include <stdexcept>
#include <string>

namespace rotor {

/// Raised when caller-supplied parameters violate a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an engine cannot produce a trustworthy result (truncation
/// leakage, impossible outcome, scale guard, ...).
class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rotor

#pragma once

#include <stdexcept>
#include <string>

namespace mtdar {

/// A caller broke a documented precondition (wrong history length, lag too large, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed: singular system, eigen solver or optimizer failure.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The request is well-formed but outside what the theory covers (e.g. nonzero mean direction).
class UnsupportedConfiguration : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace mtdar

#pragma once

#include <stdexcept>
#include <string>

namespace modarith {

/// A caller broke a documented precondition (operand range, bound class, width).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Modulus rejected at context setup: even, too small, or without headroom.
class InvalidModulus : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class WidthError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Unsupported parameter combination (split factor, bound, batch shape, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace modarith

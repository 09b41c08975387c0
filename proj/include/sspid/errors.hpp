#pragma once

#include <stdexcept>
#include <string>

namespace sspid {

/// Unknown variable name.
class NameError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent arguments (overlapping name sets, bad antichains, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Request exceeds a hard size cap (lattice n, materialized support, oracle dimension).
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A precondition on the input object is violated (e.g. a scheme that is not perfect).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Numerical result that contradicts a mathematical identity beyond tolerance.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text/JSON input.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative solver hit its iteration cap; carries the best objective value reached.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_value)
      : std::runtime_error(what), best_value_(best_value) {}
  double best_value() const noexcept { return best_value_; }

 private:
  double best_value_;
};

}  // namespace sspid

#pragma once

#include <stdexcept>
#include <string>

namespace conefp {

/// Caller broke a precondition (dimension mismatch, negative coefficient, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation is not defined for this input (e.g. interior test on a non-solid cone).
class Unsupported : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A hypothesis of the fixed point theorem does not hold. `condition` names it
/// ("i1", "i2", ..., "I").
class HypothesisFailure : public std::runtime_error {
 public:
  HypothesisFailure(std::string condition, const std::string& what)
      : std::runtime_error(condition + ": " + what), condition_(std::move(condition)) {}

  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

/// Iterative numerics did not reach the requested accuracy.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace conefp

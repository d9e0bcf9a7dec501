#pragma once

#include <stdexcept>
#include <string>

namespace gnnlab {

/// Bad input: invalid parameters, malformed configs, precondition failures.
/// The CLI maps these to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A query point outside the closed unit disk.
class OutOfDomain : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A numerical procedure that ran but did not deliver (exit code 3).
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gnnlab

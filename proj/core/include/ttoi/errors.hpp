// SPDX-License-Identifier: MIT

#pragma once

#include <stdexcept>
#include <string>

namespace ttoi {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: bad sizes, out-of-range indices, empty inputs.
struct InvalidInputError : Error {
  using Error::Error;
};

/// Incompatible tensor shapes or ranks.
struct ShapeError : Error {
  using Error::Error;
};

/// A requested dense materialization or solve exceeds the configured budget.
struct CapacityError : Error {
  using Error::Error;
};

/// Pivot selection hit a numerically singular submatrix.
struct DegeneratePivotError : Error {
  using Error::Error;
};

/// Time integration errors.
struct IntegrationError : Error {
  using Error::Error;
};

/// Step size underflow (problem too stiff for the explicit scheme).
struct StiffnessError : IntegrationError {
  using IntegrationError::IntegrationError;
};

/// Step budget exhausted before reaching the end of the interval.
struct StepBudgetError : IntegrationError {
  using IntegrationError::IntegrationError;
};

/// Non-finite values appeared in the solution.
struct DivergenceError : IntegrationError {
  using IntegrationError::IntegrationError;
};

/// File I/O and format errors.
struct IoError : Error {
  using Error::Error;
};

}  // namespace ttoi

#pragma once

#include <stdexcept>
#include <string>

namespace modsel {

// Base class for every error raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration or arguments. The CLI maps this to exit code 2.
struct ValidationError : Error {
  using Error::Error;
};

// Malformed numeric input: empty matrices, non-finite entries.
struct DataError : Error {
  using Error::Error;
};

// A statistic was requested outside its domain (e.g. nonpositive
// residual degrees of freedom).
struct DomainError : Error {
  using Error::Error;
};

// Index outside a catalog or vector range.
struct BoundsError : Error {
  using Error::Error;
};

// Case-control sampling impossible (fewer healthy than diseased).
struct SamplingError : Error {
  using Error::Error;
};

// Intercept calibration could not bracket or reach the target prevalence.
struct CalibrationError : Error {
  using Error::Error;
};

// An enumeration request exceeds the configured budget.
struct BudgetError : Error {
  using Error::Error;
};

// File read or write failure.
struct IoError : Error {
  using Error::Error;
};

}  // namespace modsel

#pragma once

#include <stdexcept>
#include <string>

namespace dlcz {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of a formula (negative time, zero
/// denominator, probability outside [0,1], ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Not enough events to evaluate an estimator (no Stokes singles, zero
/// coincidences, ...).
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Estimator failures in too many Poisson replicas.
class DegenerateStatisticsError : public Error {
 public:
  using Error::Error;
};

/// The decay fit did not converge, or the samples cannot constrain it.
class FitError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration: unknown keys, malformed values, failed invariants.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A data file parsed but does not follow its schema (missing column,
/// non-numeric cell, ...). The message names the offending column.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written, or its contents do not follow the
/// expected schema.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dlcz

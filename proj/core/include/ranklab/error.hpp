#pragma once

#include <stdexcept>
#include <string>

namespace ranklab {

// Base of every error the library raises. The CLI maps DataError and its
// subclasses to exit code 3; anything else is an internal failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

// Argument outside the operation's domain (e.g. a rank beyond the list).
class DomainError : public DataError {
 public:
  using DataError::DataError;
};

// Model parameters that cannot produce a valid click distribution.
class DegenerateModelError : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

class ConfigError : public DataError {
 public:
  using DataError::DataError;
};

// Event log or snapshot inconsistencies (seq gaps, ranking mismatches).
class IntegrityError : public DataError {
 public:
  using DataError::DataError;
};

// A metric whose defining partition is empty. Reported, never zero-filled.
class UndefinedMetricError : public DataError {
 public:
  using DataError::DataError;
};

class ValidationError : public DataError {
 public:
  using DataError::DataError;
};

// Experiment-service protocol violations (steps out of order).
class StateViolationError : public DataError {
 public:
  using DataError::DataError;
};

class NotFoundError : public DataError {
 public:
  using DataError::DataError;
};

class UnavailableError : public Error {
 public:
  using Error::Error;
};

}  // namespace ranklab

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace riskscore {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric argument outside its documented domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Input records that are malformed or mutually inconsistent.
class DataError : public Error {
 public:
  using Error::Error;
};

/// One or more field-level problems, each prefixed with a field path
/// such as `events[2].duration_min`.
class ValidationError : public DataError {
 public:
  explicit ValidationError(std::vector<std::string> problems);

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Configuration file could not be parsed or failed validation.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// The probabilistic model cannot produce a meaningful value for the inputs.
class ModelValidityError : public Error {
 public:
  using Error::Error;
};

/// A quantity never crossed its threshold within the tabulated time span.
class HorizonError : public ModelValidityError {
 public:
  using ModelValidityError::ModelValidityError;
};

}  // namespace riskscore

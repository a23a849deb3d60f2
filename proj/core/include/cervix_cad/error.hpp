#pragma once

#include <stdexcept>
#include <string>

namespace cervix {

/// Base of every recoverable failure raised by the pipeline.
///
/// Precondition violations on pure functions (bad dimensions, malformed
/// transform parameters) throw std::invalid_argument instead; the CLI maps
/// those to the data-error exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent experiment configuration. Exit code 2.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Bad or unreadable input data. Exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

class FileNotFoundError : public DataError {
 public:
  using DataError::DataError;
};

/// Descriptor cache exists but its header or index is unusable.
class CacheInvalidError : public DataError {
 public:
  using DataError::DataError;
};

/// Row order of two artifacts that must describe the same samples disagrees.
class AlignmentError : public DataError {
 public:
  using DataError::DataError;
};

/// Loaded graph does not declare the expected input/output shapes.
class ShapeMismatchError : public DataError {
 public:
  using DataError::DataError;
};

/// Numerical breakdown (singular scatter, non-finite values). Exit code 4.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularScatterError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace cervix

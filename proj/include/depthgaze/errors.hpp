#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace depthgaze {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes of two operands disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A configuration value violates its constraint (gamma ordering, sigma > 0, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A pixel region holds no valid depth.
class DegenerateRegionError : public Error {
 public:
  using Error::Error;
};

/// Eye and gaze coincide, so no direction exists.
class DegenerateGazeError : public Error {
 public:
  using Error::Error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// A metric is undefined for the input, e.g. AUC with a single-class ground truth.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// File exists but its content is not in a supported layout (bad magic, truncated, ...).
class FormatError : public IoError {
 public:
  using IoError::IoError;
};

/// Annotation parse failure; carries the 1-based line number of the offending row.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Two rows describe the same (image, head box) with incompatible fields.
class MergeConflictError : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace depthgaze

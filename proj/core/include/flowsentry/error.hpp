#pragma once

#include <stdexcept>
#include <string>

namespace flowsentry {

/// Failure categories surfaced by the library. The CLI maps each category to
/// a distinct process exit code.
enum class ErrorKind {
  kConfig,      // invalid configuration value or combination
  kIo,          // missing or unreadable file
  kFormat,      // malformed file or matrix layout
  kSchema,      // feature schema disagreement across graphs
  kData,        // invalid data content (non-finite value, cycle, bad label)
  kShape,       // matrix dimension mismatch
  kBounds,      // index out of range
  kNumeric,     // non-finite value produced by a kernel operation
  kTraining,    // training diverged or was misused
  kEvaluation,  // evaluation requested without required inputs
  kMetric,      // metric undefined for the given labels
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error(ErrorKind::kConfig, m) {}
};
struct IoError : Error {
  explicit IoError(const std::string& m) : Error(ErrorKind::kIo, m) {}
};
struct FormatError : Error {
  explicit FormatError(const std::string& m) : Error(ErrorKind::kFormat, m) {}
};
struct SchemaError : Error {
  explicit SchemaError(const std::string& m) : Error(ErrorKind::kSchema, m) {}
};
struct DataError : Error {
  explicit DataError(const std::string& m) : Error(ErrorKind::kData, m) {}
};
struct ShapeError : Error {
  explicit ShapeError(const std::string& m) : Error(ErrorKind::kShape, m) {}
};
struct BoundsError : Error {
  explicit BoundsError(const std::string& m) : Error(ErrorKind::kBounds, m) {}
};
struct NumericError : Error {
  explicit NumericError(const std::string& m) : Error(ErrorKind::kNumeric, m) {}
};
struct TrainingError : Error {
  explicit TrainingError(const std::string& m) : Error(ErrorKind::kTraining, m) {}
};
struct EvaluationError : Error {
  explicit EvaluationError(const std::string& m) : Error(ErrorKind::kEvaluation, m) {}
};
struct MetricError : Error {
  explicit MetricError(const std::string& m) : Error(ErrorKind::kMetric, m) {}
};

}  // namespace flowsentry

#include "flowsentry/error.hpp"

namespace flowsentry {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return "config error";
    case ErrorKind::kIo:
      return "io error";
    case ErrorKind::kFormat:
      return "format error";
    case ErrorKind::kSchema:
      return "schema error";
    case ErrorKind::kData:
      return "data error";
    case ErrorKind::kShape:
      return "shape error";
    case ErrorKind::kBounds:
      return "bounds error";
    case ErrorKind::kNumeric:
      return "numeric error";
    case ErrorKind::kTraining:
      return "training error";
    case ErrorKind::kEvaluation:
      return "evaluation error";
    case ErrorKind::kMetric:
      return "metric error";
  }
  return "error";
}

}  // namespace flowsentry

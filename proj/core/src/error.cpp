#include "torusfio/error.hpp"

namespace torusfio {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Aliasing: return "aliasing";
    case ErrorKind::Boundary: return "boundary";
    case ErrorKind::Accuracy: return "accuracy";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Resource: return "resource";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

namespace {

std::string decorate(ErrorKind kind, const std::string& message, int axis) {
  std::string out = std::string(to_string(kind)) + " error: " + message;
  if (axis >= 0) out += " (axis " + std::to_string(axis) + ")";
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message, int axis)
    : std::runtime_error(decorate(kind, message, axis)), kind_(kind), axis_(axis) {}

}  // namespace torusfio

#pragma once

#include <stdexcept>
#include <string>

namespace torusfio {

enum class ErrorKind {
  Domain,     // argument outside the mathematical domain of the operation
  Dimension,  // grid / cube / array shapes disagree
  Aliasing,   // frequency cube does not fit the grid resolution
  Boundary,   // difference request runs past the tabulated range
  Accuracy,   // a numerical accuracy gate tripped (tail mass, refinement)
  Numeric,    // non-finite value encountered
  Resource,   // problem size exceeds a configured limit
  Config,     // invalid experiment configuration
  Io,         // file could not be read or written
};

const char* to_string(ErrorKind kind);

/// Exception carrying a machine-readable kind and, where it applies, the
/// offending axis (0-based; -1 when not axis specific).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, int axis = -1);

  ErrorKind kind() const noexcept { return kind_; }
  int axis() const noexcept { return axis_; }

 private:
  ErrorKind kind_;
  int axis_;
};

}  // namespace torusfio

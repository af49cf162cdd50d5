#pragma once

#include <stdexcept>
#include <string>

namespace pbnet {

enum class ErrorKind {
  Validation,
  Parse,
  InvalidObservation,
  Connectivity,
  DegenerateDegree,
  DivisionDegeneracy,
  GenerationFailure,
  NonConvergence,
  NumericalFailure,
  UnboundedLikelihood,
  IndistinguishableHypotheses,
  InternalInconsistency,
  Measurement,
  Io,
};

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // CLI exit status: 1 for input problems, 2 for numerical trouble.
  int exitCode() const noexcept {
    switch (kind_) {
      case ErrorKind::NonConvergence:
      case ErrorKind::NumericalFailure:
      case ErrorKind::Measurement:
      case ErrorKind::InternalInconsistency:
        return 2;
      default:
        return 1;
    }
  }

 private:
  ErrorKind kind_;
};

const char* toString(ErrorKind kind) noexcept;

}  // namespace pbnet

#pragma once

#include <stdexcept>
#include <string>

namespace relyamabe {

/// Failure categories. The CLI maps every category except NumericalFailure
/// and InternalConsistency to exit code 2 (invalid input).
enum class ErrorKind {
  InvalidMetric,        // not symmetric / not positive definite
  InvalidFrame,         // structure constants violate antisymmetry or Jacobi
  InvalidParams,        // e.g. Berger parameters outside 1 <= s <= t
  Domain,               // argument outside the operation's domain
  ShapeMismatch,        // fields living on different grids
  ChartConsistency,     // coordinate tangent not spanned by the frame
  HypothesisViolation,  // a theorem hypothesis does not hold for the input
  DegenerateTrial,      // trial function with vanishing L^6 norm
  BracketFailure,       // bisection bracket without a sign change
  NumericalFailure,     // non-finite values during iteration
  InternalConsistency,  // a self-check failed (transcription or logic bug)
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidMetric: return "invalid metric";
    case ErrorKind::InvalidFrame: return "invalid frame";
    case ErrorKind::InvalidParams: return "invalid parameters";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::ShapeMismatch: return "shape mismatch";
    case ErrorKind::ChartConsistency: return "chart consistency";
    case ErrorKind::HypothesisViolation: return "hypothesis violation";
    case ErrorKind::DegenerateTrial: return "degenerate trial";
    case ErrorKind::BracketFailure: return "bracket failure";
    case ErrorKind::NumericalFailure: return "numerical failure";
    case ErrorKind::InternalConsistency: return "internal consistency";
  }
  return "error";
}

}  // namespace relyamabe

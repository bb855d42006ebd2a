#include "simplicone/error.hpp"

namespace simplicone {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularMatrix: return "singular matrix";
    case ErrorCode::NonFinite: return "non-finite entries";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::FactorizationFailure: return "factorization failure";
    case ErrorCode::LinearSolveFailure: return "linear solve failure";
    case ErrorCode::InvalidAlpha: return "invalid contraction factor";
    case ErrorCode::DimensionTooLarge: return "dimension too large";
    case ErrorCode::NoPatternAccepted: return "no sign pattern accepted";
    case ErrorCode::DegenerateSvd: return "degenerate svd";
    case ErrorCode::NoConvergedRecord: return "no converged record";
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::Io: return "i/o error";
  }
  return "unknown error";
}

}  // namespace simplicone

#include "cycle_census/error.hpp"

namespace cycle_census {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kInvalidGeometry: return "InvalidGeometry";
    case ErrorCode::kOrderViolation: return "OrderViolation";
    case ErrorCode::kZeroPolynomial: return "ZeroPolynomial";
    case ErrorCode::kPersistentBoundaryZero: return "PersistentBoundaryZero";
    case ErrorCode::kDegenerateSlice: return "DegenerateSlice";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kDegreeMismatch: return "DegreeMismatch";
    case ErrorCode::kZeroField: return "ZeroField";
    case ErrorCode::kNoContraction: return "NoContraction";
    case ErrorCode::kStepUnderflow: return "StepUnderflow";
    case ErrorCode::kSolverFailure: return "SolverFailure";
    case ErrorCode::kRadiusViolation: return "RadiusViolation";
    case ErrorCode::kDegenerateVariance: return "DegenerateVariance";
    case ErrorCode::kAllSamplesFailed: return "AllSamplesFailed";
    case ErrorCode::kSeparationViolated: return "SeparationViolated";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace cycle_census

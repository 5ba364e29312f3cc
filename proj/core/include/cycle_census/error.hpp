#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cycle_census {

enum class ErrorCode {
  kInvalidArgument,
  kNonConvergence,
  kInvalidGeometry,
  kOrderViolation,
  kZeroPolynomial,
  kPersistentBoundaryZero,
  kDegenerateSlice,
  kEmptyInput,
  kDegreeMismatch,
  kZeroField,
  kNoContraction,
  kStepUnderflow,
  kSolverFailure,
  kRadiusViolation,
  kDegenerateVariance,
  kAllSamplesFailed,
  kSeparationViolated,
  kIo,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cycle_census

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rssd {

enum class ErrorCode {
  kDimensionMismatch,
  kSingularAtFrequency,
  kComputationFailed,
  kImproperSection,
  kInvalidSection,
  kUnstableSection,
  kOutOfBox,
  kDetVanishesOnContour,
  kPhaseJumpTooLarge,
  kIllPosedLoop,
  kUnstableLoop,
  kEmptySubspace,
  kBoundViolation,
  kIllConditioned,
  kDivergentTrace,
  kParseError,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the toolkit; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rssd

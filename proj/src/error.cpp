#include "rssd/error.hpp"

namespace rssd {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kSingularAtFrequency: return "SingularAtFrequency";
    case ErrorCode::kComputationFailed: return "ComputationFailed";
    case ErrorCode::kImproperSection: return "ImproperSection";
    case ErrorCode::kInvalidSection: return "InvalidSection";
    case ErrorCode::kUnstableSection: return "UnstableSection";
    case ErrorCode::kOutOfBox: return "OutOfBox";
    case ErrorCode::kDetVanishesOnContour: return "DetVanishesOnContour";
    case ErrorCode::kPhaseJumpTooLarge: return "PhaseJumpTooLarge";
    case ErrorCode::kIllPosedLoop: return "IllPosedLoop";
    case ErrorCode::kUnstableLoop: return "UnstableLoop";
    case ErrorCode::kEmptySubspace: return "EmptySubspace";
    case ErrorCode::kBoundViolation: return "BoundViolation";
    case ErrorCode::kIllConditioned: return "IllConditioned";
    case ErrorCode::kDivergentTrace: return "DivergentTrace";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace rssd

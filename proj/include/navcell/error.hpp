#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace navcell {

enum class ErrorCode {
  InvalidInput,
  OverlappingObstacles,
  DegenerateObstacle,
  PointInObstacle,
  EmptyFreeSpace,
  StartInObstacle,
  GoalInObstacle,
  SchemaMismatch,
  ShapeMismatch,
  FeatureVersionMismatch,
  NonFiniteActivation,
  NoCorridor,
  NoSolution,
  MalformedCorridor,
  InfeasibleStart,
  InvalidSpec,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::OverlappingObstacles: return "OverlappingObstacles";
    case ErrorCode::DegenerateObstacle: return "DegenerateObstacle";
    case ErrorCode::PointInObstacle: return "PointInObstacle";
    case ErrorCode::EmptyFreeSpace: return "EmptyFreeSpace";
    case ErrorCode::StartInObstacle: return "StartInObstacle";
    case ErrorCode::GoalInObstacle: return "GoalInObstacle";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::FeatureVersionMismatch: return "FeatureVersionMismatch";
    case ErrorCode::NonFiniteActivation: return "NonFiniteActivation";
    case ErrorCode::NoCorridor: return "NoCorridor";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::MalformedCorridor: return "MalformedCorridor";
    case ErrorCode::InfeasibleStart: return "InfeasibleStart";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
  }
  return "Unknown";
}

/// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace navcell

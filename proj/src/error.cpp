#include "treeprof/error.hpp"

namespace treeprof {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BalanceViolation: return "BalanceViolation";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::DegenerateSize: return "DegenerateSize";
    case ErrorCode::HubCollision: return "HubCollision";
    case ErrorCode::RejectionBudgetExceeded: return "RejectionBudgetExceeded";
    case ErrorCode::NotAnExcursion: return "NotAnExcursion";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::InvalidVertex: return "InvalidVertex";
    case ErrorCode::PermutationSizeMismatch: return "PermutationSizeMismatch";
    case ErrorCode::TiedExtremum: return "TiedExtremum";
    case ErrorCode::SizeTooLarge: return "SizeTooLarge";
    case ErrorCode::NonPositivePath: return "NonPositivePath";
    case ErrorCode::LevelNotReached: return "LevelNotReached";
    case ErrorCode::NotCritical: return "NotCritical";
    case ErrorCode::NotAperiodic: return "NotAperiodic";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace treeprof

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace treeprof {

enum class ErrorCode {
  BalanceViolation,
  Empty,
  Overflow,
  DegenerateSize,
  HubCollision,
  RejectionBudgetExceeded,
  NotAnExcursion,
  InvalidRange,
  InvalidVertex,
  PermutationSizeMismatch,
  TiedExtremum,
  SizeTooLarge,
  NonPositivePath,
  LevelNotReached,
  NotCritical,
  NotAperiodic,
  ConfigError,
  ParseError,
};

std::string_view to_string(ErrorCode code);

// Every library failure is reported through this type; `code()` lets callers
// (and the CLI exit-code mapping) branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace treeprof

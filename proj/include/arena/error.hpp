#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace arena {

enum class Errc {
  kParseError,
  kValidationError,
  kUnknownInstance,
  kUnknownClass,
  kUnknownViewpoint,
  kUnknownRoom,
  kUnknownReference,
  kUnreachable,
  kCompileError,
  kUnsolvable,
  kBudgetExceeded,
  kReplayDivergence,
  kSessionTerminated,
  kGenerationExhausted,
  kUnparsableInstruction,
  kKindMismatch,
  kEmptyInput,
  kBadMessage,
  kUnknownSession,
  kSessionLimit,
  kIoError,
};

std::string_view errc_name(Errc code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace arena

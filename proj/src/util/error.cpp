#include "arena/error.hpp"

namespace arena {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kParseError: return "ParseError";
    case Errc::kValidationError: return "ValidationError";
    case Errc::kUnknownInstance: return "UnknownInstance";
    case Errc::kUnknownClass: return "UnknownClass";
    case Errc::kUnknownViewpoint: return "UnknownViewpoint";
    case Errc::kUnknownRoom: return "UnknownRoom";
    case Errc::kUnknownReference: return "UnknownReference";
    case Errc::kUnreachable: return "Unreachable";
    case Errc::kCompileError: return "CompileError";
    case Errc::kUnsolvable: return "Unsolvable";
    case Errc::kBudgetExceeded: return "BudgetExceeded";
    case Errc::kReplayDivergence: return "ReplayDivergence";
    case Errc::kSessionTerminated: return "SessionTerminated";
    case Errc::kGenerationExhausted: return "GenerationExhausted";
    case Errc::kUnparsableInstruction: return "UnparsableInstruction";
    case Errc::kKindMismatch: return "KindMismatch";
    case Errc::kEmptyInput: return "EmptyInput";
    case Errc::kBadMessage: return "BadMessage";
    case Errc::kUnknownSession: return "UnknownSession";
    case Errc::kSessionLimit: return "SessionLimit";
    case Errc::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace arena

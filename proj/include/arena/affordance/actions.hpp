#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace arena::affordance {

enum class Verb : uint8_t {
  kExamine,
  kPickup,
  kPlace,
  kOpen,
  kClose,
  kBreak,
  kPour,
  kToggle,
  kFill,
  kScan,
  kClean,
};

inline constexpr std::array<Verb, 11> kAllVerbs = {
    Verb::kExamine, Verb::kPickup, Verb::kPlace,  Verb::kOpen, Verb::kClose, Verb::kBreak,
    Verb::kPour,    Verb::kToggle, Verb::kFill,   Verb::kScan, Verb::kClean,
};

std::string_view verb_name(Verb v);
std::optional<Verb> parse_verb(std::string_view name);
// Place and Pour name a destination; every other verb must not.
inline bool verb_takes_secondary(Verb v) { return v == Verb::kPlace || v == Verb::kPour; }

struct InteractionAction {
  Verb verb = Verb::kExamine;
  std::string target;
  std::optional<std::string> secondary;

  bool well_formed() const { return verb_takes_secondary(verb) == secondary.has_value(); }
  auto operator<=>(const InteractionAction&) const = default;
};

enum class ResultCode : uint8_t {
  kAffordanceMissing,
  kPreconditionFailed,
  kOutOfRange,
  kUnknownInstance,
  kHandsFull,
  kHandsEmpty,
  kUnsupported,
  kUnknownViewpoint,
  kUnknownRoom,
  kUnreachable,
};

std::string_view result_code_name(ResultCode c);
std::optional<ResultCode> parse_result_code(std::string_view name);

// One observable change; values are rendered as strings ("true", "water",
// "none", "in:fridge_1").
struct StateChange {
  std::string instance_id;
  std::string field;
  std::string old_value;
  std::string new_value;

  bool operator==(const StateChange&) const = default;
};

struct ActionResult {
  bool success = false;
  std::optional<ResultCode> error_code;
  std::string message;
  std::vector<StateChange> state_delta;
  // Text read by Examine on a sticky note.
  std::optional<std::string> text;

  static ActionResult ok(std::string message = "ok") {
    ActionResult r;
    r.success = true;
    r.message = std::move(message);
    return r;
  }
  static ActionResult fail(ResultCode code, std::string message) {
    ActionResult r;
    r.error_code = code;
    r.message = std::move(message);
    return r;
  }

  bool operator==(const ActionResult&) const = default;
};

}  // namespace arena::affordance

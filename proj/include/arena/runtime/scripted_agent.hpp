#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arena/action.hpp"
#include "arena/cdf/cdf.hpp"
#include "arena/qa/qa.hpp"
#include "arena/runtime/session.hpp"

namespace arena::runtime {

// A noun phrase from an instruction: a class, or an instance id typed out,
// optionally narrowed to a room.
struct Reference {
  std::string class_id;
  std::string instance_id;
  std::string room;
  bool operator==(const Reference&) const = default;
};

enum class Intent {
  kPickup, kPut, kHeat, kChill, kBreak, kClean, kFill, kEmpty,
  kSwitchOn, kSwitchOff, kOpen, kClose, kScan, kPaint, kGoto,
};

struct Clause {
  Intent intent = Intent::kPickup;
  Reference object;                // or a room for kGoto with empty class
  std::optional<Reference> target;  // put destination
  std::string room;                // goto / put room destination
  std::string argument;            // liquid or colour
  bool operator==(const Clause&) const = default;
};

// Grammar: clause (("and" | "then") clause)*, each clause a verb phrase
// followed by a noun phrase and, per verb, a destination, liquid or colour.
// Throws UnparsableInstruction.
std::vector<Clause> parse_instruction(std::string_view text, const qa::Vocabulary& vocab,
                                      const scene::WorldState& world);

struct AgentReply {
  std::string text;
  std::optional<qa::Question> clarification;
  std::vector<Action> actions;
  bool done = false;  // instruction goals hold afterwards
};

// The session's current world as a mission with `goals`.
cdf::CDF snapshot(const Session& s, std::vector<cdf::GoalCondition> goals);

// Deterministic stand-in for a learned agent: parse, resolve against ground
// truth, plan, execute. Ambiguous references come back as a "which o"
// question; the next reply may name the instance or its room.
class ScriptedAgent {
 public:
  explicit ScriptedAgent(const Resources& res);
  ScriptedAgent(const Resources& res, qa::Vocabulary vocab);

  // Records the instruction and the reply as utterances on `s`. Throws
  // UnparsableInstruction (after recording the instruction) or
  // SessionTerminated.
  AgentReply respond(Session& s, std::string_view text);
  bool awaiting_reference() const { return pending_.has_value(); }
  const qa::Vocabulary& vocabulary() const { return vocab_; }

 private:
  AgentReply run(Session& s, std::vector<Clause> clauses);

  const Resources& res_;
  qa::Vocabulary vocab_;
  std::optional<std::vector<Clause>> pending_;
};

}  // namespace arena::runtime

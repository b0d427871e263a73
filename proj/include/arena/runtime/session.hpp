#pragma once

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "arena/action.hpp"
#include "arena/cdf/cdf.hpp"
#include "arena/resources.hpp"
#include "arena/util/json.hpp"

namespace arena::runtime {

struct SessionConfig {
  int max_steps = 50;
  int max_failed = 10;
  int score0 = 1000;
  int score_decrement = 1;

  bool operator==(const SessionConfig&) const = default;
};

util::Json config_to_json(const SessionConfig& c);
SessionConfig config_from_json(const util::Json& v, const std::string& where = "config");

enum class Phase { kRunning, kSucceeded, kFailed, kAborted };
std::string_view phase_name(Phase p);

struct Utterance {
  std::string speaker = "user";  // "user" or "agent"
  std::string text;
};
struct ExamineStickyNote {
  std::string note_id;
};
struct RequestHighlight {
  std::string instance_id;
};
using UserEvent = std::variant<Utterance, ExamineStickyNote, RequestHighlight>;

struct TranscriptEntry {
  std::string kind;  // utterance, action, highlight, abort
  std::string speaker;
  std::string text;  // utterance text, action label or highlighted id
  int tick = 0;
};

// Outcome of one call into the session. `frame` is set when an action
// executed; `highlight` / `note_text` carry the side events.
struct StepOutcome {
  std::optional<util::Json> frame;
  affordance::ActionResult result;
  std::optional<std::string> highlight;
  std::optional<std::string> note_text;
};

// Single-threaded state machine for one mission run. Every record it makes
// also lands in an in-memory log (see episode_log.hpp).
class Session {
 public:
  Session(cdf::CDF cdf, const Resources& res, SessionConfig config = {});

  // Throws SessionTerminated when not running.
  StepOutcome step(const Action& action);
  StepOutcome user_event(const UserEvent& event);
  void abort();

  Phase phase() const { return phase_; }
  bool running() const { return phase_ == Phase::kRunning; }
  int steps_used() const { return steps_used_; }
  int failed_steps() const { return failed_steps_; }
  int score() const { return score_; }
  const cdf::GoalStatus& goal_status() const { return status_; }
  const scene::WorldState& world() const { return world_; }
  const cdf::CDF& cdf() const { return cdf_; }
  const SessionConfig& config() const { return config_; }
  const Resources& resources() const { return res_; }
  const std::vector<util::Json>& frames() const { return frames_; }
  const util::Json& latest_frame() const { return frames_.back(); }
  const std::vector<TranscriptEntry>& transcript() const { return transcript_; }
  const std::set<std::string>& notes_read() const { return notes_read_; }

  // Log records in order: header, frames, actions, utterances, end.
  const std::vector<util::Json>& records() const { return records_; }
  // JSONL text of records() plus an end record when terminal.
  std::string log_text() const;

 private:
  util::Json make_frame(const std::optional<Action>& action,
                        const std::optional<affordance::ActionResult>& result) const;
  void require_running() const;
  void finish_if_terminal();
  StepOutcome execute(const Action& action);

  cdf::CDF cdf_;
  const Resources& res_;
  SessionConfig config_;
  scene::WorldState world_;
  int steps_used_ = 0;
  int failed_steps_ = 0;
  int score_ = 0;
  cdf::GoalStatus status_;
  Phase phase_ = Phase::kRunning;
  std::set<std::string> notes_read_;
  std::vector<std::string> highlights_;
  std::vector<util::Json> frames_;
  std::vector<TranscriptEntry> transcript_;
  std::vector<util::Json> records_;
};

util::Json result_to_json(const affordance::ActionResult& r);

// Static 2D scene description plus the dynamic state: rooms, walls, object
// cells and badges, agent pose, sticky-note read flags, highlights.
util::Json render_payload(const scene::WorldState& world, const std::set<std::string>& notes_read,
                          const std::vector<std::string>& highlights);

}  // namespace arena::runtime

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arena/resources.hpp"
#include "arena/runtime/session.hpp"
#include "arena/util/json.hpp"

namespace arena::runtime {

// One JSONL episode: a header carrying the CDF and config, then frame,
// action, utterance, highlight and abort records, then an optional end record.
struct EpisodeLog {
  util::Json header;
  std::vector<util::Json> records;  // between header and end
  std::optional<util::Json> end;

  std::string cdf_id() const;
  std::string task_type() const;
  // Final success and step count, from the end record or the last frame.
  int m() const;
  int steps_used() const;
  size_t frame_count() const;
};

// Throws ParseError (with line number) or ValidationError.
EpisodeLog parse_log(std::string_view text);

// Feeds the recorded inputs to a fresh session and compares every frame and
// the end record. Throws ReplayDivergence at the first difference.
Session replay(const EpisodeLog& log, const Resources& res);

}  // namespace arena::runtime

#include "arena/runtime/episode_log.hpp"

#include "arena/error.hpp"

namespace arena::runtime {

using util::Json;

std::string EpisodeLog::cdf_id() const { return header.value("cdf_id", ""); }
std::string EpisodeLog::task_type() const { return header.value("task_type", ""); }

namespace {

const Json* last_frame(const EpisodeLog& log) {
  for (auto it = log.records.rbegin(); it != log.records.rend(); ++it) {
    if ((*it)["record"] == "frame") return &(*it)["frame"];
  }
  return nullptr;
}

}  // namespace

int EpisodeLog::m() const {
  if (end) return (*end).value("m", 0);
  const Json* f = last_frame(*this);
  return f ? (*f)["goal_status"].value("m", 0) : 0;
}

int EpisodeLog::steps_used() const {
  if (end) return (*end).value("steps_used", 0);
  const Json* f = last_frame(*this);
  return f ? f->value("steps_used", 0) : 0;
}

size_t EpisodeLog::frame_count() const {
  size_t n = 0;
  for (const auto& r : records) n += r["record"] == "frame" ? 1 : 0;
  return n;
}

EpisodeLog parse_log(std::string_view text) {
  EpisodeLog log;
  size_t pos = 0;
  int line = 0;
  bool have_header = false;
  while (pos < text.size()) {
    const size_t nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line;
    if (raw.empty()) continue;
    const std::string where = "log line " + std::to_string(line);
    Json rec = util::parse_json(raw, where);
    if (!rec.is_object() || !rec.contains("record") || !rec["record"].is_string()) {
      throw Error(Errc::kValidationError, where + ": expected an object with a \"record\" string");
    }
    const std::string kind = rec["record"];
    if (log.end) throw Error(Errc::kValidationError, where + ": record after the end record");
    if (!have_header) {
      if (kind != "header") throw Error(Errc::kValidationError, where + ": first record must be the header");
      if (!rec.contains("cdf") || !rec.contains("config")) {
        throw Error(Errc::kValidationError, where + ": header lacks cdf or config");
      }
      log.header = std::move(rec);
      have_header = true;
      continue;
    }
    if (kind == "end") {
      log.end = std::move(rec);
    } else if (kind == "frame" || kind == "action" || kind == "utterance" || kind == "highlight" ||
               kind == "abort") {
      log.records.push_back(std::move(rec));
    } else {
      throw Error(Errc::kValidationError, where + ": unknown record kind '" + kind + "'");
    }
  }
  if (!have_header) throw Error(Errc::kValidationError, "log is empty");
  return log;
}

Session replay(const EpisodeLog& log, const Resources& res) {
  cdf::CDF c = cdf::parse_cdf_json(log.header["cdf"], res);
  Session s(std::move(c), res, config_from_json(log.header["config"], "header.config"));
  auto diverge = [](size_t i, const std::string& msg) {
    throw Error(Errc::kReplayDivergence, "record " + std::to_string(i + 1) + ": " + msg);
  };
  if (s.records().front() != log.header) diverge(0, "header differs from a fresh session");
  size_t produced = 1;  // records of s already matched, header included
  for (size_t i = 0; i < log.records.size(); ++i) {
    const Json& rec = log.records[i];
    const std::string kind = rec["record"];
    try {
      if (kind == "action") {
        if (!rec.contains("action")) diverge(i, "action record without action");
        s.step(action_from_json(rec["action"], "action"));
      } else if (kind == "utterance") {
        s.user_event(Utterance{rec.value("speaker", "user"), rec.value("text", "")});
      } else if (kind == "highlight") {
        s.user_event(RequestHighlight{rec.value("instance_id", "")});
      } else if (kind == "abort") {
        s.abort();
      }
    } catch (const Error& e) {
      if (e.code() == Errc::kReplayDivergence) throw;
      diverge(i, std::string("input rejected: ") + e.what());
    }
    // Each input regenerates its own record (and a frame for actions); the
    // initial frame pairs with the first recorded frame.
    if (produced >= s.records().size()) diverge(i, "log has a record the session did not produce");
    if (s.records()[produced] != rec) {
      diverge(i, kind == "frame" ? "frame " + std::to_string(rec["frame"].value("frame_index", -1)) + " differs"
                                 : kind + " record differs");
    }
    ++produced;
  }
  if (produced != s.records().size()) diverge(log.records.size(), "log ends before the session's last record");
  if (log.end) {
    const std::string text = s.log_text();
    const size_t last = text.rfind('\n', text.size() - 2);
    const Json end = Json::parse(text.substr(last + 1));
    if (end["record"] != "end" || end != *log.end) diverge(log.records.size(), "end record differs");
  }
  return s;
}

}  // namespace arena::runtime

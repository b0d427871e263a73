#include "arena/runtime/session.hpp"

#include "arena/error.hpp"
#include "arena/nav/nav.hpp"

namespace arena::runtime {

using util::Json;

util::Json config_to_json(const SessionConfig& c) {
  return {{"max_steps", c.max_steps},
          {"max_failed", c.max_failed},
          {"score0", c.score0},
          {"score_decrement", c.score_decrement}};
}

SessionConfig config_from_json(const Json& v, const std::string& where) {
  util::FieldReader r(v, where);
  SessionConfig c;
  auto read = [&](const char* key, int& out, int min) {
    if (auto x = r.optional_int(key)) {
      if (*x < min || *x > 1'000'000) {
        throw Error(Errc::kValidationError, r.path(key) + ": out of range");
      }
      out = static_cast<int>(*x);
    }
  };
  read("max_steps", c.max_steps, 1);
  read("max_failed", c.max_failed, 1);
  read("score0", c.score0, 0);
  read("score_decrement", c.score_decrement, 0);
  r.reject_unknown();
  return c;
}

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::kRunning: return "running";
    case Phase::kSucceeded: return "succeeded";
    case Phase::kFailed: return "failed";
    case Phase::kAborted: return "aborted";
  }
  return "running";
}

Json result_to_json(const affordance::ActionResult& r) {
  Json delta = Json::array();
  for (const auto& d : r.state_delta) {
    delta.push_back({{"instance_id", d.instance_id}, {"field", d.field}, {"old", d.old_value}, {"new", d.new_value}});
  }
  Json out = {{"success", r.success},
              {"error_code", r.error_code ? Json(std::string(affordance::result_code_name(*r.error_code))) : Json()},
              {"message", r.message},
              {"state_delta", delta}};
  if (r.text) out["text"] = *r.text;
  return out;
}

Json render_payload(const scene::WorldState& w, const std::set<std::string>& notes_read,
                    const std::vector<std::string>& highlights) {
  Json rooms = Json::array();
  for (const auto& r : w.layout->rooms) {
    rooms.push_back({{"name", r.name}, {"rect", {r.rect.x, r.rect.y, r.rect.w, r.rect.h}}});
  }
  Json objects = Json::array();
  Json notes = Json::array();
  for (const auto& [id, obj] : w.objects) {
    const scene::Cell c = w.position(id);
    if (obj.class_id == "sticky_note") {
      notes.push_back({{"id", id}, {"cell", util::cell_json(c)}, {"read", notes_read.contains(id)}});
      continue;
    }
    Json o = {{"id", id},
              {"class", obj.class_id},
              {"cell", util::cell_json(c)},
              {"location", scene::location_to_json(obj.location)},
              {"badges", scene::state_badges(obj)},
              {"visible", !w.enclosed(id)}};
    objects.push_back(std::move(o));
  }
  Json obstacles = Json::array();
  for (scene::Cell c : w.obstacles) obstacles.push_back(util::cell_json(c));
  Json viewpoints = Json::array();
  for (const auto& v : w.layout->viewpoints) {
    viewpoints.push_back({{"name", v.name}, {"cell", util::cell_json(v.cell)}, {"room", v.room}});
  }
  Json power = Json::object();
  for (const auto& r : w.layout->rooms) power[r.name] = w.room_powered(r.name);
  return {{"width", w.layout->width},
          {"height", w.layout->height},
          {"grid", w.layout->grid},
          {"rooms", rooms},
          {"room_power", power},
          {"viewpoints", viewpoints},
          {"obstacles", obstacles},
          {"objects", objects},
          {"sticky_notes", notes},
          {"agent", {{"cell", util::cell_json(w.agent.cell)}, {"heading", scene::heading_name(w.agent.heading)}}},
          {"highlights", highlights}};
}

Session::Session(cdf::CDF cdf, const Resources& res, SessionConfig config)
    : cdf_(std::move(cdf)), res_(res), config_(config) {
  cdf::validate_cdf(cdf_, res_);
  world_ = cdf::build_world(cdf_, res_);
  score_ = config_.score0;
  status_ = cdf::goal_status(world_, cdf_.goals);
  records_.push_back({{"record", "header"},
                      {"log_version", 1},
                      {"cdf_id", cdf_.cdf_id},
                      {"seed", cdf_.seed},
                      {"task_type", cdf_.task_type},
                      {"config", config_to_json(config_)},
                      {"cdf", cdf::cdf_to_json(cdf_)}});
  if (status_.mission) phase_ = Phase::kSucceeded;
  frames_.push_back(make_frame(std::nullopt, std::nullopt));
  records_.push_back({{"record", "frame"}, {"frame", frames_.back()}});
}

Json Session::make_frame(const std::optional<Action>& action,
                         const std::optional<affordance::ActionResult>& result) const {
  Json obs = Json::array();
  for (const auto& o : scene::symbolic_observation(world_, world_.agent.heading)) {
    obs.push_back({{"instance_id", o.instance_id},
                   {"class_id", o.class_id},
                   {"bearing_deg", o.bearing_deg},
                   {"distance", o.distance},
                   {"state", o.visible_state_flags}});
  }
  Json subgoals = Json::array();
  for (size_t i = 0; i < status_.subgoals.size(); ++i) {
    subgoals.push_back({{"description", cdf_.text.subgoal_descriptions[i]}, {"done", bool(status_.subgoals[i])}});
  }
  return {{"frame_index", frames_.size()},
          {"tick", world_.tick},
          {"agent",
           {{"cell", util::cell_json(world_.agent.cell)},
            {"heading", scene::heading_name(world_.agent.heading)},
            {"held", world_.agent.held ? Json(*world_.agent.held) : Json()},
            {"room", world_.agent_room()}}},
          {"observation", obs},
          {"goal_status", {{"mission", cdf_.text.mission_description}, {"subgoals", subgoals}, {"m", status_.m()}}},
          {"last_action", action ? action_to_json(*action) : Json()},
          {"last_action_result", result ? result_to_json(*result) : Json()},
          {"score", score_},
          {"steps_used", steps_used_},
          {"failed_steps", failed_steps_},
          {"max_steps", config_.max_steps},
          {"max_failed", config_.max_failed},
          {"phase", phase_name(phase_)},
          {"render", render_payload(world_, notes_read_, highlights_)}};
}

void Session::require_running() const {
  if (phase_ != Phase::kRunning) {
    throw Error(Errc::kSessionTerminated, "session is " + std::string(phase_name(phase_)));
  }
}

StepOutcome Session::step(const Action& action) {
  require_running();
  return execute(action);
}

StepOutcome Session::execute(const Action& action) {
  StepOutcome out;
  records_.push_back({{"record", "action"}, {"action", action_to_json(action)}});
  if (const auto* nav = std::get_if<nav::NavAction>(&action)) {
    auto r = nav::execute_nav(world_, *nav);
    world_ = std::move(r.world);
    out.result = std::move(r.result);
  } else {
    const auto& ia = std::get<affordance::InteractionAction>(action);
    out.result = res_.engine->apply_in_place(world_, ia);
    if (out.result.success && ia.verb == affordance::Verb::kExamine) {
      notes_read_.insert(ia.target);
      out.note_text = out.result.text;
    }
  }
  transcript_.push_back({"action", "agent", action_label(action), static_cast<int>(world_.tick)});
  ++steps_used_;
  if (!out.result.success) ++failed_steps_;
  score_ = std::max(0, score_ - config_.score_decrement);
  status_ = cdf::goal_status(world_, cdf_.goals);
  finish_if_terminal();
  frames_.push_back(make_frame(action, out.result));
  highlights_.clear();
  records_.push_back({{"record", "frame"}, {"frame", frames_.back()}});
  out.frame = frames_.back();
  return out;
}

void Session::finish_if_terminal() {
  if (status_.mission) {
    phase_ = Phase::kSucceeded;
  } else if (failed_steps_ >= config_.max_failed || steps_used_ >= config_.max_steps) {
    phase_ = Phase::kFailed;
  }
}

StepOutcome Session::user_event(const UserEvent& event) {
  require_running();
  if (const auto* u = std::get_if<Utterance>(&event)) {
    if (u->speaker != "user" && u->speaker != "agent") {
      throw Error(Errc::kValidationError, "utterance speaker must be user or agent");
    }
    transcript_.push_back({"utterance", u->speaker, u->text, static_cast<int>(world_.tick)});
    records_.push_back({{"record", "utterance"}, {"speaker", u->speaker}, {"text", u->text}});
    StepOutcome out;
    out.result = affordance::ActionResult::ok("recorded");
    return out;
  }
  if (const auto* e = std::get_if<ExamineStickyNote>(&event)) {
    const scene::ObjectInstance& note = world_.at(e->note_id);
    if (!note.note_text) throw Error(Errc::kUnknownInstance, "'" + e->note_id + "' is not a sticky note");
    return execute(affordance::InteractionAction{affordance::Verb::kExamine, e->note_id, std::nullopt});
  }
  const auto& h = std::get<RequestHighlight>(event);
  world_.at(h.instance_id);
  highlights_.push_back(h.instance_id);
  transcript_.push_back({"highlight", "user", h.instance_id, static_cast<int>(world_.tick)});
  records_.push_back({{"record", "highlight"}, {"instance_id", h.instance_id}});
  StepOutcome out;
  out.result = affordance::ActionResult::ok("highlighted");
  out.highlight = h.instance_id;
  return out;
}

void Session::abort() {
  require_running();
  phase_ = Phase::kAborted;
  transcript_.push_back({"abort", "user", "", static_cast<int>(world_.tick)});
  records_.push_back({{"record", "abort"}});
}

std::string Session::log_text() const {
  std::string out;
  for (const auto& r : records_) out += r.dump() + "\n";
  if (phase_ != Phase::kRunning) {
    out += Json({{"record", "end"},
                 {"phase", phase_name(phase_)},
                 {"m", status_.m()},
                 {"steps_used", steps_used_},
                 {"failed_steps", failed_steps_},
                 {"score", score_}})
               .dump() +
           "\n";
  }
  return out;
}

}  // namespace arena::runtime

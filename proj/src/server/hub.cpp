#include "arena/server/hub.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>

#include "arena/error.hpp"
#include "arena/runtime/scripted_agent.hpp"
#include "arena/util/files.hpp"

namespace arena::server {

using util::Json;

namespace {

std::string dump(const Json& j) { return j.dump(-1, ' ', false, Json::error_handler_t::replace); }

Json envelope(const std::optional<std::string>& sid, int64_t seq, std::optional<int64_t> ack,
              std::string_view type, Json payload) {
  return {{"protocol_version", kProtocolVersion},
          {"session_id", sid ? Json(*sid) : Json()},
          {"seq", seq},
          {"ack", ack ? Json(*ack) : Json()},
          {"type", type},
          {"payload", std::move(payload)}};
}

// Payload shape problems are the client's fault: report them as BadMessage.
template <typename F>
auto shape(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == Errc::kBadMessage) throw;
    throw Error(Errc::kBadMessage, e.detail());
  }
}

std::string utc_stamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

Json terminated_payload(const runtime::Session& s, const Json& log) {
  return {{"phase", runtime::phase_name(s.phase())},
          {"m", s.goal_status().m()},
          {"steps_used", s.steps_used()},
          {"failed_steps", s.failed_steps()},
          {"score", s.score()},
          {"log", log}};
}

Json score_payload(const runtime::Session& s) {
  return {{"score", s.score()},
          {"steps_used", s.steps_used()},
          {"failed_steps", s.failed_steps()},
          {"max_steps", s.config().max_steps},
          {"max_failed", s.config().max_failed}};
}

}  // namespace

struct Hub::Entry {
  std::mutex mu;
  std::string id;
  std::unique_ptr<runtime::Session> session;
  std::unique_ptr<runtime::ScriptedAgent> agent;
  std::vector<std::weak_ptr<Peer>> subscribers;
  int64_t out_seq = 0;
  bool finished = false;
  Json log;  // path once written

  void subscribe(const std::shared_ptr<Peer>& p) {
    for (const auto& w : subscribers) {
      if (w.lock() == p) return;
    }
    subscribers.push_back(p);
  }

  void broadcast(std::optional<int64_t> ack, std::string_view type, Json payload) {
    const std::string text = dump(envelope(id, ++out_seq, ack, type, std::move(payload)));
    std::erase_if(subscribers, [](const std::weak_ptr<Peer>& w) { return w.expired(); });
    for (const auto& w : subscribers) {
      if (auto p = w.lock()) p->deliver(text);
    }
  }

  void unicast(const std::shared_ptr<Peer>& p, std::optional<int64_t> ack, std::string_view type, Json payload) {
    p->deliver(dump(envelope(id, ++out_seq, ack, type, std::move(payload))));
  }

  void frames_since(size_t first, int64_t ack) {
    const auto& frames = session->frames();
    for (size_t i = first; i < frames.size(); ++i) broadcast(ack, "frame", {{"frame", frames[i]}});
  }

  void status(int64_t ack) {
    broadcast(ack, "goal_status", session->latest_frame()["goal_status"]);
    broadcast(ack, "score", score_payload(*session));
  }
};

Hub::Hub(const Resources& res, HubOptions options)
    : res_(res), options_(std::move(options)), vocab_(qa::Vocabulary::load(res)) {}

Hub::~Hub() = default;

std::vector<std::filesystem::path> Hub::written_logs() const {
  std::lock_guard lock(mu_);
  return logs_;
}

void Hub::disconnect(const Peer* peer) {
  std::lock_guard lock(mu_);
  peers_.erase(peer);
}

void Hub::send_error(const std::shared_ptr<Peer>& peer, const std::optional<std::string>& session_id,
                     std::optional<int64_t> ack, std::optional<std::string> in_reply_to, std::string_view code,
                     const std::string& message) {
  int64_t seq;
  {
    std::lock_guard lock(mu_);
    seq = ++peers_[peer.get()].out_seq;
  }
  Json payload = {{"code", code}, {"message", message}, {"in_reply_to", in_reply_to ? Json(*in_reply_to) : Json()}};
  peer->deliver(dump(envelope(session_id, seq, ack, "error", std::move(payload))));
}

void Hub::handle(const std::shared_ptr<Peer>& peer, std::string_view text) {
  std::optional<int64_t> ack;
  std::optional<std::string> type;
  std::optional<std::string> sid;
  try {
    if (text.size() > options_.max_message_bytes) throw Error(Errc::kBadMessage, "message too large");
    Json env = Json::parse(text, nullptr, false);
    if (env.is_discarded()) throw Error(Errc::kBadMessage, "not valid UTF-8 JSON");
    if (!env.is_object()) throw Error(Errc::kBadMessage, "message must be a JSON object");
    if (auto it = env.find("seq"); it != env.end() && it->is_number_integer() && *it >= 0) {
      ack = it->get<int64_t>();
    }
    if (auto it = env.find("type"); it != env.end() && it->is_string()) type = it->get<std::string>();
    if (auto it = env.find("session_id"); it != env.end() && it->is_string()) sid = it->get<std::string>();
    dispatch(peer, env);
  } catch (const Error& e) {
    send_error(peer, sid, ack, type, errc_name(e.code()), e.detail());
  } catch (const std::exception& e) {
    send_error(peer, sid, ack, type, errc_name(Errc::kBadMessage), e.what());
  }
}

void Hub::dispatch(const std::shared_ptr<Peer>& peer, const Json& env) {
  std::optional<std::string> sid;
  int64_t seq = 0;
  std::string type;
  Json payload = Json::object();
  shape([&] {
    util::FieldReader r(env, "message");
    const Json& pv = r.required("protocol_version");
    if (!pv.is_number_integer() || pv.get<int64_t>() != kProtocolVersion) {
      throw Error(Errc::kBadMessage, "protocol_version must be " + std::to_string(kProtocolVersion));
    }
    type = r.required_string("type");
    const Json& s = r.required("seq");
    if (!s.is_number_integer() || s < 0) throw Error(Errc::kBadMessage, "seq must be a non-negative integer");
    seq = s.get<int64_t>();
    sid = r.optional_string("session_id");
    if (const Json* p = r.find("payload")) {
      if (!p->is_object()) throw Error(Errc::kBadMessage, "payload must be an object");
      payload = *p;
    }
    r.reject_unknown();
    return 0;
  });

  static const std::set<std::string, std::less<>> kSessionTypes = {
      "action", "utterance", "examine_note", "request_highlight", "abort", "observe"};
  if (type != "start_mission" && !kSessionTypes.contains(type)) {
    throw Error(Errc::kBadMessage, "unknown message type '" + type + "'");
  }
  if (type == "start_mission" && sid) throw Error(Errc::kBadMessage, "start_mission takes no session_id");
  if (type != "start_mission" && !sid) throw Error(Errc::kBadMessage, type + " needs a session_id");

  std::shared_ptr<Entry> entry;
  {
    std::lock_guard lock(mu_);
    if (sid) {
      auto it = sessions_.find(*sid);
      if (it == sessions_.end()) throw Error(Errc::kUnknownSession, "no session '" + *sid + "'");
      entry = it->second;
    }
    auto& last = peers_[peer.get()].last_seq;
    auto [it, fresh] = last.try_emplace(sid.value_or(""), seq);
    if (!fresh) {
      if (seq <= it->second) throw Error(Errc::kBadMessage, "seq must increase");
      it->second = seq;
    }
  }
  if (!entry) {
    start_mission(peer, seq, payload);
    return;
  }
  std::lock_guard lock(entry->mu);
  try {
    on_session(peer, *entry, seq, type, payload);
  } catch (const Error& e) {
    entry->unicast(peer, seq, "error", {{"code", errc_name(e.code())}, {"message", e.detail()}, {"in_reply_to", type}});
  }
  if (!entry->session->running()) finish(*entry, seq);
}

void Hub::start_mission(const std::shared_ptr<Peer>& peer, int64_t seq, const Json& payload) {
  Json doc;
  shape([&] {
    util::FieldReader r(payload, "payload");
    const Json* cdf = r.find("cdf");
    const auto cdf_id = r.optional_string("cdf_id");
    r.reject_unknown();
    if (bool(cdf) == bool(cdf_id)) throw Error(Errc::kBadMessage, "payload needs exactly one of cdf, cdf_id");
    if (cdf) {
      if (!cdf->is_object()) throw Error(Errc::kBadMessage, "payload.cdf must be an object");
      doc = *cdf;
    } else {
      util::require_identifier(*cdf_id, "payload.cdf_id");
      doc = *cdf_id;
    }
    return 0;
  });
  if (doc.is_string()) {
    if (options_.missions_dir.empty()) throw Error(Errc::kUnknownReference, "server has no mission directory");
    const auto path = options_.missions_dir / (doc.get<std::string>() + ".json");
    if (!std::filesystem::is_regular_file(path)) {
      throw Error(Errc::kUnknownReference, "no mission '" + doc.get<std::string>() + "'");
    }
    doc = util::parse_json(util::read_file(path), "cdf");
  }

  auto entry = std::make_shared<Entry>();
  entry->session = std::make_unique<runtime::Session>(cdf::parse_cdf_json(doc, res_), res_, options_.session_config);
  entry->agent = std::make_unique<runtime::ScriptedAgent>(res_, vocab_);
  std::lock_guard elock(entry->mu);
  {
    std::lock_guard lock(mu_);
    if (running_.load() >= options_.max_sessions) {
      throw Error(Errc::kSessionLimit, std::to_string(options_.max_sessions) + " sessions already running");
    }
    ++running_;
    entry->id = "s" + std::to_string(next_id_++);
    sessions_[entry->id] = entry;
  }
  entry->subscribe(peer);
  entry->frames_since(0, seq);
  entry->status(seq);
  if (!entry->session->running()) finish(*entry, seq);
}

void Hub::on_session(const std::shared_ptr<Peer>& peer, Entry& e, int64_t seq, const std::string& type,
                     const Json& payload) {
  runtime::Session& s = *e.session;
  auto read_string = [&](std::string_view key) {
    return shape([&] {
      util::FieldReader r(payload, "payload");
      std::string v = r.required_string(key);
      r.reject_unknown();
      return v;
    });
  };
  auto no_fields = [&] {
    shape([&] {
      util::FieldReader(payload, "payload").reject_unknown();
      return 0;
    });
  };

  if (type == "observe") {
    no_fields();
    e.subscribe(peer);
    Json transcript = Json::array();
    for (const auto& t : s.transcript()) {
      transcript.push_back({{"kind", t.kind}, {"speaker", t.speaker}, {"text", t.text}, {"tick", t.tick}});
    }
    e.unicast(peer, seq, "frame", {{"frame", s.latest_frame()}, {"replay", true}, {"transcript", transcript}});
    e.unicast(peer, seq, "goal_status", s.latest_frame()["goal_status"]);
    e.unicast(peer, seq, "score", score_payload(s));
    if (!s.running()) {
      e.unicast(peer, seq, "terminated", terminated_payload(s, e.log));
    }
    return;
  }
  if (!s.running()) {
    throw Error(Errc::kSessionTerminated, "session is " + std::string(runtime::phase_name(s.phase())));
  }
  const size_t before = s.frames().size();

  if (type == "action") {
    const Action a = shape([&] {
      util::FieldReader r(payload, "payload");
      Action out = action_from_json(r.required("action"), "payload.action");
      r.reject_unknown();
      return out;
    });
    s.step(a);
    e.frames_since(before, seq);
    e.status(seq);
  } else if (type == "utterance") {
    const std::string text = read_string("text");
    e.broadcast(seq, "dialog", {{"speaker", "user"}, {"text", text}});
    std::optional<runtime::AgentReply> reply;
    std::optional<Error> failure;
    try {
      reply = e.agent->respond(s, text);
    } catch (const Error& err) {
      if (err.code() != Errc::kUnparsableInstruction) throw;
      failure = err;
    }
    e.frames_since(before, seq);
    if (reply) {
      e.broadcast(seq, "dialog",
                  {{"speaker", "agent"},
                   {"text", reply->text},
                   {"question", reply->clarification ? Json(reply->clarification->encoding()) : Json()},
                   {"done", reply->done}});
    }
    e.status(seq);
    if (failure) throw *failure;
  } else if (type == "examine_note") {
    const std::string note = read_string("note_id");
    const auto out = s.user_event(runtime::ExamineStickyNote{note});
    e.frames_since(before, seq);
    if (out.note_text) e.broadcast(seq, "dialog", {{"speaker", "note"}, {"note_id", note}, {"text", *out.note_text}});
    e.status(seq);
  } else if (type == "request_highlight") {
    const std::string id = read_string("instance_id");
    s.user_event(runtime::RequestHighlight{id});
    e.broadcast(seq, "highlight", {{"instance_id", id}});
  } else if (type == "abort") {
    no_fields();
    s.abort();
  }
}

void Hub::finish(Entry& e, std::optional<int64_t> ack) {
  if (e.finished) return;
  e.finished = true;
  const runtime::Session& s = *e.session;
  if (options_.log_dir) {
    const auto path = *options_.log_dir / s.cdf().cdf_id / (utc_stamp() + "_" + e.id + ".jsonl");
    try {
      util::write_file_atomic(path, s.log_text());
      e.log = path.string();
      std::lock_guard lock(mu_);
      logs_.push_back(path);
    } catch (const std::exception&) {
      // Reported below as a null log path.
    }
  }
  e.broadcast(ack, "terminated", terminated_payload(s, e.log));
  std::lock_guard lock(mu_);
  --running_;
  terminated_.push_back(e.id);
  while (terminated_.size() > options_.retain_terminated) {
    sessions_.erase(terminated_.front());
    terminated_.pop_front();
  }
}

BindAddress parse_bind(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Error(Errc::kValidationError, "bind address must be host:port, got '" + std::string(text) + "'");
  }
  BindAddress out;
  out.host = std::string(text.substr(0, colon));
  if (out.host.size() > 2 && out.host.front() == '[' && out.host.back() == ']') out.host = out.host.substr(1, out.host.size() - 2);
  const std::string_view port = text.substr(colon + 1);
  unsigned v = 0;
  auto [p, ec] = std::from_chars(port.data(), port.data() + port.size(), v);
  if (ec != std::errc() || p != port.data() + port.size() || v > 65535) {
    throw Error(Errc::kValidationError, "bad port in '" + std::string(text) + "'");
  }
  out.port = static_cast<uint16_t>(v);
  return out;
}

BindAddress bind_from_env() {
  if (const char* v = std::getenv("ARENA_BIND"); v && *v) return parse_bind(v);
  return {};
}

}  // namespace arena::server

#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arena/qa/qa.hpp"
#include "arena/resources.hpp"
#include "arena/runtime/session.hpp"
#include "arena/util/json.hpp"

namespace arena::server {

inline constexpr int kProtocolVersion = 1;

// One client connection. deliver() may be called from any thread and must
// not block on the network.
class Peer {
 public:
  virtual ~Peer() = default;
  virtual void deliver(std::string text) = 0;
};

struct HubOptions {
  size_t max_sessions = 64;  // running at once
  size_t retain_terminated = 256;
  size_t max_message_bytes = 1 << 20;
  // start_mission {"cdf_id"} reads <missions_dir>/<cdf_id>.json.
  std::filesystem::path missions_dir;
  // Finished episodes go to <log_dir>/<cdf_id>/<timestamp>_<session>.jsonl.
  std::optional<std::filesystem::path> log_dir;
  runtime::SessionConfig session_config;
};

// Transport-free protocol core. Each session's messages are handled under
// that session's own lock, which is the serializing queue: every subscriber
// gets broadcasts in one order. Different sessions proceed in parallel.
class Hub {
 public:
  explicit Hub(const Resources& res, HubOptions options = {});
  ~Hub();
  Hub(const Hub&) = delete;
  Hub& operator=(const Hub&) = delete;

  // One inbound message. Never throws; problems come back as error messages.
  void handle(const std::shared_ptr<Peer>& peer, std::string_view text);
  void disconnect(const Peer* peer);

  size_t running_sessions() const { return running_.load(); }
  size_t max_message_bytes() const { return options_.max_message_bytes; }
  std::vector<std::filesystem::path> written_logs() const;

 private:
  struct Entry;
  struct PeerState {
    std::map<std::string, int64_t> last_seq;  // by session id, "" for none
    int64_t out_seq = 0;
  };

  void dispatch(const std::shared_ptr<Peer>& peer, const util::Json& env);
  void start_mission(const std::shared_ptr<Peer>& peer, int64_t seq, const util::Json& payload);
  void on_session(const std::shared_ptr<Peer>& peer, Entry& e, int64_t seq, const std::string& type,
                  const util::Json& payload);
  void send_error(const std::shared_ptr<Peer>& peer, const std::optional<std::string>& session_id,
                  std::optional<int64_t> ack, std::optional<std::string> in_reply_to, std::string_view code,
                  const std::string& message);
  void finish(Entry& e, std::optional<int64_t> ack);

  const Resources& res_;
  HubOptions options_;
  qa::Vocabulary vocab_;

  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::deque<std::string> terminated_;
  std::map<const Peer*, PeerState> peers_;
  std::vector<std::filesystem::path> logs_;
  uint64_t next_id_ = 1;
  std::atomic<size_t> running_{0};
};

// "host:port"; the port may be 0 for an ephemeral one.
struct BindAddress {
  std::string host = "127.0.0.1";
  uint16_t port = 8765;
};
// Throws ValidationError.
BindAddress parse_bind(std::string_view text);
// ARENA_BIND, or the default.
BindAddress bind_from_env();

}  // namespace arena::server

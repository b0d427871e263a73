#pragma once

#include <cstdint>
#include <memory>

#include "arena/server/hub.hpp"

namespace arena::server {

// WebSocket transport for a Hub: one text message per protocol message.
// Browsers connect with the native WebSocket API; see docs/protocol.md.
class WsServer {
 public:
  WsServer(Hub& hub, const BindAddress& bind, int threads = 2);
  ~WsServer();
  WsServer(const WsServer&) = delete;
  WsServer& operator=(const WsServer&) = delete;

  // The bound port, useful when bind.port was 0.
  uint16_t port() const;
  // Runs the I/O threads in the background; stop() joins them.
  void start();
  void stop();
  // Blocks until SIGINT / SIGTERM.
  void run_until_signal();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace arena::server

#include "arena/server/ws_server.hpp"

#include <csignal>
#include <deque>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "arena/error.hpp"

namespace arena::server {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

// A client that never reads gets dropped rather than buffered forever.
constexpr size_t kMaxQueued = 20000;

class Connection : public Peer, public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, Hub& hub, size_t max_message)
      : ws_(std::move(socket)), hub_(hub), max_message_(max_message) {}

  void start() {
    asio::dispatch(ws_.get_executor(), [self = shared_from_this()] {
      self->ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
      // Oversized frames get a protocol error from the hub, not a hard close.
      self->ws_.read_message_max(self->max_message_ + 1024);
      self->ws_.async_accept(beast::bind_front_handler(&Connection::on_accept, self));
    });
  }

  void deliver(std::string text) override {
    asio::post(ws_.get_executor(), [self = shared_from_this(), t = std::move(text)]() mutable {
      if (self->closed_) return;
      if (self->queue_.size() >= kMaxQueued) {
        self->shutdown();
        return;
      }
      self->queue_.push_back(std::move(t));
      if (self->queue_.size() == 1 && self->open_) self->write_next();
    });
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return shutdown();
    open_ = true;
    if (!queue_.empty()) write_next();
    read();
  }

  void read() { ws_.async_read(buffer_, beast::bind_front_handler(&Connection::on_read, shared_from_this())); }

  void on_read(beast::error_code ec, size_t) {
    if (ec) return shutdown();
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    hub_.handle(shared_from_this(), text);
    read();
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()),
                    beast::bind_front_handler(&Connection::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, size_t) {
    if (ec) return shutdown();
    queue_.pop_front();
    if (!queue_.empty()) write_next();
  }

  void shutdown() {
    if (closed_) return;
    closed_ = true;
    open_ = false;
    queue_.clear();
    hub_.disconnect(this);
    beast::error_code ignored;
    beast::get_lowest_layer(ws_).socket().close(ignored);
  }

  websocket::stream<beast::tcp_stream> ws_;
  Hub& hub_;
  size_t max_message_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  bool open_ = false;
  bool closed_ = false;
};

}  // namespace

struct WsServer::Impl {
  Hub& hub;
  int n_threads;
  asio::io_context ioc;
  tcp::acceptor acceptor;
  std::vector<std::thread> threads;

  Impl(Hub& h, const BindAddress& bind, int n) : hub(h), n_threads(std::max(1, n)), ioc(std::max(1, n)), acceptor(ioc) {
    try {
      tcp::resolver resolver(ioc);
      const auto results = resolver.resolve(bind.host, std::to_string(bind.port),
                                            tcp::resolver::passive | tcp::resolver::numeric_service);
      const tcp::endpoint ep = results.begin()->endpoint();
      acceptor.open(ep.protocol());
      acceptor.set_option(asio::socket_base::reuse_address(true));
      acceptor.bind(ep);
      acceptor.listen(asio::socket_base::max_listen_connections);
    } catch (const boost::system::system_error& e) {
      throw Error(Errc::kIoError, "cannot listen on " + bind.host + ":" + std::to_string(bind.port) + ": " + e.what());
    }
  }

  void accept() {
    acceptor.async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (!ec) std::make_shared<Connection>(std::move(socket), hub, hub.max_message_bytes())->start();
      if (acceptor.is_open()) accept();
    });
  }
};

WsServer::WsServer(Hub& hub, const BindAddress& bind, int threads)
    : impl_(std::make_unique<Impl>(hub, bind, threads)) {}

WsServer::~WsServer() { stop(); }

uint16_t WsServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void WsServer::start() {
  impl_->accept();
  for (int i = 0; i < impl_->n_threads; ++i) impl_->threads.emplace_back([this] { impl_->ioc.run(); });
}

void WsServer::stop() {
  if (!impl_) return;
  impl_->ioc.stop();
  for (auto& t : impl_->threads) {
    if (t.joinable()) t.join();
  }
  impl_->threads.clear();
}

void WsServer::run_until_signal() {
  asio::signal_set signals(impl_->ioc, SIGINT, SIGTERM);
  signals.async_wait([this](beast::error_code, int) { impl_->ioc.stop(); });
  impl_->accept();
  for (int i = 1; i < impl_->n_threads; ++i) impl_->threads.emplace_back([this] { impl_->ioc.run(); });
  impl_->ioc.run();
  stop();
}

}  // namespace arena::server

// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdm/service/server.h"

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <condition_variable>
#include <deque>
#include <mutex>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "pdm/error.h"
#include "pdm/service/protocol.h"

namespace pdm::service {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

const char* kFallbackPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>pdm sculpt</title></head>
<body><canvas id="view"></canvas>
<p>Connect a WebSocket to this host to receive tiles.</p></body></html>
)";

struct Shared {
  Scene scene;
  SceneDescription description;
  ServerConfig config;
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, std::shared_ptr<const Shared> shared)
      : ws_(std::move(socket)), timer_(ws_.get_executor()), shared_(std::move(shared)),
        session_(shared_->scene, shared_->description.camera, shared_->config.render,
                 shared_->config.session) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    send(hello_message(session_.camera(), session_.version()));
    do_read();
    schedule_tick();
  }

  void do_read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      closed_ = true;
      timer_.cancel();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    handle(text);
    do_read();
    schedule_tick();
  }

  void handle(const std::string& text) {
    try {
      const ClientMessage msg = parse_client_message(text);
      if (const auto* s = std::get_if<StrokeMsg>(&msg)) {
        const StrokeResult r = session_.apply_stroke(s->stroke);
        if (r.pick) send(picked_message(*r.pick));
        send(stroke_ack_message(r, s->stroke.seq));
      } else if (const auto* c = std::get_if<CameraMsg>(&msg)) {
        session_.set_camera(apply_camera_message(session_.camera(), shared_->description.camera, *c));
      } else if (const auto* b = std::get_if<BrushDefineMsg>(&msg)) {
        session_.define_brush(b->id, b->brush);
      }
    } catch (const std::exception& e) {
      send(error_message(e.what()));
    }
  }

  void schedule_tick() {
    if (closed_ || tick_pending_ || !session_.has_work()) return;
    tick_pending_ = true;
    timer_.expires_after(std::chrono::milliseconds(shared_->config.tick_ms));
    timer_.async_wait(beast::bind_front_handler(&WsSession::on_tick, shared_from_this()));
  }

  void on_tick(beast::error_code ec) {
    tick_pending_ = false;
    if (ec || closed_) return;
    if (outbox_.size() < 256) {
      TickStats stats;
      const std::vector<Tile> tiles = session_.frame_tick(&stats);
      for (const Tile& t : tiles) send(tile_message(t));
      if (!tiles.empty()) send(stats_message(stats));
    }
    schedule_tick();
  }

  void send(std::string msg) {
    outbox_.push_back(std::move(msg));
    if (outbox_.size() == 1) do_write();
  }

  void do_write() {
    ws_.text(true);
    ws_.async_write(net::buffer(outbox_.front()),
                    beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      closed_ = true;
      timer_.cancel();
      return;
    }
    outbox_.pop_front();
    if (!outbox_.empty()) do_write();
  }

  websocket::stream<beast::tcp_stream> ws_;
  net::steady_timer timer_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  std::shared_ptr<const Shared> shared_;
  EditSession session_;
  bool tick_pending_ = false;
  bool closed_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, std::shared_ptr<const Shared> shared)
      : stream_(std::move(socket)), shared_(std::move(shared)) {}

  void run() {
    net::dispatch(stream_.get_executor(),
                  beast::bind_front_handler(&HttpSession::do_read, shared_from_this()));
  }

 private:
  void do_read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_,
                     beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return;
    if (websocket::is_upgrade(req_)) {
      stream_.expires_never();
      std::make_shared<WsSession>(stream_.release_socket(), shared_)->run(std::move(req_));
      return;
    }
    auto res = std::make_shared<http::response<http::string_body>>(respond());
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      beast::error_code ignored;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
    });
  }

  http::response<http::string_body> respond() {
    http::response<http::string_body> res;
    res.version(req_.version());
    res.keep_alive(false);
    res.set(http::field::server, "pdm");
    const std::string target(req_.target());
    if (req_.method() != http::verb::get) {
      res.result(http::status::method_not_allowed);
      res.body() = "method not allowed\n";
    } else if (target == "/" || target == "/index.html") {
      res.result(http::status::ok);
      res.set(http::field::content_type, "text/html; charset=utf-8");
      res.body() = ui_page();
    } else if (target == "/scene") {
      res.result(http::status::ok);
      res.set(http::field::content_type, "application/json");
      res.body() = scene_to_json(shared_->description);
    } else {
      res.result(http::status::not_found);
      res.set(http::field::content_type, "text/plain");
      res.body() = "not found\n";
    }
    res.prepare_payload();
    return res;
  }

  std::string ui_page() const {
    if (!shared_->config.ui_dir.empty()) {
      std::ifstream in(shared_->config.ui_dir / "index.html", std::ios::binary);
      if (in) {
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
      }
    }
    return kFallbackPage;
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  std::shared_ptr<const Shared> shared_;
};

}  // namespace

struct Server::Impl {
  std::shared_ptr<const Shared> shared;
  net::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::vector<std::thread> threads;
  unsigned short bound_port = 0;
  std::mutex mu;
  std::condition_variable cv;
  bool stopped = false;

  void do_accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<HttpSession>(std::move(socket), shared)->run();
      do_accept();
    });
  }
};

Server::Server(Scene scene, SceneDescription description, ServerConfig config)
    : impl_(std::make_unique<Impl>()) {
  if (!scene.built()) throw ContractError("server: scene is not built");
  impl_->shared = std::make_shared<const Shared>(Shared{std::move(scene), std::move(description), config});
}

Server::~Server() { stop(); }

unsigned short Server::start() {
  const auto& cfg = impl_->shared->config;
  beast::error_code ec;
  const auto addr = net::ip::make_address(cfg.address, ec);
  if (ec) throw ValidationError("bad listen address '" + cfg.address + "'");
  const tcp::endpoint ep(addr, cfg.port);
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(net::socket_base::reuse_address(true));
  impl_->acceptor.bind(ep, ec);
  if (ec) throw IoError("cannot bind " + cfg.address + ":" + std::to_string(cfg.port) + ": " + ec.message());
  impl_->acceptor.listen(net::socket_base::max_listen_connections);
  impl_->bound_port = impl_->acceptor.local_endpoint().port();
  impl_->do_accept();
  const int n = std::max(1, cfg.io_threads);
  for (int i = 0; i < n; ++i) impl_->threads.emplace_back([this] { impl_->ioc.run(); });
  return impl_->bound_port;
}

void Server::stop() {
  if (!impl_) return;
  {
    std::lock_guard lock(impl_->mu);
    if (impl_->stopped) return;
    impl_->stopped = true;
  }
  impl_->ioc.stop();
  for (auto& t : impl_->threads)
    if (t.joinable()) t.join();
  impl_->threads.clear();
  impl_->cv.notify_all();
}

void Server::wait() {
  net::io_context sig_ioc;
  net::signal_set signals(sig_ioc, SIGINT, SIGTERM);
  signals.async_wait([this](beast::error_code, int) { stop(); });
  std::thread sig_thread([&] { sig_ioc.run(); });
  {
    std::unique_lock lock(impl_->mu);
    impl_->cv.wait(lock, [this] { return impl_->stopped; });
  }
  sig_ioc.stop();
  sig_thread.join();
}

unsigned short Server::port() const { return impl_->bound_port; }

}  // namespace pdm::service

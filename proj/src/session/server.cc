#include "proxsim/session/server.h"

#include <chrono>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace proxsim {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

std::string_view mime_type(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  return "application/octet-stream";
}

// Maps a request target onto a file under root, refusing anything that
// escapes it.
std::optional<std::filesystem::path> resolve(const std::filesystem::path& root,
                                             std::string_view target) {
  std::string path(target.substr(0, target.find_first_of("?#")));
  if (path.empty() || path.front() != '/') return std::nullopt;
  if (path.back() == '/') path += "index.html";
  const std::filesystem::path rel = std::filesystem::path(path.substr(1)).lexically_normal();
  if (rel.empty() || rel.is_absolute() || *rel.begin() == "..") return std::nullopt;
  return root / rel;
}

}  // namespace

struct SessionServer::Impl {
  struct Connection;

  Impl(ServerOptions opts)
      : options(std::move(opts)),
        acceptor(io),
        timer(io),
        hub(options.defaults) {
    hub.out_dir = options.out_dir;
    const tcp::endpoint ep(asio::ip::make_address(options.address), options.port);
    acceptor.open(ep.protocol());
    acceptor.set_option(asio::socket_base::reuse_address(true));
    acceptor.bind(ep);
    acceptor.listen();
  }

  void accept();
  void schedule_tick();
  void deliver(const std::vector<SessionHub::Outbound>& frames);

  ServerOptions options;
  asio::io_context io;
  tcp::acceptor acceptor;
  asio::steady_timer timer;
  std::chrono::steady_clock::time_point next_tick;
  SessionHub hub;
  ClientId next_client = 1;
  std::map<ClientId, std::weak_ptr<Connection>> connections;
};

struct SessionServer::Impl::Connection
    : std::enable_shared_from_this<SessionServer::Impl::Connection> {
  Connection(Impl& impl, tcp::socket socket, ClientId id)
      : impl(impl), stream(std::move(socket)), id(id) {}

  void start() { read_request(); }

  void read_request() {
    request = {};
    http::async_read(stream, buffer, request,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (ec) return;
                       self->on_request();
                     });
  }

  void on_request() {
    if (websocket::is_upgrade(request)) {
      ws.emplace(std::move(stream));
      ws->read_message_max(64 * 1024);
      ws->async_accept(request, [self = shared_from_this()](beast::error_code ec) {
        if (ec) return;
        self->impl.connections[self->id] = self->weak_from_this();
        self->read_message();
      });
      return;
    }
    serve_file();
  }

  void serve_file() {
    auto response = std::make_shared<http::response<http::string_body>>();
    response->version(request.version());
    response->keep_alive(false);
    std::optional<std::filesystem::path> file;
    if (!impl.options.static_root.empty() && request.method() == http::verb::get) {
      const auto target = request.target();
      file = resolve(impl.options.static_root, std::string_view(target.data(), target.size()));
    }
    std::ifstream in;
    if (file && std::filesystem::is_regular_file(*file)) in.open(*file, std::ios::binary);
    if (in.is_open() && in) {
      std::ostringstream body;
      body << in.rdbuf();
      response->result(http::status::ok);
      response->set(http::field::content_type, std::string(mime_type(*file)));
      response->body() = body.str();
    } else {
      response->result(http::status::not_found);
      response->set(http::field::content_type, "text/plain");
      response->body() = "not found\n";
    }
    response->prepare_payload();
    http::async_write(stream, *response,
                      [self = shared_from_this(), response](beast::error_code, std::size_t) {
                        beast::error_code ignored;
                        self->stream.socket().shutdown(tcp::socket::shutdown_send, ignored);
                      });
  }

  void read_message() {
    ws->async_read(buffer, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->close();
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer.data());
      self->buffer.consume(self->buffer.size());
      self->impl.deliver(self->impl.hub.handle_message(self->id, text));
      self->read_message();
    });
  }

  void send(std::string text) {
    if (!ws || closed) return;
    outbox.push_back(std::move(text));
    if (outbox.size() == 1) write_next();
  }

  void write_next() {
    ws->text(true);
    ws->async_write(asio::buffer(outbox.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->close();
                        return;
                      }
                      self->outbox.pop_front();
                      if (!self->outbox.empty()) self->write_next();
                    });
  }

  void close() {
    if (closed) return;
    closed = true;
    impl.hub.disconnect(id);
    impl.connections.erase(id);
  }

  Impl& impl;
  beast::tcp_stream stream;
  std::optional<websocket::stream<beast::tcp_stream>> ws;
  beast::flat_buffer buffer;
  http::request<http::string_body> request;
  std::deque<std::string> outbox;
  ClientId id;
  bool closed = false;
};

void SessionServer::Impl::accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<Connection>(*this, std::move(socket), next_client++)->start();
    accept();
  });
}

void SessionServer::Impl::deliver(const std::vector<SessionHub::Outbound>& frames) {
  for (const SessionHub::Outbound& f : frames) {
    const auto it = connections.find(f.client);
    if (it == connections.end()) continue;
    if (auto c = it->second.lock()) c->send(f.text);
  }
}

void SessionServer::Impl::schedule_tick() {
  next_tick += std::chrono::milliseconds(50);
  timer.expires_at(next_tick);
  timer.async_wait([this](beast::error_code ec) {
    if (ec) return;
    deliver(hub.tick_all());
    // Catch up on ticks the loop fell behind on; simulated time stays
    // authoritative.
    while (std::chrono::steady_clock::now() >= next_tick + std::chrono::milliseconds(50)) {
      next_tick += std::chrono::milliseconds(50);
      deliver(hub.tick_all());
    }
    schedule_tick();
  });
}

SessionServer::SessionServer(ServerOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {}

SessionServer::~SessionServer() = default;

unsigned short SessionServer::port() const {
  return impl_->acceptor.local_endpoint().port();
}

void SessionServer::run() {
  impl_->accept();
  impl_->next_tick = std::chrono::steady_clock::now();
  impl_->schedule_tick();
  impl_->io.run();
}

void SessionServer::stop() {
  asio::post(impl_->io, [impl = impl_.get()] {
    beast::error_code ignored;
    impl->acceptor.close(ignored);
    impl->timer.cancel();
    for (auto& [id, weak] : impl->connections) {
      if (auto c = weak.lock()) {
        if (c->ws) c->ws->next_layer().socket().close(ignored);
      }
    }
    impl->io.stop();
  });
}

}  // namespace proxsim

#include <chrono>
#include <fstream>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <gtest/gtest.h>

#include "json.hpp"
#include "proxsim/session/server.h"
#include "test_util.h"

namespace proxsim {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

class ServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::ofstream(root_.path() / "index.html") << "<!doctype html><title>field</title>";
    ServerOptions options;
    options.port = 0;
    options.static_root = root_.path();
    options.defaults = make_session_config("psi_0.01", 9);
    server_ = std::make_unique<SessionServer>(options);
    thread_ = std::thread([this] { server_->run(); });
  }

  void TearDown() override {
    server_->stop();
    thread_.join();
  }

  tcp::socket connect() {
    tcp::socket socket(io_);
    socket.connect({asio::ip::make_address("127.0.0.1"), server_->port()});
    return socket;
  }

  http::response<http::string_body> get(const std::string& target) {
    tcp::socket socket = connect();
    http::request<http::empty_body> req{http::verb::get, target, 11};
    req.set(http::field::host, "127.0.0.1");
    http::write(socket, req);
    beast::flat_buffer buffer;
    http::response<http::string_body> res;
    http::read(socket, buffer, res);
    return res;
  }

  test::TempDir root_;
  asio::io_context io_;
  std::unique_ptr<SessionServer> server_;
  std::thread thread_;
};

TEST_F(ServerTest, ServesStaticFilesInsideTheRootOnly) {
  const auto index = get("/");
  EXPECT_EQ(index.result(), http::status::ok);
  EXPECT_EQ(index.body(), "<!doctype html><title>field</title>");
  EXPECT_EQ(index[http::field::content_type], "text/html");
  EXPECT_EQ(get("/missing.js").result(), http::status::not_found);
  EXPECT_EQ(get("/a/../../etc/passwd").result(), http::status::not_found);
}

TEST_F(ServerTest, WebsocketClientJoinsAndReceivesTicks) {
  websocket::stream<tcp::socket> ws(connect());
  ws.handshake("127.0.0.1", "/");
  beast::flat_buffer buffer;
  auto read = [&] {
    buffer.clear();
    ws.read(buffer);
    return json::parse(beast::buffers_to_string(buffer.data()));
  };

  ws.write(asio::buffer(std::string(R"({"type":"join"})")));
  const json config = read();
  EXPECT_EQ(config["type"], "config");
  EXPECT_EQ(config["condition"], "psi_0.01");
  EXPECT_EQ(config["seed"], 9);

  const auto start = std::chrono::steady_clock::now();
  std::int64_t last = 0;
  for (int i = 0; i < 5; ++i) {
    const json state = read();
    ASSERT_EQ(state["type"], "state");
    EXPECT_EQ(state["t"].get<std::int64_t>(), last + 1);
    last = state["t"];
  }
  // Five ticks of 50 ms take at least about 200 ms of wall time.
  EXPECT_GE(std::chrono::steady_clock::now() - start, std::chrono::milliseconds(150));

  ws.write(asio::buffer(std::string("not json")));
  json frame;
  do frame = read();
  while (frame["type"] == "state");
  EXPECT_EQ(frame["type"], "error");
  EXPECT_EQ(frame["code"], "bad_json");
  // The connection survives the error.
  EXPECT_EQ(read()["type"], "state");
  ws.close(websocket::close_code::normal);
}

TEST_F(ServerTest, SecondClientCanWatchTheSameSession) {
  websocket::stream<tcp::socket> a(connect()), b(connect());
  a.handshake("127.0.0.1", "/");
  b.handshake("127.0.0.1", "/");
  beast::flat_buffer buf;
  a.write(asio::buffer(std::string(R"({"type":"join"})")));
  a.read(buf);
  const std::string id = json::parse(beast::buffers_to_string(buf.data()))["session"];
  buf.clear();
  b.write(asio::buffer(json{{"type", "join"}, {"session", id}}.dump()));
  b.read(buf);
  const json config = json::parse(beast::buffers_to_string(buf.data()));
  EXPECT_EQ(config["type"], "config");
  EXPECT_EQ(config["session"], id);
  buf.clear();
  b.read(buf);
  EXPECT_EQ(json::parse(beast::buffers_to_string(buf.data()))["type"], "state");
}

}  // namespace
}  // namespace proxsim

// Copyright 2026 The pegbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pegbench/server.h"

#include <filesystem>
#include <fstream>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "gtest/gtest.h"

namespace pegbench::server {
namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace fs = std::filesystem;
using tcp = boost::asio::ip::tcp;
using nlohmann::json;

class ServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() / "pegbench_server_test";
    fs::remove_all(root_);
    fs::create_directories(root_ / "static");
    std::ofstream(root_ / "static" / "index.html") << "<html>teleop</html>";
    session_ = std::make_unique<session::TeleopSession>(session::SessionConfig{.data_dir = root_ / "data"});
    server_ = std::make_unique<Server>(ServerConfig{.port = 0, .static_dir = root_ / "static"}, *session_);
    port_ = server_->Listen();
    thread_ = std::thread([this] { server_->Run(); });
  }
  void TearDown() override {
    server_->Stop();
    thread_.join();
    fs::remove_all(root_);
  }

  std::unique_ptr<websocket::stream<tcp::socket>> Connect(const std::string& target = "/session") {
    auto ws = std::make_unique<websocket::stream<tcp::socket>>(io_);
    tcp::resolver resolver(io_);
    boost::asio::connect(ws->next_layer(), resolver.resolve("127.0.0.1", std::to_string(port_)));
    ws->handshake("127.0.0.1", target);
    return ws;
  }

  static json Exchange(websocket::stream<tcp::socket>& ws, const json& message) {
    ws.write(boost::asio::buffer(message.dump()));
    beast::flat_buffer buf;
    ws.read(buf);
    return json::parse(beast::buffers_to_string(buf.data()));
  }

  fs::path root_;
  boost::asio::io_context io_;
  std::unique_ptr<session::TeleopSession> session_;
  std::unique_ptr<Server> server_;
  uint16_t port_ = 0;
  std::thread thread_;
};

TEST_F(ServerTest, EphemeralPort) { EXPECT_NE(port_, 0); }

TEST_F(ServerTest, WebSocketProtocol) {
  auto ws = Connect();
  json obs = Exchange(*ws, {{"type", "control"}, {"cmd", "start"}, {"seed", 5}});
  EXPECT_EQ(obs.at("type"), "obs");
  EXPECT_EQ(obs.at("step"), 0);
  for (int i = 1; i <= 3; ++i) {
    obs = Exchange(*ws, {{"type", "action"}, {"ax", 0.5}, {"ay", 0.5}, {"az", 0.5}});
    EXPECT_EQ(obs.at("step"), i);
  }
  EXPECT_EQ(Exchange(*ws, {{"type", "nope"}}).at("type"), "error");
  ws->close(websocket::close_code::normal);
}

TEST_F(ServerTest, ReconnectKeepsEpisode) {
  {
    auto ws = Connect();
    Exchange(*ws, {{"type", "control"}, {"cmd", "start"}, {"seed", 1}});
    Exchange(*ws, {{"type", "action"}, {"ax", 0.5}, {"ay", 0.5}, {"az", 0.5}});
    ws->close(websocket::close_code::normal);
  }
  auto ws = Connect();
  const json obs = Exchange(*ws, {{"type", "action"}, {"ax", 0.5}, {"ay", 0.5}, {"az", 0.5}});
  EXPECT_EQ(obs.at("step"), 2);
  ws->close(websocket::close_code::normal);
}

TEST_F(ServerTest, StaticFilesAndBadPaths) {
  auto get = [&](const std::string& target) {
    tcp::socket sock(io_);
    tcp::resolver resolver(io_);
    boost::asio::connect(sock, resolver.resolve("127.0.0.1", std::to_string(port_)));
    http::request<http::string_body> req{http::verb::get, target, 11};
    req.set(http::field::host, "127.0.0.1");
    http::write(sock, req);
    beast::flat_buffer buf;
    http::response<http::string_body> res;
    http::read(sock, buf, res);
    return res;
  };
  const auto index = get("/");
  EXPECT_EQ(index.result(), http::status::ok);
  EXPECT_EQ(index.body(), "<html>teleop</html>");
  EXPECT_EQ(get("/missing.js").result(), http::status::not_found);
  EXPECT_NE(get("/../secret").result(), http::status::ok);
}

}  // namespace
}  // namespace pegbench::server

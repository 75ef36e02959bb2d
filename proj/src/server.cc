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

#include <fstream>
#include <iterator>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace pegbench::server {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

std::string ContentType(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

}  // namespace

struct Server::Impl {
  ServerConfig config;
  session::TeleopSession* session;
  asio::io_context ioc;
  tcp::acceptor acceptor{ioc};
  bool listening = false;
  std::function<void(const std::string&)>* log;

  void Log(const std::string& line) {
    if (*log) (*log)(line);
  }

  http::response<http::string_body> StaticResponse(const http::request<http::string_body>& req) {
    http::response<http::string_body> res;
    res.version(req.version());
    res.keep_alive(false);
    std::string target(req.target());
    if (const auto q = target.find('?'); q != std::string::npos) target.resize(q);
    if (target.empty() || target == "/") target = "/index.html";
    if (req.method() != http::verb::get || !config.static_dir ||
        target.find("..") != std::string::npos) {
      res.result(http::status::not_found);
      res.body() = "not found\n";
    } else {
      const std::filesystem::path file = *config.static_dir / target.substr(1);
      std::ifstream f(file, std::ios::binary);
      if (!f) {
        res.result(http::status::not_found);
        res.body() = "not found\n";
      } else {
        res.result(http::status::ok);
        res.set(http::field::content_type, ContentType(file));
        res.body().assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
      }
    }
    res.prepare_payload();
    return res;
  }

  void Serve(tcp::socket socket) {
    beast::flat_buffer buffer;
    http::request<http::string_body> req;
    beast::error_code ec;
    http::read(socket, buffer, req, ec);
    if (ec) return;
    if (!websocket::is_upgrade(req) || req.target() != "/session") {
      http::write(socket, StaticResponse(req), ec);
      socket.shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    websocket::stream<tcp::socket> ws(std::move(socket));
    ws.accept(req, ec);
    if (ec) return;
    Log("session client connected");
    for (;;) {
      beast::flat_buffer frame;
      ws.read(frame, ec);
      if (ec) break;
      const std::string text = beast::buffers_to_string(frame.data());
      for (const std::string& reply : session->HandleText(text)) {
        ws.text(true);
        ws.write(asio::buffer(reply), ec);
        if (ec) break;
      }
      if (ec) break;
    }
    Log("session client disconnected");
  }

  void Accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;  // acceptor closed
      Serve(std::move(socket));
      Accept();
    });
  }
};

Server::Server(ServerConfig config, session::TeleopSession& session)
    : impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
  impl_->session = &session;
  impl_->log = &log;
}

Server::~Server() = default;

uint16_t Server::Listen() {
  auto& a = impl_->acceptor;
  if (!impl_->listening) {
    const tcp::endpoint ep(asio::ip::make_address(impl_->config.address), impl_->config.port);
    a.open(ep.protocol());
    a.set_option(asio::socket_base::reuse_address(true));
    a.bind(ep);
    a.listen();
    impl_->listening = true;
  }
  return a.local_endpoint().port();
}

void Server::Run() {
  const uint16_t port = Listen();
  impl_->Log("listening on ws://" + impl_->config.address + ":" + std::to_string(port) +
             "/session");
  impl_->Accept();
  impl_->ioc.run();
}

void Server::Stop() {
  asio::post(impl_->ioc, [impl = impl_.get()]() {
    beast::error_code ec;
    impl->acceptor.close(ec);
    impl->ioc.stop();
  });
}

}  // namespace pegbench::server

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

#ifndef PEGBENCH_SERVER_H_
#define PEGBENCH_SERVER_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "pegbench/session.h"

namespace pegbench::server {

struct ServerConfig {
  std::string address = "127.0.0.1";
  uint16_t port = 8765;  // 0 picks a free port
  // Files served for plain GET requests; unset disables static serving.
  std::optional<std::filesystem::path> static_dir;
};

// WebSocket endpoint at /session plus static files. Connections are served
// one at a time; the session outlives connections so a reconnecting client
// continues the same episode.
class Server {
 public:
  Server(ServerConfig config, session::TeleopSession& session);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and listens; returns the bound port.
  uint16_t Listen();
  // Serves until Stop(). Calls Listen() if needed.
  void Run();
  // Safe from any thread. A connection in progress finishes first.
  void Stop();

  std::function<void(const std::string&)> log;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pegbench::server

#endif  // PEGBENCH_SERVER_H_

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

#ifndef PEGBENCH_SESSION_H_
#define PEGBENCH_SESSION_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pegbench/checkpoint.h"
#include "pegbench/dataset.h"
#include "pegbench/model.h"
#include "pegbench/sensors.h"
#include "pegbench/sim.h"

// Transport-free teleoperation protocol. Client frames are
//   {type: "action", ax, ay, az}                       (components in [0, 1])
//   {type: "control", cmd: start|reset|save|discard, spec?, seed?, demo?}
//   {type: "seek", step}                               (replay mode)
// and the server answers with {type: "obs"|"saved"|"discarded"|"replay"|"error"}.
namespace pegbench::session {

enum class Mode { kTeleop, kReplay };
std::optional<Mode> ModeFromName(std::string_view name);

struct SessionConfig {
  Mode mode = Mode::kTeleop;
  sim::SimConfig sim;
  // Teleop: where saved demos accumulate. Replay: the dataset to browse.
  std::filesystem::path data_dir = "teleop_data";
  uint64_t first_seed = 0;
  // When set, obs frames carry the model's attention for that observation.
  std::optional<std::filesystem::path> checkpoint;
};

std::string EncodeBase64(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> DecodeBase64(std::string_view text);

enum class Status { kRunning, kSuccess, kFailed };
std::string_view StatusName(Status s);

nlohmann::json ObsMessage(int step, const sensors::Observation& obs, Status status,
                          const model::AttentionSummary* attention = nullptr);
nlohmann::json ErrorMessage(const std::string& message);

// Messages are processed strictly in order. Every well-formed action frame
// yields exactly one obs frame; an action after termination re-sends the
// final observation without stepping.
class TeleopSession {
 public:
  explicit TeleopSession(SessionConfig config);

  std::vector<nlohmann::json> Handle(const nlohmann::json& message);
  // Parses one text frame; malformed JSON yields an error frame.
  std::vector<std::string> HandleText(std::string_view frame);

  bool active() const { return state_.has_value(); }
  int step() const { return state_ ? state_->step : 0; }
  const SessionConfig& config() const { return config_; }

 private:
  std::vector<nlohmann::json> Control(const nlohmann::json& message);
  std::vector<nlohmann::json> Action(const nlohmann::json& message);
  std::vector<nlohmann::json> Seek(const nlohmann::json& message);
  void Begin(uint64_t seed, const variations::VariationSpec& spec);
  nlohmann::json CurrentObs();
  nlohmann::json Obs(int step, const sensors::Observation& obs, Status status);
  std::vector<nlohmann::json> Save();

  SessionConfig config_;
  std::optional<checkpoint::LoadedCheckpoint> attention_model_;
  uint64_t next_seed_;
  // Teleop episode.
  std::optional<sim::WorldState> state_;
  uint64_t seed_ = 0;
  variations::VariationSpec spec_;
  geom::Vec2 initial_offset_;
  sensors::FtHistory history_;
  sensors::Observation current_;
  sim::StepInfo last_info_;
  std::vector<sensors::Observation> observations_;
  std::vector<sim::Action> actions_;
  // Replay.
  std::optional<dataset::Dataset> replay_data_;
  const dataset::Demonstration* replay_demo_ = nullptr;
  sim::StepInfo replay_final_;
};

}  // namespace pegbench::session

#endif  // PEGBENCH_SESSION_H_

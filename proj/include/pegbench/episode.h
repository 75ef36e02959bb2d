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

#ifndef PEGBENCH_EPISODE_H_
#define PEGBENCH_EPISODE_H_

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pegbench/sensors.h"
#include "pegbench/sim.h"

namespace pegbench::episode {

// Anything that maps the current observation (and, for privileged
// controllers, the true state) to an action.
class Policy {
 public:
  virtual ~Policy() = default;
  // Called once per episode before the first Act.
  virtual void Reset(const sim::WorldState& /*state*/) {}
  virtual sim::Action Act(const sensors::Observation& obs, const sim::WorldState& state) = 0;
};

// Returns a fixed action sequence; past the end it returns the neutral
// action and reports exhaustion.
class ScriptedPolicy : public Policy {
 public:
  explicit ScriptedPolicy(std::vector<sim::Action> actions) : actions_(std::move(actions)) {}
  void Reset(const sim::WorldState&) override { next_ = 0; }
  sim::Action Act(const sensors::Observation&, const sim::WorldState&) override;
  bool exhausted() const { return next_ > actions_.size(); }

 private:
  std::vector<sim::Action> actions_;
  size_t next_ = 0;
};

class ConstantPolicy : public Policy {
 public:
  explicit ConstantPolicy(sim::Action action = {0.5f, 0.5f, 0.5f}) : action_(action) {}
  sim::Action Act(const sensors::Observation&, const sim::WorldState&) override { return action_; }

 private:
  sim::Action action_;
};

struct TraceRecord {
  int step = 0;  // index of the action, starting at 0
  geom::Vec2 lateral_offset;
  double depth = 0.0;
  sim::Action action{};
  sim::StepInfo info;
};
nlohmann::json ToJson(const TraceRecord& r);

struct EpisodeOptions {
  bool record_observations = true;
  bool record_trace = true;
  // Called before each observation is synthesized; may edit visual instances.
  std::function<void(int step, sim::WorldState&)> before_observe;
  // Called with each observation before it is handed to the policy; may
  // modify it.
  std::function<void(int step, sensors::Observation&)> on_observation;
  // Stop after this many actions even if not terminal; 0 means no limit.
  int max_actions = 0;
};

struct EpisodeResult {
  geom::Vec2 initial_offset;
  std::vector<sensors::Observation> observations;  // one per action
  std::vector<sim::Action> actions;
  std::vector<TraceRecord> trace;
  sim::StepInfo final_info;
  int steps = 0;
  bool success() const { return final_info.success; }
};

// Runs until the episode terminates. The FT history starts pre-filled with
// the state's initial wrenches.
EpisodeResult RunEpisode(sim::WorldState state, Policy& policy, const sim::SimConfig& config,
                         const EpisodeOptions& options = {});

// JSON lines, one record per step.
std::string TraceJsonl(const std::vector<TraceRecord>& trace);

}  // namespace pegbench::episode

#endif  // PEGBENCH_EPISODE_H_

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

#include "pegbench/episode.h"

namespace pegbench::episode {

sim::Action ScriptedPolicy::Act(const sensors::Observation&, const sim::WorldState&) {
  if (next_ < actions_.size()) return actions_[next_++];
  next_ = actions_.size() + 1;
  return {0.5f, 0.5f, 0.5f};
}

nlohmann::json ToJson(const TraceRecord& r) {
  auto wrench = [](const sim::Wrench& w) {
    return nlohmann::json{{"force", {w.force.x(), w.force.y(), w.force.z()}},
                          {"torque", {w.torque.x(), w.torque.y(), w.torque.z()}}};
  };
  return {{"step", r.step},
          {"offset", {r.lateral_offset.x, r.lateral_offset.y}},
          {"depth", r.depth},
          {"action", r.action},
          {"wrench_moving", wrench(r.info.wrench_moving)},
          {"wrench_compliant", wrench(r.info.wrench_compliant)},
          {"success", r.info.success},
          {"failure", std::string(sim::FailureName(r.info.failure))}};
}

EpisodeResult RunEpisode(sim::WorldState state, Policy& policy, const sim::SimConfig& config,
                         const EpisodeOptions& options) {
  EpisodeResult result;
  result.initial_offset = state.lateral_offset;
  sensors::FtHistory history =
      sensors::PrefilledHistory(state.last_wrench_moving, state.last_wrench_compliant);
  policy.Reset(state);
  while (!state.terminal) {
    if (options.max_actions > 0 && result.steps >= options.max_actions) break;
    if (options.before_observe) options.before_observe(result.steps, state);
    sensors::Observation obs = sensors::Observe(state, history);
    if (options.on_observation) options.on_observation(result.steps, obs);
    const sim::Action action = policy.Act(obs, state);
    sim::StepInfo info = sim::Step(state, action, config);
    sensors::PushFt(history, info.wrench_moving, info.wrench_compliant);
    if (options.record_observations) result.observations.push_back(std::move(obs));
    result.actions.push_back(action);
    if (options.record_trace) {
      result.trace.push_back({result.steps, state.lateral_offset, state.depth, action, info});
    }
    result.final_info = info;
    ++result.steps;
  }
  return result;
}

std::string TraceJsonl(const std::vector<TraceRecord>& trace) {
  std::string out;
  for (const TraceRecord& r : trace) {
    out += ToJson(r).dump();
    out += '\n';
  }
  return out;
}

}  // namespace pegbench::episode

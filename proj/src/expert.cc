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

#include "pegbench/expert.h"

#include <algorithm>

namespace pegbench::expert {

sim::Action ExpertAction(const sim::WorldState& state, const sim::SimConfig& config, Rng& rng,
                         const ExpertConfig& expert) {
  if (state.terminal) throw sim::TerminalStateError();
  const double m = config.max_delta;
  const double dither = expert.dither_fraction * m;
  const double offset[2] = {state.lateral_offset.x, state.lateral_offset.y};
  sim::Action action{0.5f, 0.5f, 0.5f};
  for (int i = 0; i < 2; ++i) {
    const double delta = -std::clamp(expert.gain * offset[i], -m, m) + rng.Uniform(-dither, dither);
    action[i] = static_cast<float>(std::clamp(0.5 + delta / (2.0 * m), 0.0, 1.0));
  }
  return action;
}

void ExpertPolicy::Reset(const sim::WorldState& state) {
  rng_ = Rng::ForStream(state.seed, Stream::kExpert);
}

sim::Action ExpertPolicy::Act(const sensors::Observation&, const sim::WorldState& state) {
  return ExpertAction(state, config_, rng_, expert_);
}

}  // namespace pegbench::expert

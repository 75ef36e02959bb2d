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

#ifndef PEGBENCH_EXPERT_H_
#define PEGBENCH_EXPERT_H_

#include "pegbench/episode.h"
#include "pegbench/rng.h"
#include "pegbench/sim.h"

namespace pegbench::expert {

struct ExpertConfig {
  double gain = 0.5;             // per step
  double dither_fraction = 0.1;  // of max_delta
};

// Proportional lateral controller with uniform dither; the insertion axis
// stays neutral. Throws sim::TerminalStateError on a terminated state.
sim::Action ExpertAction(const sim::WorldState& state, const sim::SimConfig& config, Rng& rng,
                         const ExpertConfig& expert = {});

// Privileged scripted demonstrator. Its dither stream is derived from the
// episode seed on Reset.
class ExpertPolicy : public episode::Policy {
 public:
  explicit ExpertPolicy(sim::SimConfig config = {}, ExpertConfig expert = {})
      : config_(config), expert_(expert) {}
  void Reset(const sim::WorldState& state) override;
  sim::Action Act(const sensors::Observation& obs, const sim::WorldState& state) override;

 private:
  sim::SimConfig config_;
  ExpertConfig expert_;
  Rng rng_;
};

}  // namespace pegbench::expert

#endif  // PEGBENCH_EXPERT_H_

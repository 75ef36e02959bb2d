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

#ifndef PEGBENCH_TRAINER_H_
#define PEGBENCH_TRAINER_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pegbench/dataset.h"
#include "pegbench/episode.h"
#include "pegbench/model.h"
#include "pegbench/ndnet.h"
#include "pegbench/sim.h"
#include "pegbench/variations.h"

namespace pegbench::trainer {

struct TrainConfig {
  // Defaults are the full-scale protocol; DeskScale() is what acceptance runs.
  int total_steps = 25000;
  int rollout_every = 1250;
  int rollouts_per_eval = 50;
  int seeds = 6;
  int batch = 16;
  int eval_n = 50;
  model::ModalityMask mask;
  variations::KindSet training_kinds;  // selection rollouts sample these, Train split
  uint64_t selection_seed_base = 500000;
  nd::AdamConfig adam;
  model::EncoderConfig encoder;
  sim::SimConfig sim;

  static TrainConfig DeskScale();
  // Throws std::invalid_argument unless rollout_every divides total_steps.
  void Validate() const;
};

nlohmann::json ToJson(const TrainConfig& c);
// Keys absent from `j` keep the value in `base`.
TrainConfig TrainConfigFromJson(const nlohmann::json& j, const TrainConfig& base = {});

struct LogEntry {
  int step = 0;  // 1-based count of completed updates
  double loss = 0.0;
  std::optional<double> eval_success;
};
nlohmann::json ToJson(const LogEntry& e);

struct Candidate {
  int step = 0;
  double success = 0.0;
};

struct TrainResult {
  std::unique_ptr<model::PerceiverPolicy<float>> model;  // holds the selected parameters
  int selected_step = 0;
  double selected_success = 0.0;
  std::vector<double> losses;
  std::vector<LogEntry> log;
  std::vector<Candidate> candidates;
};

using Logger = std::function<void(const std::string&)>;

// Minibatch behavior cloning on every (observation, action) pair of `data`.
// Batches are drawn from a reshuffled permutation each epoch. Every
// rollout_every updates the current parameters run rollouts_per_eval
// selection episodes; the best candidate wins, later steps win ties.
TrainResult Train(const dataset::Dataset& data, const TrainConfig& config, uint64_t seed,
                  const Logger& log = nullptr);

struct EvalStats {
  int attempts = 0;
  int successes = 0;
  int horizon = 0;
  int force_torque = 0;
  double success_rate() const { return attempts ? static_cast<double>(successes) / attempts : 0.0; }
  bool operator==(const EvalStats&) const = default;
};
nlohmann::json ToJson(const EvalStats& s);
EvalStats EvalStatsFromJson(const nlohmann::json& j);

struct EvalOptions {
  variations::KindSet kinds;  // empty: canonical
  variations::Split split = variations::Split::kEval;
  int n = 50;
  uint64_t seed_base = 1000000;
  sim::SimConfig sim;
  // Observes each episode's spec, e.g. to assert the split.
  std::function<void(int, const variations::VariationSpec&)> on_spec;
  // Called once per episode with the policy that will run it.
  std::function<void(int, episode::Policy&)> on_episode;
};

// Episode i uses seed seed_base + i and ComposeSpec(kinds, split, seed_base + i).
EvalStats Evaluate(const std::function<std::unique_ptr<episode::Policy>()>& make_policy,
                   const EvalOptions& options);
EvalStats Evaluate(const model::PerceiverPolicy<float>& model, const model::ModalityMask& mask,
                   const EvalOptions& options);

// Named evaluation conditions: canonical, one per kind, all.
std::vector<std::string> DefaultConditions();
// "canonical" is the empty set, "all" every kind, otherwise a kind list.
variations::KindSet ConditionKinds(const std::string& condition);

// (variation - canonical) / canonical; nullopt when canonical is zero.
std::optional<double> PctChange(double canonical_success, double variation_success);
// Per-seed changes first, then their mean over the seeds where it is defined.
std::optional<double> MeanPctChange(const std::vector<double>& canonical,
                                    const std::vector<double>& variation);

}  // namespace pegbench::trainer

#endif  // PEGBENCH_TRAINER_H_

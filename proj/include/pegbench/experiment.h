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

#ifndef PEGBENCH_EXPERIMENT_H_
#define PEGBENCH_EXPERIMENT_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pegbench/report.h"
#include "pegbench/trainer.h"

namespace pegbench::experiment {

enum class Matrix { kDifficulty, kTrainingSets, kAugSweep, kAblation };
std::string_view MatrixName(Matrix m);
std::optional<Matrix> MatrixFromName(std::string_view name);

// A trained-model recipe: expert demos plus T augmentations per demo over
// `kinds`, trained with `mask`. Selection rollouts sample `kinds`.
struct ModelSpec {
  std::string label;
  variations::KindSet kinds;
  int per_demo = 0;
  bool offline = false;
  model::ModalityMask mask;
};

struct ExperimentConfig {
  trainer::TrainConfig train = trainer::TrainConfig::DeskScale();
  int n_demos = 50;
  uint64_t demo_seed = 0;
  int per_demo = 6;
  std::vector<int> aug_counts = {2, 6, 10};
  uint64_t augment_seed_base = 100000;
  uint64_t seed_offset = 0;  // added to every training seed
  std::vector<std::string> conditions = trainer::DefaultConditions();
  uint64_t eval_seed_base = 1000000;
  // When set, training_log.jsonl, attention/*.jsonl and checkpoints/ go here.
  std::optional<std::filesystem::path> out_dir;
};

nlohmann::json ToJson(const ExperimentConfig& c);
ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j, const ExperimentConfig& base = {});

std::vector<ModelSpec> MatrixModels(Matrix m, const ExperimentConfig& config);

// Trains every model for train.seeds seeds and evaluates each on every
// condition (Eval split, n = train.eval_n).
report::EvalReport RunModels(const std::string& name, const std::vector<ModelSpec>& models,
                             const ExperimentConfig& config, const trainer::Logger& log = nullptr);
report::EvalReport RunExperiment(Matrix m, const ExperimentConfig& config,
                                 const trainer::Logger& log = nullptr);

}  // namespace pegbench::experiment

#endif  // PEGBENCH_EXPERIMENT_H_

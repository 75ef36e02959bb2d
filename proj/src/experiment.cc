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

#include "pegbench/experiment.h"

#include <fstream>
#include <map>

#include "pegbench/checkpoint.h"

namespace pegbench::experiment {

std::string_view MatrixName(Matrix m) {
  switch (m) {
    case Matrix::kDifficulty: return "difficulty";
    case Matrix::kTrainingSets: return "training-sets";
    case Matrix::kAugSweep: return "aug-sweep";
    case Matrix::kAblation: return "ablation";
  }
  return "unknown";
}

std::optional<Matrix> MatrixFromName(std::string_view name) {
  for (Matrix m : {Matrix::kDifficulty, Matrix::kTrainingSets, Matrix::kAugSweep,
                   Matrix::kAblation}) {
    if (MatrixName(m) == name) return m;
  }
  return std::nullopt;
}

nlohmann::json ToJson(const ExperimentConfig& c) {
  return {{"train", trainer::ToJson(c.train)},
          {"n_demos", c.n_demos},
          {"demo_seed", c.demo_seed},
          {"per_demo", c.per_demo},
          {"aug_counts", c.aug_counts},
          {"augment_seed_base", c.augment_seed_base},
          {"seed_offset", c.seed_offset},
          {"conditions", c.conditions},
          {"eval_seed_base", c.eval_seed_base}};
}

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j, const ExperimentConfig& base) {
  ExperimentConfig c = base;
  if (j.contains("train")) c.train = trainer::TrainConfigFromJson(j.at("train"), c.train);
  c.n_demos = j.value("n_demos", c.n_demos);
  c.demo_seed = j.value("demo_seed", c.demo_seed);
  c.per_demo = j.value("per_demo", c.per_demo);
  c.aug_counts = j.value("aug_counts", c.aug_counts);
  c.augment_seed_base = j.value("augment_seed_base", c.augment_seed_base);
  c.seed_offset = j.value("seed_offset", c.seed_offset);
  c.conditions = j.value("conditions", c.conditions);
  c.eval_seed_base = j.value("eval_seed_base", c.eval_seed_base);
  if (c.n_demos <= 0 || c.per_demo < 0) throw std::invalid_argument("bad demo counts");
  for (const std::string& cond : c.conditions) trainer::ConditionKinds(cond);
  return c;
}

std::vector<ModelSpec> MatrixModels(Matrix m, const ExperimentConfig& config) {
  using variations::kBaseKinds;
  const variations::KindSet all(variations::kAllKinds.begin(), variations::kAllKinds.end());
  std::vector<ModelSpec> out;
  switch (m) {
    case Matrix::kDifficulty:
      out.push_back({"canonical-only", {}, 0, false, {}});
      break;
    case Matrix::kTrainingSets:
      out.push_back({"canonical-only", {}, 0, false, {}});
      out.push_back({"base", kBaseKinds, config.per_demo, false, {}});
      out.push_back({"all", all, config.per_demo, false, {}});
      out.push_back({"offline-style", {}, config.per_demo, true, {}});
      break;
    case Matrix::kAugSweep:
      for (int t : config.aug_counts) {
        out.push_back({"base-T" + std::to_string(t), kBaseKinds, t, false, {}});
      }
      break;
    case Matrix::kAblation:
      for (std::string_view name : model::kMaskNames) {
        out.push_back({std::string(name), all, config.per_demo, false, *model::MaskFromName(name)});
      }
      break;
  }
  return out;
}

report::EvalReport RunModels(const std::string& name, const std::vector<ModelSpec>& models,
                             const ExperimentConfig& config, const trainer::Logger& log) {
  report::EvalReport out;
  out.matrix = name;
  out.config = ToJson(config);
  dataset::CollectOptions collect;
  collect.n = config.n_demos;
  collect.seed = config.demo_seed;
  dataset::CollectStats collect_stats;
  const dataset::Dataset demos = dataset::CollectExpert(collect, config.train.sim, &collect_stats);
  if (log) {
    log("collected " + std::to_string(demos.size()) + " expert demos in " +
        std::to_string(collect_stats.attempts) + " attempts");
  }
  std::ofstream train_log;
  if (config.out_dir) {
    std::filesystem::create_directories(*config.out_dir / "attention");
    std::filesystem::create_directories(*config.out_dir / "checkpoints");
    train_log.open(*config.out_dir / "training_log.jsonl");
  }
  std::map<std::tuple<std::string, int, bool>, dataset::Dataset> cache;
  for (const ModelSpec& spec : models) {
    const auto key = std::make_tuple(variations::FormatKinds(spec.kinds), spec.per_demo, spec.offline);
    if (!cache.count(key)) {
      dataset::AugmentStats stats;
      cache[key] = spec.per_demo == 0
                       ? demos
                       : dataset::AugmentDataset(demos, spec.kinds, spec.per_demo,
                                                 config.augment_seed_base, config.train.sim,
                                                 spec.offline, &stats);
      if (log && spec.per_demo > 0) {
        log(spec.label + ": " + std::to_string(cache[key].size()) + " demos, " +
            std::to_string(stats.dropped) + " of " + std::to_string(stats.attempted) +
            " augmentations dropped");
      }
    }
    const dataset::Dataset& data = cache[key];
    trainer::TrainConfig tc = config.train;
    tc.mask = spec.mask;
    tc.training_kinds = spec.offline ? variations::KindSet{} : spec.kinds;
    for (int s = 0; s < tc.seeds; ++s) {
      const uint64_t seed = config.seed_offset + static_cast<uint64_t>(s);
      trainer::TrainResult trained = trainer::Train(data, tc, seed, [&](const std::string& line) {
        if (log) log(spec.label + " seed " + std::to_string(seed) + ": " + line);
      });
      if (train_log.is_open()) {
        for (const trainer::LogEntry& e : trained.log) {
          nlohmann::json j = trainer::ToJson(e);
          j["model"] = spec.label;
          j["seed"] = seed;
          train_log << j.dump() << '\n';
        }
      }
      const std::string stem = spec.label + "_seed" + std::to_string(seed);
      if (config.out_dir) {
        checkpoint::Save(*config.out_dir / "checkpoints" / (stem + ".pgnn"), *trained.model,
                         spec.mask,
                         {{"model", spec.label}, {"seed", seed}, {"step", trained.selected_step}});
      }
      for (const std::string& condition : config.conditions) {
        trainer::EvalOptions eo;
        eo.kinds = trainer::ConditionKinds(condition);
        eo.split = variations::Split::kEval;
        eo.n = tc.eval_n;
        eo.seed_base = config.eval_seed_base;
        eo.sim = tc.sim;
        eo.on_spec = [](int, const variations::VariationSpec& vs) {
          if (!vs.active.empty() && vs.split != variations::Split::kEval) {
            throw std::logic_error("evaluation spec is not from the Eval split");
          }
        };
        std::ofstream attention;
        if (config.out_dir) {
          attention.open(*config.out_dir / "attention" / (stem + "_" + condition + ".jsonl"));
          eo.on_episode = [&](int i, episode::Policy& p) {
            if (i != 0) return;
            auto* mp = dynamic_cast<model::ModelPolicy*>(&p);
            if (!mp) return;
            mp->on_attention = [&attention, step = 0](const model::AttentionSummary& a) mutable {
              attention << model::ToJson(a, step++).dump() << '\n';
            };
          };
        }
        const trainer::EvalStats stats = trainer::Evaluate(*trained.model, spec.mask, eo);
        out.rows.push_back({spec.label, condition, static_cast<int>(seed), stats});
        if (log) {
          log(spec.label + " seed " + std::to_string(seed) + " " + condition + ": " +
              std::to_string(stats.successes) + "/" + std::to_string(stats.attempts));
        }
      }
    }
  }
  return out;
}

report::EvalReport RunExperiment(Matrix m, const ExperimentConfig& config,
                                 const trainer::Logger& log) {
  report::EvalReport r = RunModels(std::string(MatrixName(m)), MatrixModels(m, config), config, log);
  if (config.out_dir) report::WriteReport(r, *config.out_dir);
  return r;
}

}  // namespace pegbench::experiment

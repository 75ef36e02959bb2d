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

#include "pegbench/trainer.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pegbench/checkpoint.h"

namespace pegbench::trainer {

TrainConfig TrainConfig::DeskScale() {
  TrainConfig c;
  c.total_steps = 2000;
  c.rollout_every = 250;
  c.rollouts_per_eval = 10;
  c.seeds = 3;
  c.eval_n = 50;
  return c;
}

void TrainConfig::Validate() const {
  if (total_steps <= 0 || rollout_every <= 0 || total_steps % rollout_every != 0) {
    throw std::invalid_argument("rollout_every must be positive and divide total_steps");
  }
  if (batch <= 0 || rollouts_per_eval <= 0 || seeds <= 0 || eval_n <= 0) {
    throw std::invalid_argument("batch, rollouts_per_eval, seeds and eval_n must be positive");
  }
  if (!mask.vision && !mask.touch && !mask.proprio) {
    throw std::invalid_argument("mask must enable at least one modality");
  }
  encoder.Validate();
  sim.Validate();
}

nlohmann::json ToJson(const TrainConfig& c) {
  return {{"total_steps", c.total_steps},
          {"rollout_every", c.rollout_every},
          {"rollouts_per_eval", c.rollouts_per_eval},
          {"seeds", c.seeds},
          {"batch", c.batch},
          {"eval_n", c.eval_n},
          {"mask", model::MaskName(c.mask)},
          {"training_kinds", variations::FormatKinds(c.training_kinds)},
          {"selection_seed_base", c.selection_seed_base},
          {"adam",
           {{"lr", c.adam.lr}, {"beta1", c.adam.beta1}, {"beta2", c.adam.beta2}, {"eps", c.adam.eps}}},
          {"encoder", model::ToJson(c.encoder)},
          {"sim", sim::ToJson(c.sim)}};
}

TrainConfig TrainConfigFromJson(const nlohmann::json& j, const TrainConfig& base) {
  TrainConfig c = base;
  if (!j.is_object()) throw std::invalid_argument("train config must be a JSON object");
  auto get_int = [&j](const char* key, int& field) {
    if (j.contains(key)) field = j.at(key).get<int>();
  };
  get_int("total_steps", c.total_steps);
  get_int("rollout_every", c.rollout_every);
  get_int("rollouts_per_eval", c.rollouts_per_eval);
  get_int("seeds", c.seeds);
  get_int("batch", c.batch);
  get_int("eval_n", c.eval_n);
  if (j.contains("mask")) {
    const std::string name = j.at("mask").get<std::string>();
    const auto mask = model::MaskFromName(name);
    if (!mask) throw std::invalid_argument("unknown mask " + name);
    c.mask = *mask;
  }
  if (j.contains("training_kinds")) {
    c.training_kinds = variations::ParseKinds(j.at("training_kinds").get<std::string>());
  }
  if (j.contains("selection_seed_base")) {
    c.selection_seed_base = j.at("selection_seed_base").get<uint64_t>();
  }
  if (j.contains("adam")) {
    const auto& a = j.at("adam");
    c.adam.lr = a.value("lr", c.adam.lr);
    c.adam.beta1 = a.value("beta1", c.adam.beta1);
    c.adam.beta2 = a.value("beta2", c.adam.beta2);
    c.adam.eps = a.value("eps", c.adam.eps);
  }
  if (j.contains("encoder")) {
    nlohmann::json merged = model::ToJson(c.encoder);
    merged.update(j.at("encoder"));
    c.encoder = model::EncoderConfigFromJson(merged);
  }
  if (j.contains("sim")) {
    nlohmann::json merged = sim::ToJson(c.sim);
    merged.update(j.at("sim"));
    c.sim = sim::SimConfigFromJson(merged);
  }
  c.Validate();
  return c;
}

nlohmann::json ToJson(const LogEntry& e) {
  nlohmann::json j = {{"step", e.step}, {"loss", e.loss}};
  j["eval_success"] = e.eval_success ? nlohmann::json(*e.eval_success) : nlohmann::json(nullptr);
  return j;
}

TrainResult Train(const dataset::Dataset& data, const TrainConfig& config, uint64_t seed,
                  const Logger& log) {
  config.Validate();
  std::vector<const sensors::Observation*> obs;
  std::vector<sim::Action> targets;
  for (const auto& demo : data.demos) {
    for (size_t i = 0; i < demo.size(); ++i) {
      obs.push_back(&demo.observations[i]);
      targets.push_back(demo.actions[i]);
    }
  }
  if (obs.empty()) throw std::invalid_argument("training dataset is empty");

  TrainResult result;
  result.model = std::make_unique<model::PerceiverPolicy<float>>(config.encoder, seed);
  nd::Adam<float> adam(result.model->params(), config.adam);
  Rng rng = Rng::ForStream(seed, Stream::kShuffle);
  std::vector<size_t> order(obs.size());
  std::iota(order.begin(), order.end(), size_t{0});
  size_t cursor = order.size();

  EvalOptions selection;
  selection.kinds = config.training_kinds;
  selection.split = variations::Split::kTrain;
  selection.n = config.rollouts_per_eval;
  selection.seed_base = config.selection_seed_base;
  selection.sim = config.sim;

  std::vector<float> best;
  std::vector<const sensors::Observation*> batch_obs(config.batch);
  std::vector<sim::Action> batch_targets(config.batch);
  for (int step = 1; step <= config.total_steps; ++step) {
    for (int b = 0; b < config.batch; ++b) {
      if (cursor == order.size()) {
        for (size_t i = order.size() - 1; i > 0; --i) {
          std::swap(order[i], order[static_cast<size_t>(rng.UniformInt(static_cast<int>(i + 1)))]);
        }
        cursor = 0;
      }
      batch_obs[b] = obs[order[cursor]];
      batch_targets[b] = targets[order[cursor]];
      ++cursor;
    }
    LogEntry entry;
    entry.step = step;
    entry.loss = model::TrainStep(*result.model, adam, batch_obs, batch_targets, config.mask);
    result.losses.push_back(entry.loss);
    if (step % config.rollout_every == 0) {
      const double success = Evaluate(*result.model, config.mask, selection).success_rate();
      entry.eval_success = success;
      result.candidates.push_back({step, success});
      if (best.empty() || success >= result.selected_success) {
        best = checkpoint::Snapshot(result.model->params());
        result.selected_step = step;
        result.selected_success = success;
      }
      if (log) {
        log("step " + std::to_string(step) + " loss " + std::to_string(entry.loss) +
            " selection_success " + std::to_string(success));
      }
    }
    result.log.push_back(entry);
  }
  checkpoint::Restore(result.model->params(), best);
  return result;
}

nlohmann::json ToJson(const EvalStats& s) {
  return {{"attempts", s.attempts},
          {"successes", s.successes},
          {"horizon", s.horizon},
          {"force_torque", s.force_torque},
          {"success_rate", s.success_rate()}};
}

EvalStats EvalStatsFromJson(const nlohmann::json& j) {
  EvalStats s;
  s.attempts = j.at("attempts").get<int>();
  s.successes = j.at("successes").get<int>();
  s.horizon = j.at("horizon").get<int>();
  s.force_torque = j.at("force_torque").get<int>();
  if (s.successes + s.horizon + s.force_torque != s.attempts) {
    throw std::invalid_argument("eval stats outcomes do not sum to attempts");
  }
  return s;
}

EvalStats Evaluate(const std::function<std::unique_ptr<episode::Policy>()>& make_policy,
                   const EvalOptions& options) {
  if (options.n <= 0) throw std::invalid_argument("evaluation needs n > 0");
  EvalStats stats;
  episode::EpisodeOptions episode_options;
  episode_options.record_observations = false;
  episode_options.record_trace = false;
  for (int i = 0; i < options.n; ++i) {
    const uint64_t seed = options.seed_base + static_cast<uint64_t>(i);
    variations::VariationSpec spec;
    if (options.kinds.empty()) {
      spec = variations::CanonicalSpec();
      spec.seed = seed;
    } else {
      spec = variations::ComposeSpec(options.kinds, options.split, seed);
    }
    if (options.on_spec) options.on_spec(i, spec);
    std::unique_ptr<episode::Policy> policy = make_policy();
    if (options.on_episode) options.on_episode(i, *policy);
    const episode::EpisodeResult r = episode::RunEpisode(
        sim::InitEpisode(seed, spec, options.sim), *policy, options.sim, episode_options);
    ++stats.attempts;
    switch (r.final_info.failure) {
      case sim::Failure::kNone:
        if (!r.final_info.success) throw std::logic_error("episode ended without an outcome");
        ++stats.successes;
        break;
      case sim::Failure::kHorizonExceeded:
        ++stats.horizon;
        break;
      case sim::Failure::kForceTorqueExceeded:
        ++stats.force_torque;
        break;
    }
  }
  return stats;
}

EvalStats Evaluate(const model::PerceiverPolicy<float>& model, const model::ModalityMask& mask,
                   const EvalOptions& options) {
  return Evaluate([&]() { return std::make_unique<model::ModelPolicy>(model, mask); }, options);
}

std::vector<std::string> DefaultConditions() {
  std::vector<std::string> out = {"canonical"};
  for (variations::VariationKind k : variations::kAllKinds) {
    out.emplace_back(variations::KindName(k));
  }
  out.emplace_back("all");
  return out;
}

variations::KindSet ConditionKinds(const std::string& condition) {
  return variations::ParseKinds(condition);
}

std::optional<double> PctChange(double canonical_success, double variation_success) {
  if (canonical_success == 0.0) return std::nullopt;
  return (variation_success - canonical_success) / canonical_success;
}

std::optional<double> MeanPctChange(const std::vector<double>& canonical,
                                    const std::vector<double>& variation) {
  if (canonical.size() != variation.size()) {
    throw std::invalid_argument("per-seed success lists differ in length");
  }
  double sum = 0.0;
  int defined = 0;
  for (size_t i = 0; i < canonical.size(); ++i) {
    if (const auto c = PctChange(canonical[i], variation[i])) {
      sum += *c;
      ++defined;
    }
  }
  if (defined == 0) return std::nullopt;
  return sum / defined;
}

}  // namespace pegbench::trainer

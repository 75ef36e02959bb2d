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

// Command-line entry point: collect, augment, train, eval, experiment,
// replay and serve.
//
// Exit codes: 0 success, 1 usage, 2 data or format error, 3 runtime failure.
// PEGBENCH_SEED_OFFSET, when set, is added to every seed and logged.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pegbench/checkpoint.h"
#include "pegbench/dataset.h"
#include "pegbench/episode.h"
#include "pegbench/experiment.h"
#include "pegbench/report.h"
#include "pegbench/server.h"
#include "pegbench/session.h"
#include "pegbench/trainer.h"

namespace {

using namespace pegbench;
using nlohmann::json;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void Log(const std::string& line) { std::cerr << "[pegbench] " << line << std::endl; }

uint64_t SeedOffset() {
  const char* v = std::getenv("PEGBENCH_SEED_OFFSET");
  if (!v || !*v) return 0;
  char* end = nullptr;
  const unsigned long long off = std::strtoull(v, &end, 10);
  if (*end != '\0') throw UsageError("PEGBENCH_SEED_OFFSET must be a non-negative integer");
  return off;
}

json ReadJsonFile(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw dataset::IoError("cannot open config " + path);
  return json::parse(f);
}

void LogConfig(const std::string& command, const json& config) {
  Log(json{{"command", command}, {"seed_offset", SeedOffset()}, {"config", config}}.dump());
}

sim::SimConfig SimFromConfigFile(const std::string& path) {
  if (path.empty()) return {};
  const json j = ReadJsonFile(path);
  return j.contains("sim") ? sim::SimConfigFromJson(j.at("sim")) : sim::SimConfig{};
}

variations::Split ParseSplit(const std::string& name) {
  const auto s = variations::SplitFromName(name);
  if (!s) throw UsageError("unknown split " + name);
  return *s;
}

struct CollectArgs {
  std::string policy = "expert";
  int n = 50;
  uint64_t seed = 0;
  std::string out;
  std::string variations_list;
  std::string split = "train";
  std::string config;
};

int Collect(const CollectArgs& a) {
  if (a.policy != "expert") throw UsageError("only --policy expert can be collected headless");
  dataset::CollectOptions o;
  o.n = a.n;
  o.seed = a.seed + SeedOffset();
  o.kinds = variations::ParseKinds(a.variations_list);
  o.split = ParseSplit(a.split);
  const sim::SimConfig sim = SimFromConfigFile(a.config);
  LogConfig("collect", {{"policy", a.policy}, {"n", o.n}, {"seed", o.seed},
                        {"variations", variations::FormatKinds(o.kinds)}, {"split", a.split},
                        {"out", a.out}, {"sim", sim::ToJson(sim)}});
  dataset::CollectStats stats;
  const dataset::Dataset d = dataset::CollectExpert(o, sim, &stats);
  dataset::Save(d, a.out);
  Log("saved " + std::to_string(d.size()) + " demos (" + std::to_string(stats.failures) +
      " failed attempts skipped) to " + a.out);
  return static_cast<int>(d.size()) == o.n ? 0 : kExitRuntime;
}

struct AugmentArgs {
  std::string in, out, kinds = "base", mode = "replay", config;
  int per_demo = 6;
  uint64_t seed = 100000;
};

int Augment(const AugmentArgs& a) {
  if (a.mode != "replay" && a.mode != "offline") throw UsageError("--mode is replay or offline");
  const variations::KindSet kinds = variations::ParseKinds(a.kinds);
  const sim::SimConfig sim = SimFromConfigFile(a.config);
  const uint64_t seed = a.seed + SeedOffset();
  LogConfig("augment", {{"in", a.in}, {"out", a.out}, {"kinds", variations::FormatKinds(kinds)},
                        {"per_demo", a.per_demo}, {"mode", a.mode}, {"seed", seed},
                        {"sim", sim::ToJson(sim)}});
  const dataset::Dataset d = dataset::Load(a.in);
  dataset::AugmentStats stats;
  const dataset::Dataset out =
      dataset::AugmentDataset(d, kinds, a.per_demo, seed, sim, a.mode == "offline", &stats);
  dataset::Save(out, a.out);
  Log("wrote " + std::to_string(out.size()) + " demos; dropped " + std::to_string(stats.dropped) +
      " of " + std::to_string(stats.attempted) + " augmentations");
  return 0;
}

model::ModalityMask ParseMask(const std::string& name) {
  const auto m = model::MaskFromName(name);
  if (!m) throw UsageError("unknown mask " + name);
  return *m;
}

trainer::TrainConfig BaseTrainConfig(bool desk, const std::string& config_path) {
  trainer::TrainConfig c = desk ? trainer::TrainConfig::DeskScale() : trainer::TrainConfig{};
  if (!config_path.empty()) {
    json j = ReadJsonFile(config_path);
    if (j.contains("train")) j = j.at("train");
    c = trainer::TrainConfigFromJson(j, c);
  }
  return c;
}

struct TrainArgs {
  std::string data, mask, out, config, kinds;
  uint64_t seed = 0;
  bool desk = false;
};

int Train(const TrainArgs& a) {
  trainer::TrainConfig c = BaseTrainConfig(a.desk, a.config);
  if (!a.mask.empty()) c.mask = ParseMask(a.mask);
  const dataset::Dataset d = dataset::Load(a.data);
  if (!a.kinds.empty()) {
    c.training_kinds = variations::ParseKinds(a.kinds);
  } else {
    // selection rollouts follow the variation kinds present in the data
    for (const auto& demo : d.demos) c.training_kinds.insert(demo.meta.spec.active.begin(),
                                                             demo.meta.spec.active.end());
  }
  const uint64_t seed = a.seed + SeedOffset();
  LogConfig("train", {{"data", a.data}, {"seed", seed}, {"out", a.out}, {"train", trainer::ToJson(c)}});
  const trainer::TrainResult r = trainer::Train(d, c, seed, Log);
  std::filesystem::create_directories(a.out);
  checkpoint::Save(std::filesystem::path(a.out) / "checkpoint.pgnn", *r.model, c.mask,
                   {{"seed", seed}, {"step", r.selected_step}, {"mask", model::MaskName(c.mask)}});
  std::string log_text;
  for (const auto& e : r.log) log_text += trainer::ToJson(e).dump() + "\n";
  report::WriteTextFile(std::filesystem::path(a.out) / "training_log.jsonl", log_text);
  Log("selected step " + std::to_string(r.selected_step) + " with selection success " +
      std::to_string(r.selected_success));
  return 0;
}

struct EvalArgs {
  std::string checkpoint, conditions = "canonical,grasp,shape,body,scene,camera,noise,all",
                          split = "eval", out, config;
  int n = 50;
  uint64_t seed_base = 1000000;
};

int Eval(const EvalArgs& a) {
  const checkpoint::LoadedCheckpoint ck = checkpoint::Load(a.checkpoint);
  const variations::Split split = ParseSplit(a.split);
  if (split == variations::Split::kCanonical) throw UsageError("--split is train or eval");
  std::vector<std::string> conditions;
  std::stringstream ss(a.conditions);
  for (std::string item; std::getline(ss, item, ',');) {
    trainer::ConditionKinds(item);
    conditions.push_back(item);
  }
  const sim::SimConfig sim = SimFromConfigFile(a.config);
  const uint64_t seed_base = a.seed_base + SeedOffset();
  const int seed = ck.extra.value("seed", 0);
  LogConfig("eval", {{"checkpoint", a.checkpoint}, {"conditions", conditions}, {"split", a.split},
                     {"n", a.n}, {"seed_base", seed_base}, {"out", a.out},
                     {"mask", model::MaskName(ck.mask)}, {"sim", sim::ToJson(sim)}});
  report::EvalReport rep;
  rep.matrix = "eval";
  rep.config = {{"checkpoint", a.checkpoint}, {"split", a.split}, {"n", a.n}, {"seed_base", seed_base}};
  const std::filesystem::path out(a.out);
  std::filesystem::create_directories(out / "attention");
  for (const std::string& cond : conditions) {
    trainer::EvalOptions eo;
    eo.kinds = trainer::ConditionKinds(cond);
    eo.split = split;
    eo.n = a.n;
    eo.seed_base = seed_base;
    eo.sim = sim;
    std::ofstream attention(out / "attention" / (cond + ".jsonl"));
    eo.on_episode = [&](int i, episode::Policy& p) {
      auto* mp = dynamic_cast<model::ModelPolicy*>(&p);
      if (i != 0 || !mp) return;
      mp->on_attention = [&attention, step = 0](const model::AttentionSummary& s) mutable {
        attention << model::ToJson(s, step++).dump() << '\n';
      };
    };
    const trainer::EvalStats st = trainer::Evaluate(*ck.model, ck.mask, eo);
    rep.rows.push_back({ck.extra.value("model", std::string("checkpoint")), cond, seed, st});
    Log(cond + ": " + std::to_string(st.successes) + "/" + std::to_string(st.attempts) +
        " (horizon " + std::to_string(st.horizon) + ", force_torque " +
        std::to_string(st.force_torque) + ")");
  }
  report::WriteReport(rep, out);
  std::cout << report::ToMarkdown(rep);
  return 0;
}

struct ExperimentArgs {
  std::string matrix, out, config;
  bool desk = false;
};

int Experiment(const ExperimentArgs& a) {
  const auto m = experiment::MatrixFromName(a.matrix);
  if (!m) throw UsageError("unknown matrix " + a.matrix);
  experiment::ExperimentConfig c;
  c.train = a.desk ? trainer::TrainConfig::DeskScale() : trainer::TrainConfig{};
  if (!a.config.empty()) c = experiment::ExperimentConfigFromJson(ReadJsonFile(a.config), c);
  c.seed_offset += SeedOffset();
  c.out_dir = a.out;
  LogConfig("experiment", {{"matrix", a.matrix}, {"out", a.out}, {"experiment", experiment::ToJson(c)}});
  const report::EvalReport r = experiment::RunExperiment(*m, c, Log);
  std::cout << report::ToMarkdown(r);
  return 0;
}

struct ReplayArgs {
  std::string demo, out, config;
  bool trace = false;
};

int Replay(const ReplayArgs& a) {
  const dataset::Demonstration demo = dataset::LoadDemo(a.demo);
  const sim::SimConfig sim = SimFromConfigFile(a.config);
  LogConfig("replay", {{"demo", a.demo}, {"trace", a.trace}, {"out", a.out}, {"sim", sim::ToJson(sim)}});
  episode::ScriptedPolicy policy(demo.actions);
  episode::EpisodeOptions opts;
  opts.max_actions = static_cast<int>(demo.size());
  const auto& meta = demo.meta;
  const episode::EpisodeResult r = episode::RunEpisode(
      sim::InitEpisodeAt(meta.seed, meta.spec, meta.initial_offset, sim), policy, sim, opts);
  const bool identical = meta.step_variations.empty() && r.observations == demo.observations;
  if (a.trace) {
    const std::string text = episode::TraceJsonl(r.trace);
    if (a.out.empty()) {
      std::cout << text;
    } else {
      report::WriteTextFile(a.out, text);
    }
  }
  const json summary = {{"id", meta.id},
                        {"recorded_steps", demo.size()},
                        {"replayed_steps", r.steps},
                        {"success", r.success()},
                        {"failure", sim::FailureName(r.final_info.failure)},
                        {"observations_identical", identical}};
  Log(summary.dump());
  if (!a.trace) std::cout << summary.dump() << '\n';
  return r.success() && r.steps == static_cast<int>(demo.size()) ? 0 : kExitRuntime;
}

struct ServeArgs {
  uint16_t port = 8765;
  std::string mode = "teleop", address = "127.0.0.1", data = "teleop_data", static_dir, checkpoint,
              config;
  uint64_t seed = 0;
};

int Serve(const ServeArgs& a) {
  session::SessionConfig sc;
  const auto mode = session::ModeFromName(a.mode);
  if (!mode) throw UsageError("--mode is teleop or replay");
  sc.mode = *mode;
  sc.sim = SimFromConfigFile(a.config);
  sc.data_dir = a.data;
  sc.first_seed = a.seed + SeedOffset();
  if (!a.checkpoint.empty()) sc.checkpoint = a.checkpoint;
  LogConfig("serve", {{"port", a.port}, {"address", a.address}, {"mode", a.mode},
                      {"data", a.data}, {"static", a.static_dir}, {"checkpoint", a.checkpoint},
                      {"first_seed", sc.first_seed}, {"sim", sim::ToJson(sc.sim)}});
  session::TeleopSession s(sc);
  server::ServerConfig cfg;
  cfg.address = a.address;
  cfg.port = a.port;
  if (!a.static_dir.empty()) cfg.static_dir = a.static_dir;
  server::Server srv(cfg, s);
  srv.log = Log;
  srv.Run();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pegbench: multisensory peg-in-hole robustness pipeline"};
  app.require_subcommand(1);

  CollectArgs ca;
  auto* collect = app.add_subcommand("collect", "record demonstrations");
  collect->add_option("--policy", ca.policy, "demonstrator (expert)");
  collect->add_option("--n", ca.n, "number of demonstrations")->check(CLI::PositiveNumber);
  collect->add_option("--seed", ca.seed, "first episode seed");
  collect->add_option("--out", ca.out, "output dataset directory")->required();
  collect->add_option("--variations", ca.variations_list, "variation kinds (default canonical)");
  collect->add_option("--split", ca.split, "train or eval instances");
  collect->add_option("--config", ca.config, "JSON config file");

  AugmentArgs aa;
  auto* augment = app.add_subcommand("augment", "expand a dataset by replay augmentation");
  augment->add_option("--in", aa.in, "input dataset directory")->required();
  augment->add_option("--out", aa.out, "output dataset directory")->required();
  augment->add_option("--kinds", aa.kinds, "variation kinds");
  augment->add_option("--per-demo", aa.per_demo, "augmentations per demonstration")
      ->check(CLI::PositiveNumber);
  augment->add_option("--mode", aa.mode, "replay or offline");
  augment->add_option("--seed", aa.seed, "base seed for sampled instances");
  augment->add_option("--config", aa.config, "JSON config file");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "behavior cloning with checkpoint selection");
  train->add_option("--data", ta.data, "dataset directory")->required();
  train->add_option("--mask", ta.mask, "modality mask");
  train->add_option("--seed", ta.seed, "training seed");
  train->add_option("--config", ta.config, "JSON config file");
  train->add_option("--out", ta.out, "output directory")->required();
  train->add_option("--kinds", ta.kinds, "selection-rollout kinds (default: from data)");
  train->add_flag("--desk-scale", ta.desk, "desk-scale step counts");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint per condition");
  eval->add_option("--checkpoint", ea.checkpoint, "checkpoint file")->required();
  eval->add_option("--conditions", ea.conditions, "comma-separated conditions");
  eval->add_option("--split", ea.split, "eval or train");
  eval->add_option("--n", ea.n, "episodes per condition")->check(CLI::PositiveNumber);
  eval->add_option("--seed-base", ea.seed_base, "first episode seed");
  eval->add_option("--out", ea.out, "report directory")->required();
  eval->add_option("--config", ea.config, "JSON config file");

  ExperimentArgs xa;
  auto* exp = app.add_subcommand("experiment", "run an experiment matrix");
  exp->add_option("--matrix", xa.matrix, "difficulty|training-sets|aug-sweep|ablation")->required();
  exp->add_flag("--desk-scale", xa.desk, "desk-scale step counts");
  exp->add_option("--out", xa.out, "report directory")->required();
  exp->add_option("--config", xa.config, "JSON config file");

  ReplayArgs ra;
  auto* replay = app.add_subcommand("replay", "re-simulate a recorded demonstration");
  replay->add_option("--demo", ra.demo, "demo file")->required();
  replay->add_flag("--trace", ra.trace, "print the step trace as JSON lines");
  replay->add_option("--out", ra.out, "write the trace here instead of stdout");
  replay->add_option("--config", ra.config, "JSON config file");

  ServeArgs sa;
  auto* serve = app.add_subcommand("serve", "WebSocket session endpoint for the UI");
  serve->add_option("--port", sa.port, "TCP port");
  serve->add_option("--address", sa.address, "bind address");
  serve->add_option("--mode", sa.mode, "teleop or replay");
  serve->add_option("--data", sa.data, "dataset directory");
  serve->add_option("--static", sa.static_dir, "static asset directory");
  serve->add_option("--checkpoint", sa.checkpoint, "model for attention overlays");
  serve->add_option("--seed", sa.seed, "first episode seed");
  serve->add_option("--config", sa.config, "JSON config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*collect) return Collect(ca);
    if (*augment) return Augment(aa);
    if (*train) return Train(ta);
    if (*eval) return Eval(ea);
    if (*exp) return Experiment(xa);
    if (*replay) return Replay(ra);
    if (*serve) return Serve(sa);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const dataset::FormatError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const dataset::IoError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const checkpoint::CheckpointFormatError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const json::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

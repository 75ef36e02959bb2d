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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "gtest/gtest.h"
#include "json.hpp"
#include "pegbench/checkpoint.h"
#include "pegbench/dataset.h"

namespace pegbench {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code = -1;
  std::string out;
};

// runs the cli with stderr discarded
Result RunCli(const std::string& args) {
  const std::string cmd = std::string(PEGBENCH_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  for (size_t n; (n = fread(buf, 1, sizeof(buf), p)) > 0;) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pegbench_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string P(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(RunCli("--help").code, 0);
  EXPECT_EQ(RunCli("collect --bogus").code, 1);
  EXPECT_EQ(RunCli("collect").code, 1);  // --out is required
  EXPECT_EQ(RunCli("experiment --matrix nope --out " + P("x")).code, 1);
  EXPECT_EQ(RunCli("train --data " + P("d") + " --mask nope --out " + P("t")).code, 1);
  EXPECT_EQ(RunCli("augment --in " + P("d") + " --out " + P("e") + " --mode magic").code, 1);
}

TEST_F(CliTest, MissingDataIsExitTwo) {
  EXPECT_EQ(RunCli("replay --demo " + P("missing.demo")).code, 2);
  EXPECT_EQ(RunCli("augment --in " + P("missing") + " --out " + P("out")).code, 2);
  EXPECT_EQ(RunCli("eval --checkpoint " + P("missing.pgnn") + " --out " + P("r")).code, 2);
}

TEST_F(CliTest, CollectAugmentReplay) {
  ASSERT_EQ(RunCli("collect --policy expert --n 2 --seed 10 --out " + P("data")).code, 0);
  const json manifest = json::parse(std::ifstream(dir_ / "data" / "manifest.json"));
  EXPECT_EQ(manifest.at("count"), 2);
  const dataset::Dataset d = dataset::Load(dir_ / "data");
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.demos[0].meta.seed, 10u);

  ASSERT_EQ(RunCli("augment --in " + P("data") + " --out " + P("aug") + " --kinds grasp --per-demo 2").code, 0);
  // grasp replays never drop
  EXPECT_EQ(dataset::Load(dir_ / "aug").size(), 6u);

  const std::string demo_file = (dir_ / "data" / manifest.at("demos")[0].at("file").get<std::string>()).string();
  const Result r = RunCli("replay --demo " + demo_file);
  ASSERT_EQ(r.code, 0);
  const json summary = json::parse(r.out);
  EXPECT_EQ(summary.at("success"), true);
  EXPECT_EQ(summary.at("observations_identical"), true);
  EXPECT_EQ(summary.at("replayed_steps"), summary.at("recorded_steps"));

  const Result trace = RunCli("replay --trace --demo " + demo_file);
  ASSERT_EQ(trace.code, 0);
  EXPECT_EQ(static_cast<int>(std::count(trace.out.begin(), trace.out.end(), '\n')),
            summary.at("replayed_steps").get<int>());
}

TEST_F(CliTest, TrainAndEvaluateSmallModel) {
  ASSERT_EQ(RunCli("collect --n 2 --out " + P("data")).code, 0);
  const json cfg = {{"train",
                     {{"total_steps", 10},
                      {"rollout_every", 5},
                      {"rollouts_per_eval", 1},
                      {"batch", 4},
                      {"encoder",
                       {{"n_latents", 2}, {"latent_dim", 8}, {"token_dim", 8}, {"self_attn_layers", 1},
                        {"heads", 2}, {"mlp_hidden", 8}, {"z_vt_dim", 6}, {"z_p_dim", 4}, {"patch", 42},
                        {"proprio_hidden", 4}, {"policy_hidden", 8}}},
                      {"sim", {{"horizon", 40}}}}},
                    {"sim", {{"horizon", 40}}}};
  std::ofstream(dir_ / "cfg.json") << cfg.dump();
  ASSERT_EQ(RunCli("train --data " + P("data") + " --mask no-touch --seed 3 --config " + P("cfg.json") +
                " --out " + P("model")).code,
            0);
  const checkpoint::LoadedCheckpoint ck = checkpoint::Load(dir_ / "model" / "checkpoint.pgnn");
  EXPECT_EQ(model::MaskName(ck.mask), "no-touch");
  EXPECT_EQ(ck.extra.at("seed"), 3);
  EXPECT_TRUE(fs::exists(dir_ / "model" / "training_log.jsonl"));

  const Result e = RunCli("eval --checkpoint " + P("model/checkpoint.pgnn") +
                       " --conditions canonical,grasp --n 2 --config " + P("cfg.json") + " --out " +
                       P("report"));
  ASSERT_EQ(e.code, 0);
  EXPECT_NE(e.out.find("| checkpoint | grasp |"), std::string::npos);
  const json results = json::parse(std::ifstream(dir_ / "report" / "results.json"));
  ASSERT_EQ(results.at("rows").size(), 2u);
  EXPECT_EQ(results.at("rows")[1].at("stats").at("attempts"), 2);
  EXPECT_TRUE(fs::exists(dir_ / "report" / "attention" / "grasp.jsonl"));
}

}  // namespace
}  // namespace pegbench

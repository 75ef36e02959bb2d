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

#include "pegbench/dataset.h"

#include <filesystem>
#include <fstream>
#include <string>

#include "gtest/gtest.h"
#include "pegbench/episode.h"
#include "pegbench/expert.h"
#include "pegbench/variations.h"

namespace pegbench::dataset {
namespace {

namespace fs = std::filesystem;
using variations::CanonicalSpec;
using variations::VariationKind;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("pegbench_dataset_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

Demonstration ExpertDemo(uint64_t seed) {
  expert::ExpertPolicy expert;
  return RecordDemo(expert, CanonicalSpec(), seed, {}, Source::kExpert,
                    "demo_" + std::to_string(seed));
}

TEST(RecordDemo, ReplayedActionsReproduceObservations) {
  const Demonstration d = ExpertDemo(3);
  ASSERT_GE(d.size(), 1u);
  EXPECT_EQ(d.observations.size(), d.actions.size());
  EXPECT_EQ(d.meta.source, Source::kExpert);
  EXPECT_EQ(d.meta.initial_offset, sim::SampleInitialOffset(3));
  episode::ScriptedPolicy scripted(d.actions);
  const auto r = episode::RunEpisode(sim::InitEpisode(d.meta.seed, d.meta.spec), scripted, {});
  EXPECT_TRUE(r.success());
  EXPECT_EQ(r.observations, d.observations);
}

TEST(RecordDemo, FailureThrowsWithCause) {
  episode::ConstantPolicy idle;
  try {
    RecordDemo(idle, CanonicalSpec(), 0, {}, Source::kPolicy, "idle");
    FAIL() << "expected EpisodeFailedError";
  } catch (const EpisodeFailedError& e) {
    EXPECT_EQ(e.cause(), sim::Failure::kHorizonExceeded);
  }
  const Demonstration kept = RecordDemo(idle, CanonicalSpec(), 0, {}, Source::kPolicy, "idle", false);
  EXPECT_EQ(kept.size(), 200u);
}

TEST(CollectExpert, FiftyDemos) {
  CollectStats stats;
  const Dataset d = CollectExpert({.n = 50}, {}, &stats);
  EXPECT_EQ(d.size(), 50u);
  EXPECT_EQ(stats.attempts - stats.failures, 50);
  for (const auto& demo : d.demos) EXPECT_TRUE(demo.meta.spec.active.empty());
}

TEST(ReplayAugment, EmptyKindsIsIdentity) {
  const Demonstration d = ExpertDemo(4);
  AugmentStats stats;
  const auto out = ReplayAugment(d, {}, 1, 10, {}, &stats);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(stats.dropped, 0);
  EXPECT_EQ(out[0].observations, d.observations);
  EXPECT_EQ(out[0].actions, d.actions);
  EXPECT_EQ(out[0].meta.parent_id, d.meta.id);
  EXPECT_EQ(out[0].meta.source, Source::kReplay);
}

TEST(ReplayAugment, ActionsPreservedAndSpecsDiffer) {
  const Demonstration d = ExpertDemo(5);
  AugmentStats stats;
  const auto out = ReplayAugment(d, variations::kBaseKinds, 6, 100, {}, &stats);
  EXPECT_EQ(stats.attempted, 6);
  EXPECT_EQ(static_cast<int>(out.size()) + stats.dropped, 6);
  for (size_t i = 0; i < out.size(); ++i) {
    const auto& r = out[i];
    ASSERT_LE(r.actions.size(), d.actions.size());
    // a prefix of the parent's actions
    EXPECT_TRUE(std::equal(r.actions.begin(), r.actions.end(), d.actions.begin()));
    EXPECT_EQ(r.meta.spec.split, variations::Split::kTrain);
    EXPECT_TRUE(r.meta.step_variations.empty());
    for (size_t s = 0; s < r.size(); ++s) EXPECT_EQ(SpecAtStep(r, s), r.meta.spec);
    for (size_t j = 0; j < i; ++j) EXPECT_NE(r.meta.spec.instances, out[j].meta.spec.instances);
  }
}

TEST(ReplayAugment, GraspOnlyNeverDrops) {
  AugmentStats stats;
  for (uint64_t seed = 0; seed < 5; ++seed) {
    ReplayAugment(ExpertDemo(seed), {VariationKind::kGraspPose}, 6, seed * 6, {}, &stats);
  }
  EXPECT_EQ(stats.attempted, 30);
  EXPECT_EQ(stats.dropped, 0);
}

TEST(ReplayAugment, RejectsBadInput) {
  Demonstration d = ExpertDemo(1);
  EXPECT_THROW(ReplayAugment(d, {}, 0, 0, {}), std::invalid_argument);
  d.meta.source = Source::kReplay;
  EXPECT_THROW(ReplayAugment(d, {}, 1, 0, {}), std::invalid_argument);
}

TEST(AugmentDataset, CountsParentsPlusReplays) {
  const Dataset base = CollectExpert({.n = 5}, {});
  AugmentStats stats;
  const Dataset aug = AugmentDataset(base, variations::kBaseKinds, 6, 1000, {}, false, &stats);
  EXPECT_EQ(stats.attempted, 30);
  EXPECT_EQ(aug.size() + stats.dropped, 35u);
  for (size_t i = 0; i < base.size(); ++i) EXPECT_EQ(aug.demos[i], base.demos[i]);
}

TEST(OfflineStyleAugment, NeutralSettingsAreIdentity) {
  const Demonstration d = ExpertDemo(6);
  OfflineConfig neutral;
  neutral.visual_kinds = {};
  neutral.unit_scale = true;
  neutral.noise = {};
  const auto out = OfflineStyleAugment(d, 1, 0, {}, neutral);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].observations, d.observations);
  EXPECT_EQ(out[0].actions, d.actions);
}

TEST(OfflineStyleAugment, PerFrameVariation) {
  const Demonstration d = ExpertDemo(7);
  OfflineConfig no_noise;
  no_noise.noise = {};
  const auto out = OfflineStyleAugment(d, 400, 0, {}, no_noise);
  double sum = 0.0;
  long n = 0;
  long pairs = 0, texture_changes = 0;
  for (const auto& r : out) {
    EXPECT_EQ(r.actions, d.actions);
    ASSERT_EQ(r.meta.step_variations.size(), r.size());
    for (size_t s = 0; s < r.size(); ++s) {
      const float scale = r.meta.step_variations[s].ft_scale;
      ASSERT_GE(scale, 0.1f);
      ASSERT_LE(scale, 2.0f);
      sum += scale;
      ++n;
      if (s > 0) {
        ++pairs;
        texture_changes += r.meta.step_variations[s].appearance.floor_texture !=
                           r.meta.step_variations[s - 1].appearance.floor_texture;
      }
    }
    // visual instances vary within one demo
    EXPECT_NE(SpecAtStep(r, 0), SpecAtStep(r, 1));
  }
  ASSERT_GT(n, 5000);
  // mean of U(0.1, 2.0)
  EXPECT_NEAR(sum / n / 1.05, 1.0, 0.02);
  EXPECT_GE(static_cast<double>(texture_changes) / pairs, 1.0 - 1.0 / 6.0 - 0.03);
}

TEST(OfflineStyleAugment, ScalesFt) {
  const Demonstration d = ExpertDemo(8);
  OfflineConfig c;
  c.visual_kinds = {};
  c.noise = {};
  const auto out = OfflineStyleAugment(d, 1, 3, {}, c);
  ASSERT_EQ(out.size(), 1u);
  for (size_t s = 0; s < out[0].size(); ++s) {
    const float k = out[0].meta.step_variations[s].ft_scale;
    for (size_t i = 0; i < d.observations[s].ft.data.size(); ++i) {
      EXPECT_EQ(out[0].observations[s].ft.data[i], d.observations[s].ft.data[i] * k);
    }
  }
}

TEST(Merge, UnionAndDuplicates) {
  const Dataset a = CollectExpert({.n = 2}, {});
  EXPECT_EQ(Merge(a, {}), a);
  EXPECT_THROW(Merge(a, a), DuplicateIdError);
  Dataset b = a;
  for (auto& d : b.demos) d.meta.id += "_b";
  const Dataset m = Merge(a, b);
  ASSERT_EQ(m.size(), 4u);
  EXPECT_EQ(m.demos[0], a.demos[0]);
  EXPECT_EQ(m.demos[2], b.demos[0]);
}

TEST(SaveLoad, RoundTripIsExact) {
  TempDir dir;
  Dataset d = CollectExpert({.n = 5}, {});
  const auto off = OfflineStyleAugment(d.demos[0], 1, 0, {});
  d.demos.push_back(off[0]);
  Save(d, dir.path());
  EXPECT_EQ(Load(dir.path()), d);
  const auto manifest = nlohmann::json::parse(std::ifstream(dir.path() / "manifest.json"));
  EXPECT_EQ(manifest.at("count"), 6);
}

TEST(SaveLoad, TruncatedDemoIsFormatError) {
  TempDir dir;
  const Dataset d = CollectExpert({.n = 1}, {});
  Save(d, dir.path());
  const fs::path file = dir.path() / "demos" / (d.demos[0].meta.id + ".demo");
  fs::resize_file(file, fs::file_size(file) - 100);
  EXPECT_THROW(Load(dir.path()), FormatError);
  fs::resize_file(file, 2);
  EXPECT_THROW(Load(dir.path()), FormatError);
}

TEST(SaveLoad, VersionBumpIsFormatError) {
  TempDir dir;
  Save(CollectExpert({.n = 1}, {}), dir.path());
  auto manifest = nlohmann::json::parse(std::ifstream(dir.path() / "manifest.json"));
  manifest["version"] = kFormatVersion + 1;
  std::ofstream(dir.path() / "manifest.json") << manifest.dump();
  try {
    Load(dir.path());
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }
}

TEST(SaveLoad, MissingDirIsIoError) {
  EXPECT_THROW(Load("/nonexistent/pegbench/data"), IoError);
}

TEST(Meta, JsonRoundTrip) {
  DemoMeta m;
  m.id = "x_r1";
  m.seed = 12;
  m.spec = variations::ComposeSpec(variations::kBaseKinds, variations::Split::kTrain, 4);
  m.initial_offset = {-17.25, 22.5};
  m.source = Source::kReplay;
  m.parent_id = "x";
  EXPECT_EQ(MetaFromJson(MetaToJson(m)), m);
}

TEST(Episode, TraceJsonlHasOneLinePerStep) {
  expert::ExpertPolicy expert;
  const auto r = episode::RunEpisode(sim::InitEpisode(2, CanonicalSpec()), expert, {});
  const std::string text = episode::TraceJsonl(r.trace);
  EXPECT_EQ(static_cast<int>(std::count(text.begin(), text.end(), '\n')), r.steps);
  EXPECT_EQ(static_cast<int>(r.trace.size()), r.steps);
  const auto first = nlohmann::json::parse(text.substr(0, text.find('\n')));
  EXPECT_EQ(first.at("step"), 0);
}

TEST(Episode, FirstObservationIsPrefilled) {
  episode::ConstantPolicy idle;
  const sim::WorldState s = sim::InitEpisode(2, CanonicalSpec());
  episode::EpisodeOptions opts;
  opts.max_actions = 1;
  const auto r = episode::RunEpisode(s, idle, {}, opts);
  ASSERT_EQ(r.observations.size(), 1u);
  EXPECT_EQ(r.observations[0].ft, sensors::PrefilledHistory(s.last_wrench_moving, s.last_wrench_compliant));
}

}  // namespace
}  // namespace pegbench::dataset

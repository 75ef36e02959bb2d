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

#ifndef PEGBENCH_DATASET_H_
#define PEGBENCH_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pegbench/episode.h"
#include "pegbench/sensors.h"
#include "pegbench/sim.h"
#include "pegbench/variations.h"

namespace pegbench::dataset {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DuplicateIdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class EpisodeFailedError : public std::runtime_error {
 public:
  EpisodeFailedError(sim::Failure cause, int steps);
  sim::Failure cause() const { return cause_; }

 private:
  sim::Failure cause_;
};

enum class Source { kExpert, kTeleop, kReplay, kOffline, kPolicy };
std::string_view SourceName(Source source);
std::optional<Source> SourceFromName(std::string_view name);

// Per-step visual instances, recorded only when they vary within a demo.
struct StepVariation {
  variations::SceneAppearanceInstance appearance;
  std::array<variations::CameraPoseInstance, 2> cameras;
  float ft_scale = 1.0f;
  bool operator==(const StepVariation&) const = default;
};

struct DemoMeta {
  std::string id;
  uint64_t seed = 0;
  variations::VariationSpec spec;
  geom::Vec2 initial_offset;
  Source source = Source::kExpert;
  std::optional<std::string> parent_id;
  std::vector<StepVariation> step_variations;  // empty: `spec` holds at every step
  bool operator==(const DemoMeta&) const = default;
};

struct Demonstration {
  DemoMeta meta;
  std::vector<sensors::Observation> observations;
  std::vector<sim::Action> actions;
  size_t size() const { return actions.size(); }
  bool operator==(const Demonstration&) const = default;
};

// Effective spec for step `i`: meta.spec with any per-step visual instances
// substituted.
variations::VariationSpec SpecAtStep(const Demonstration& demo, size_t i);

struct Dataset {
  std::vector<Demonstration> demos;
  size_t size() const { return demos.size(); }
  size_t total_steps() const;
  bool operator==(const Dataset&) const = default;
};

nlohmann::json MetaToJson(const DemoMeta& meta);
DemoMeta MetaFromJson(const nlohmann::json& j);

// Rolls one episode with `policy`. With require_success, a failed episode
// throws EpisodeFailedError.
Demonstration RecordDemo(episode::Policy& policy, const variations::VariationSpec& spec,
                         uint64_t seed, const sim::SimConfig& config, Source source,
                         std::string id, bool require_success = true);

struct CollectOptions {
  int n = 50;
  uint64_t seed = 0;
  variations::KindSet kinds;  // empty: canonical
  variations::Split split = variations::Split::kTrain;
  int max_attempts = 0;  // 0 means 4 * n
};

struct CollectStats {
  int attempts = 0;
  int failures = 0;
};

// Expert demonstrations; failed episodes are skipped and counted. Episode
// seeds are seed, seed + 1, ... in attempt order.
Dataset CollectExpert(const CollectOptions& options, const sim::SimConfig& config,
                      CollectStats* stats = nullptr);

struct AugmentStats {
  int attempted = 0;
  int dropped = 0;
};

// T replays of `demo`'s actions from its initial offset, replay t using
// ComposeSpec(kinds, Train, base_seed + t). Replays that do not succeed
// within the recorded actions are dropped. A replay that succeeds early is
// truncated at success, so its actions are a prefix of the parent's.
std::vector<Demonstration> ReplayAugment(const Demonstration& demo,
                                         const variations::KindSet& kinds, int T,
                                         uint64_t base_seed, const sim::SimConfig& config,
                                         AugmentStats* stats = nullptr,
                                         const variations::VariationConfig& vconfig = {});

struct OfflineConfig {
  variations::KindSet visual_kinds = {variations::VariationKind::kSceneAppearance,
                                      variations::VariationKind::kCameraPose};
  double scale_min = 0.1;
  double scale_max = 2.0;
  bool unit_scale = false;
  variations::SensorNoiseInstance noise = variations::DefaultSensorNoise();
};

// Per-frame visual resampling, FT scaling and sensor noise on top of the
// parent's own spec; actions are the parent's.
std::vector<Demonstration> OfflineStyleAugment(const Demonstration& demo, int T,
                                               uint64_t base_seed, const sim::SimConfig& config,
                                               const OfflineConfig& offline = {},
                                               AugmentStats* stats = nullptr);

// Original demos followed by T augmentations of each.
Dataset AugmentDataset(const Dataset& data, const variations::KindSet& kinds, int T,
                       uint64_t base_seed, const sim::SimConfig& config, bool offline,
                       AugmentStats* stats = nullptr);

// d1's demos followed by d2's. Throws DuplicateIdError on id collisions.
Dataset Merge(const Dataset& d1, const Dataset& d2);

// Directory layout: manifest.json plus demos/<id>.demo. Each demo file is a
// 4-byte little-endian header length, a UTF-8 JSON header and raw
// little-endian tensors.
void Save(const Dataset& data, const std::filesystem::path& dir);
Dataset Load(const std::filesystem::path& dir);

void SaveDemo(const Demonstration& demo, const std::filesystem::path& file);
Demonstration LoadDemo(const std::filesystem::path& file);

inline constexpr int kFormatVersion = 1;

}  // namespace pegbench::dataset

#endif  // PEGBENCH_DATASET_H_

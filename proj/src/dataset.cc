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

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "pegbench/expert.h"
#include "pegbench/rng.h"

namespace pegbench::dataset {
namespace {

constexpr std::string_view kDemoMagic = "pegbench.demo";
constexpr std::string_view kManifestFormat = "pegbench.dataset";

template <typename T>
void AppendLittleEndian(std::string& buf, const T* data, size_t n) {
  const size_t start = buf.size();
  buf.resize(start + n * sizeof(T));
  std::memcpy(buf.data() + start, data, n * sizeof(T));
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    for (size_t i = 0; i < n; ++i) {
      std::reverse(buf.begin() + start + i * sizeof(T), buf.begin() + start + (i + 1) * sizeof(T));
    }
  }
}

template <typename T>
void ReadLittleEndian(const char* src, T* out, size_t n) {
  std::memcpy(out, src, n * sizeof(T));
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    auto* bytes = reinterpret_cast<char*>(out);
    for (size_t i = 0; i < n; ++i) std::reverse(bytes + i * sizeof(T), bytes + (i + 1) * sizeof(T));
  }
}

void CheckId(const std::string& id) {
  const bool ok = !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
  if (!ok) throw std::invalid_argument("demo id must be non-empty [A-Za-z0-9_-]: " + id);
}

std::string ReadFile(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + file.string());
  return ss.str();
}

void WriteFile(const std::filesystem::path& file, std::string_view bytes) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing " + file.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + file.string());
}

nlohmann::json StepVariationJson(const StepVariation& v) {
  return {{"appearance", variations::ToJson(v.appearance)},
          {"cameras", {variations::ToJson(v.cameras[0]), variations::ToJson(v.cameras[1])}},
          {"ft_scale", v.ft_scale}};
}

StepVariation StepVariationFromJson(const nlohmann::json& j) {
  StepVariation v;
  v.appearance = variations::AppearanceFromJson(j.at("appearance"));
  v.cameras[0] = variations::CameraFromJson(j.at("cameras").at(0));
  v.cameras[1] = variations::CameraFromJson(j.at("cameras").at(1));
  v.ft_scale = j.at("ft_scale").get<float>();
  return v;
}

Demonstration FromEpisode(episode::EpisodeResult&& r, DemoMeta meta) {
  Demonstration d;
  d.meta = std::move(meta);
  d.meta.initial_offset = r.initial_offset;
  d.observations = std::move(r.observations);
  d.actions = std::move(r.actions);
  return d;
}

void RequireReplayable(const Demonstration& demo, int T) {
  if (demo.meta.source != Source::kExpert && demo.meta.source != Source::kTeleop) {
    throw std::invalid_argument("only expert or teleop demonstrations can be augmented");
  }
  if (T < 1) throw std::invalid_argument("augmentation count must be at least 1");
  if (demo.actions.empty()) throw std::invalid_argument("demonstration has no steps");
}

}  // namespace

EpisodeFailedError::EpisodeFailedError(sim::Failure cause, int steps)
    : std::runtime_error("episode failed (" + std::string(sim::FailureName(cause)) + ") after " +
                         std::to_string(steps) + " steps"),
      cause_(cause) {}

std::string_view SourceName(Source source) {
  switch (source) {
    case Source::kExpert: return "expert";
    case Source::kTeleop: return "teleop";
    case Source::kReplay: return "replay";
    case Source::kOffline: return "offline";
    case Source::kPolicy: return "policy";
  }
  return "";
}

std::optional<Source> SourceFromName(std::string_view name) {
  for (Source s : {Source::kExpert, Source::kTeleop, Source::kReplay, Source::kOffline,
                   Source::kPolicy}) {
    if (SourceName(s) == name) return s;
  }
  return std::nullopt;
}

variations::VariationSpec SpecAtStep(const Demonstration& demo, size_t i) {
  variations::VariationSpec spec = demo.meta.spec;
  if (i < demo.meta.step_variations.size()) {
    spec.instances.appearance = demo.meta.step_variations[i].appearance;
    spec.instances.cameras = demo.meta.step_variations[i].cameras;
  }
  return spec;
}

size_t Dataset::total_steps() const {
  size_t n = 0;
  for (const auto& d : demos) n += d.size();
  return n;
}

nlohmann::json MetaToJson(const DemoMeta& m) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& v : m.step_variations) steps.push_back(StepVariationJson(v));
  return {{"id", m.id},
          {"seed", m.seed},
          {"spec", variations::ToJson(m.spec)},
          {"initial_offset", {m.initial_offset.x, m.initial_offset.y}},
          {"source", std::string(SourceName(m.source))},
          {"parent_id", m.parent_id ? nlohmann::json(*m.parent_id) : nlohmann::json(nullptr)},
          {"step_variations", steps}};
}

DemoMeta MetaFromJson(const nlohmann::json& j) {
  DemoMeta m;
  m.id = j.at("id").get<std::string>();
  m.seed = j.at("seed").get<uint64_t>();
  m.spec = variations::SpecFromJson(j.at("spec"));
  m.initial_offset = {j.at("initial_offset").at(0).get<double>(),
                      j.at("initial_offset").at(1).get<double>()};
  auto source = SourceFromName(j.at("source").get<std::string>());
  if (!source) throw FormatError("unknown demo source");
  m.source = *source;
  if (!j.at("parent_id").is_null()) m.parent_id = j.at("parent_id").get<std::string>();
  for (const auto& v : j.at("step_variations")) {
    m.step_variations.push_back(StepVariationFromJson(v));
  }
  return m;
}

Demonstration RecordDemo(episode::Policy& policy, const variations::VariationSpec& spec,
                         uint64_t seed, const sim::SimConfig& config, Source source,
                         std::string id, bool require_success) {
  sim::WorldState state = sim::InitEpisode(seed, spec, config);
  episode::EpisodeOptions options;
  options.record_trace = false;
  episode::EpisodeResult r = episode::RunEpisode(std::move(state), policy, config, options);
  if (require_success && !r.success()) throw EpisodeFailedError(r.final_info.failure, r.steps);
  DemoMeta meta;
  meta.id = std::move(id);
  meta.seed = seed;
  meta.spec = spec;
  meta.source = source;
  return FromEpisode(std::move(r), std::move(meta));
}

Dataset CollectExpert(const CollectOptions& options, const sim::SimConfig& config,
                      CollectStats* stats) {
  const int max_attempts = options.max_attempts > 0 ? options.max_attempts : 4 * options.n;
  Dataset out;
  CollectStats local;
  expert::ExpertPolicy policy(config);
  while (static_cast<int>(out.size()) < options.n && local.attempts < max_attempts) {
    const uint64_t seed = options.seed + static_cast<uint64_t>(local.attempts);
    ++local.attempts;
    variations::VariationSpec spec =
        options.kinds.empty() ? variations::CanonicalSpec()
                              : variations::ComposeSpec(options.kinds, options.split, seed);
    spec.seed = seed;
    char id[32];
    std::snprintf(id, sizeof(id), "demo_%05zu", out.size());
    try {
      out.demos.push_back(RecordDemo(policy, spec, seed, config, Source::kExpert, id));
    } catch (const EpisodeFailedError&) {
      ++local.failures;
    }
  }
  if (stats) *stats = local;
  return out;
}

std::vector<Demonstration> ReplayAugment(const Demonstration& demo,
                                         const variations::KindSet& kinds, int T,
                                         uint64_t base_seed, const sim::SimConfig& config,
                                         AugmentStats* stats,
                                         const variations::VariationConfig& vconfig) {
  RequireReplayable(demo, T);
  std::vector<Demonstration> out;
  for (int t = 1; t <= T; ++t) {
    const variations::VariationSpec spec = variations::ComposeSpec(
        kinds, variations::Split::kTrain, base_seed + static_cast<uint64_t>(t), vconfig);
    sim::WorldState state =
        sim::InitEpisodeAt(demo.meta.seed, spec, demo.meta.initial_offset, config);
    episode::ScriptedPolicy policy(demo.actions);
    episode::EpisodeOptions options;
    options.record_trace = false;
    options.max_actions = static_cast<int>(demo.actions.size());
    episode::EpisodeResult r = episode::RunEpisode(std::move(state), policy, config, options);
    if (stats) ++stats->attempted;
    if (!r.success()) {
      if (stats) ++stats->dropped;
      continue;
    }
    DemoMeta meta;
    meta.id = demo.meta.id + "_r" + std::to_string(t);
    meta.seed = demo.meta.seed;
    meta.spec = spec;
    meta.source = Source::kReplay;
    meta.parent_id = demo.meta.id;
    out.push_back(FromEpisode(std::move(r), std::move(meta)));
  }
  return out;
}

std::vector<Demonstration> OfflineStyleAugment(const Demonstration& demo, int T,
                                               uint64_t base_seed, const sim::SimConfig& config,
                                               const OfflineConfig& offline, AugmentStats* stats) {
  RequireReplayable(demo, T);
  using variations::VariationKind;
  std::vector<Demonstration> out;
  for (int t = 1; t <= T; ++t) {
    Rng rng(MixSeed(MixSeed(demo.meta.seed, static_cast<uint64_t>(Stream::kOffline)),
                    base_seed + static_cast<uint64_t>(t)));
    sim::WorldState state =
        sim::InitEpisodeAt(demo.meta.seed, demo.meta.spec, demo.meta.initial_offset, config);
    std::vector<StepVariation> per_step;
    episode::EpisodeOptions options;
    options.record_trace = false;
    options.max_actions = static_cast<int>(demo.actions.size());
    options.before_observe = [&](int, sim::WorldState& s) {
      auto& inst = s.spec.instances;
      if (offline.visual_kinds.count(VariationKind::kSceneAppearance)) {
        inst.appearance = variations::SampleAppearance(variations::Split::kTrain, rng);
      }
      if (offline.visual_kinds.count(VariationKind::kCameraPose)) {
        inst.cameras[0] = variations::SampleCamera(rng);
        inst.cameras[1] = variations::SampleCamera(rng);
      }
      const float scale = offline.unit_scale
                              ? 1.0f
                              : static_cast<float>(rng.Uniform(offline.scale_min, offline.scale_max));
      per_step.push_back({inst.appearance, inst.cameras, scale});
    };
    options.on_observation = [&](int step, sensors::Observation& obs) {
      const float scale = per_step.at(step).ft_scale;
      for (float& v : obs.ft.data) v *= scale;
      sensors::ApplyNoise(obs, offline.noise, rng);
    };
    episode::ScriptedPolicy policy(demo.actions);
    episode::EpisodeResult r = episode::RunEpisode(std::move(state), policy, config, options);
    if (stats) ++stats->attempted;
    if (!r.success()) {
      if (stats) ++stats->dropped;
      continue;
    }
    DemoMeta meta;
    meta.id = demo.meta.id + "_o" + std::to_string(t);
    meta.seed = demo.meta.seed;
    meta.spec = demo.meta.spec;
    meta.source = Source::kOffline;
    meta.parent_id = demo.meta.id;
    per_step.resize(r.actions.size());
    meta.step_variations = std::move(per_step);
    out.push_back(FromEpisode(std::move(r), std::move(meta)));
  }
  return out;
}

Dataset AugmentDataset(const Dataset& data, const variations::KindSet& kinds, int T,
                       uint64_t base_seed, const sim::SimConfig& config, bool offline,
                       AugmentStats* stats) {
  Dataset augmented;
  for (size_t i = 0; i < data.size(); ++i) {
    // disjoint seed ranges per parent
    const uint64_t base = base_seed + static_cast<uint64_t>(i) * static_cast<uint64_t>(T);
    std::vector<Demonstration> extra =
        offline ? OfflineStyleAugment(data.demos[i], T, base, config, {}, stats)
                : ReplayAugment(data.demos[i], kinds, T, base, config, stats);
    for (auto& d : extra) augmented.demos.push_back(std::move(d));
  }
  return Merge(data, augmented);
}

Dataset Merge(const Dataset& d1, const Dataset& d2) {
  Dataset out;
  std::set<std::string> ids;
  for (const Dataset* d : {&d1, &d2}) {
    for (const Demonstration& demo : d->demos) {
      if (!ids.insert(demo.meta.id).second) throw DuplicateIdError("duplicate demo id " + demo.meta.id);
      out.demos.push_back(demo);
    }
  }
  return out;
}

void SaveDemo(const Demonstration& demo, const std::filesystem::path& file) {
  const size_t n = demo.size();
  if (demo.observations.size() != n) {
    throw std::invalid_argument("demo observation and action counts differ");
  }
  std::string data;
  nlohmann::json tensors = nlohmann::json::array();
  auto add = [&](const char* name, const char* dtype, std::vector<size_t> shape, auto writer) {
    const size_t start = data.size();
    writer();
    tensors.push_back({{"name", name},
                       {"dtype", dtype},
                       {"shape", shape},
                       {"offset", start},
                       {"nbytes", data.size() - start}});
  };
  const size_t img = render::kImageSize;
  add("image_left", "u8", {n, img, img, 3}, [&] {
    for (const auto& o : demo.observations) {
      AppendLittleEndian(data, o.image_left.pixels.data(), o.image_left.pixels.size());
    }
  });
  add("image_right", "u8", {n, img, img, 3}, [&] {
    for (const auto& o : demo.observations) {
      AppendLittleEndian(data, o.image_right.pixels.data(), o.image_right.pixels.size());
    }
  });
  add("ft", "f32", {n, sensors::kFtRows, sensors::kFtCols}, [&] {
    for (const auto& o : demo.observations) AppendLittleEndian(data, o.ft.data.data(), o.ft.data.size());
  });
  add("proprio", "f32", {n, sensors::kProprioDim}, [&] {
    for (const auto& o : demo.observations) AppendLittleEndian(data, o.proprio.data(), o.proprio.size());
  });
  add("actions", "f32", {n, 3}, [&] {
    for (const auto& a : demo.actions) AppendLittleEndian(data, a.data(), a.size());
  });
  const nlohmann::json header = {{"magic", kDemoMagic},
                                 {"version", kFormatVersion},
                                 {"meta", MetaToJson(demo.meta)},
                                 {"tensors", tensors}};
  const std::string header_text = header.dump();
  const uint32_t len = static_cast<uint32_t>(header_text.size());
  std::string bytes;
  AppendLittleEndian(bytes, &len, 1);
  bytes += header_text;
  bytes += data;
  WriteFile(file, bytes);
}

Demonstration LoadDemo(const std::filesystem::path& file) {
  const std::string bytes = ReadFile(file);
  const std::string where = file.string() + ": ";
  if (bytes.size() < 4) throw FormatError(where + "truncated header length");
  uint32_t len = 0;
  ReadLittleEndian(bytes.data(), &len, 1);
  if (len > bytes.size() - 4) throw FormatError(where + "truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.begin() + 4, bytes.begin() + 4 + len);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(where + "bad header json: " + e.what());
  }
  Demonstration demo;
  try {
    if (header.at("magic").get<std::string>() != kDemoMagic) throw FormatError(where + "bad magic");
    const int version = header.at("version").get<int>();
    if (version != kFormatVersion) {
      throw FormatError(where + "unsupported format version " + std::to_string(version) +
                        " (expected " + std::to_string(kFormatVersion) + ")");
    }
    demo.meta = MetaFromJson(header.at("meta"));
    const char* data = bytes.data() + 4 + len;
    const size_t data_size = bytes.size() - 4 - len;
    std::optional<size_t> steps;
    auto tensor = [&](const char* name, const char* dtype, size_t per_step) -> const char* {
      for (const auto& t : header.at("tensors")) {
        if (t.at("name").get<std::string>() != name) continue;
        if (t.at("dtype").get<std::string>() != dtype) throw FormatError(where + "bad dtype");
        const auto shape = t.at("shape").get<std::vector<size_t>>();
        if (shape.empty()) throw FormatError(where + "bad shape");
        size_t count = 1;
        for (size_t s : shape) count *= s;
        if (count != shape[0] * per_step) throw FormatError(where + "bad shape for " + name);
        if (steps && *steps != shape[0]) throw FormatError(where + "inconsistent step counts");
        steps = shape[0];
        const size_t elem = std::string_view(dtype) == "u8" ? 1 : 4;
        const size_t offset = t.at("offset").get<size_t>();
        const size_t nbytes = t.at("nbytes").get<size_t>();
        if (nbytes != count * elem || offset > data_size || nbytes > data_size - offset) {
          throw FormatError(where + "truncated tensor " + name);
        }
        return data + offset;
      }
      throw FormatError(where + "missing tensor " + std::string(name));
    };
    const char* left = tensor("image_left", "u8", render::kImageBytes);
    const char* right = tensor("image_right", "u8", render::kImageBytes);
    const char* ft = tensor("ft", "f32", sensors::kFtRows * sensors::kFtCols);
    const char* proprio = tensor("proprio", "f32", sensors::kProprioDim);
    const char* actions = tensor("actions", "f32", 3);
    const size_t n = steps.value_or(0);
    if (n == 0) throw FormatError(where + "demo has no steps");
    demo.observations.resize(n);
    demo.actions.resize(n);
    for (size_t i = 0; i < n; ++i) {
      auto& o = demo.observations[i];
      ReadLittleEndian(left + i * render::kImageBytes, o.image_left.pixels.data(), render::kImageBytes);
      ReadLittleEndian(right + i * render::kImageBytes, o.image_right.pixels.data(),
                       render::kImageBytes);
      ReadLittleEndian(ft + i * o.ft.data.size() * 4, o.ft.data.data(), o.ft.data.size());
      ReadLittleEndian(proprio + i * o.proprio.size() * 4, o.proprio.data(), o.proprio.size());
      ReadLittleEndian(actions + i * 12, demo.actions[i].data(), 3);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(where + "bad header field: " + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(where + e.what());
  }
  return demo;
}

void Save(const Dataset& data, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "demos", ec);
  if (ec) throw IoError("cannot create " + (dir / "demos").string() + ": " + ec.message());
  nlohmann::json entries = nlohmann::json::array();
  std::set<std::string> ids;
  for (const Demonstration& d : data.demos) {
    CheckId(d.meta.id);
    if (!ids.insert(d.meta.id).second) throw DuplicateIdError("duplicate demo id " + d.meta.id);
    const std::string rel = "demos/" + d.meta.id + ".demo";
    SaveDemo(d, dir / rel);
    entries.push_back({{"id", d.meta.id},
                       {"file", rel},
                       {"steps", d.size()},
                       {"source", std::string(SourceName(d.meta.source))}});
  }
  const nlohmann::json manifest = {{"format", kManifestFormat},
                                   {"version", kFormatVersion},
                                   {"count", data.size()},
                                   {"demos", entries}};
  WriteFile(dir / "manifest.json", manifest.dump(2) + "\n");
}

Dataset Load(const std::filesystem::path& dir) {
  const std::string text = ReadFile(dir / "manifest.json");
  Dataset out;
  try {
    const auto manifest = nlohmann::json::parse(text);
    if (manifest.at("format").get<std::string>() != kManifestFormat) {
      throw FormatError("not a dataset manifest: " + dir.string());
    }
    const int version = manifest.at("version").get<int>();
    if (version != kFormatVersion) {
      throw FormatError("unsupported manifest version " + std::to_string(version));
    }
    const auto& entries = manifest.at("demos");
    if (manifest.at("count").get<size_t>() != entries.size()) {
      throw FormatError("manifest count does not match its entries");
    }
    std::set<std::string> ids;
    for (const auto& e : entries) {
      const std::string id = e.at("id").get<std::string>();
      if (!ids.insert(id).second) throw DuplicateIdError("duplicate demo id " + id);
      Demonstration d = LoadDemo(dir / e.at("file").get<std::string>());
      if (d.meta.id != id || d.size() != e.at("steps").get<size_t>()) {
        throw FormatError("manifest entry does not match demo file for " + id);
      }
      out.demos.push_back(std::move(d));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad manifest: " + std::string(e.what()));
  }
  return out;
}

}  // namespace pegbench::dataset

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

#include "pegbench/session.h"

#include <filesystem>

#include "gtest/gtest.h"
#include "pegbench/episode.h"
#include "pegbench/expert.h"

namespace pegbench::session {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(fs::temp_directory_path() / ("pegbench_session_" + name)) {
    fs::remove_all(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

json ActionMsg(const sim::Action& a) {
  return {{"type", "action"}, {"ax", a[0]}, {"ay", a[1]}, {"az", a[2]}};
}

json Start(uint64_t seed) { return {{"type", "control"}, {"cmd", "start"}, {"seed", seed}}; }

TEST(Base64, RoundTripAndLength) {
  std::vector<uint8_t> bytes(render::kImageBytes);
  for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = static_cast<uint8_t>(i * 37 + 11);
  const std::string text = EncodeBase64(bytes);
  EXPECT_EQ(text.size(), 4 * ((bytes.size() + 2) / 3));
  EXPECT_EQ(DecodeBase64(text), bytes);
  EXPECT_EQ(EncodeBase64({'M', 'a', 'n'}), "TWFu");
  EXPECT_EQ(EncodeBase64({'M', 'a'}), "TWE=");
  EXPECT_EQ(EncodeBase64({'M'}), "TQ==");
  EXPECT_EQ(EncodeBase64({}), "");
  EXPECT_THROW(DecodeBase64("TW!u"), std::invalid_argument);
}

TEST(TeleopSession, OneObsPerAction) {
  TempDir dir("obs");
  TeleopSession s({.data_dir = dir.path()});
  auto r = s.Handle(Start(3));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].at("type"), "obs");
  EXPECT_EQ(r[0].at("step"), 0);
  EXPECT_EQ(r[0].at("status"), "running");
  EXPECT_EQ(DecodeBase64(r[0].at("image_left").get<std::string>()).size(), render::kImageBytes);
  EXPECT_EQ(r[0].at("ft_window").size(), 32u);
  EXPECT_EQ(r[0].at("proprio").size(), 14u);
  for (int i = 1; i <= 10; ++i) {
    r = s.Handle(ActionMsg({0.5f, 0.5f, 0.5f}));
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].at("type"), "obs");
    EXPECT_EQ(r[0].at("step"), i);
  }
  r = s.Handle({{"type", "control"}, {"cmd", "reset"}});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].at("step"), 0);
  EXPECT_EQ(s.step(), 0);
}

TEST(TeleopSession, ObservationsMatchSimulator) {
  TempDir dir("match");
  TeleopSession s({.data_dir = dir.path()});
  const json first = s.Handle(Start(4))[0];
  sim::WorldState w = sim::InitEpisode(4, [] {
    auto spec = variations::CanonicalSpec();
    spec.seed = 4;
    return spec;
  }());
  const sensors::Observation o =
      sensors::Observe(w, sensors::PrefilledHistory(w.last_wrench_moving, w.last_wrench_compliant));
  EXPECT_EQ(first, ObsMessage(0, o, Status::kRunning));
}

TEST(TeleopSession, Errors) {
  TempDir dir("errors");
  TeleopSession s({.data_dir = dir.path()});
  auto expect_error = [&](const json& m) {
    const auto r = s.Handle(m);
    ASSERT_EQ(r.size(), 1u) << m;
    EXPECT_EQ(r[0].at("type"), "error") << m;
  };
  expect_error(ActionMsg({0.5f, 0.5f, 0.5f}));  // before start
  expect_error({{"type", "teleport"}});
  expect_error({{"kind", "action"}});
  expect_error({{"type", "control"}, {"cmd", "reset"}});
  s.Handle(Start(1));
  expect_error({{"type", "control"}, {"cmd", "explode"}});
  expect_error({{"type", "action"}, {"ax", 1.5}, {"ay", 0.5}, {"az", 0.5}});
  expect_error({{"type", "action"}, {"ax", 0.5}, {"ay", "0.5"}, {"az", 0.5}});
  expect_error({{"type", "action"}, {"ax", 0.5}, {"ay", 0.5}});
  expect_error({{"type", "control"}, {"cmd", "save"}});  // not successful yet
  expect_error({{"type", "seek"}, {"step", 0}});
  EXPECT_EQ(s.step(), 0);
  const auto text = s.HandleText("{not json");
  ASSERT_EQ(text.size(), 1u);
  EXPECT_EQ(json::parse(text[0]).at("type"), "error");
}

TEST(TeleopSession, SaveReplayRoundTrip) {
  TempDir dir("save");
  TeleopSession s({.data_dir = dir.path()});
  s.Handle(Start(7));
  // drive with the expert's actions as a stand-in operator
  const sim::WorldState w0 = [] {
    auto spec = variations::CanonicalSpec();
    spec.seed = 7;
    return sim::InitEpisode(7, spec);
  }();
  expert::ExpertPolicy e;
  const auto planned = episode::RunEpisode(w0, e, {}, {.record_observations = false});
  ASSERT_TRUE(planned.success());
  json last;
  for (const auto& a : planned.actions) last = s.Handle(ActionMsg(a))[0];
  EXPECT_EQ(last.at("status"), "success");
  // actions after termination re-send the final frame
  EXPECT_EQ(s.Handle(ActionMsg({0.5f, 0.5f, 0.5f}))[0], last);

  const auto saved = s.Handle({{"type", "control"}, {"cmd", "save"}});
  ASSERT_EQ(saved[0].at("type"), "saved");
  EXPECT_EQ(saved[0].at("steps"), planned.steps);
  EXPECT_FALSE(s.active());

  const dataset::Dataset d = dataset::Load(dir.path());
  ASSERT_EQ(d.size(), 1u);
  const auto& demo = d.demos[0];
  EXPECT_EQ(demo.meta.source, dataset::Source::kTeleop);
  EXPECT_EQ(demo.meta.id, saved[0].at("id"));
  episode::ScriptedPolicy replay(demo.actions);
  const auto r = episode::RunEpisode(
      sim::InitEpisodeAt(demo.meta.seed, demo.meta.spec, demo.meta.initial_offset), replay, {});
  EXPECT_TRUE(r.success());
  EXPECT_EQ(r.steps, planned.steps);
  EXPECT_EQ(r.observations, demo.observations);

  // replay mode serves the saved frames
  TeleopSession browse({.mode = Mode::kReplay, .data_dir = dir.path()});
  const auto started = browse.Handle({{"type", "control"}, {"cmd", "start"}, {"demo", 0}});
  ASSERT_EQ(started.size(), 2u);
  EXPECT_EQ(started[0].at("type"), "replay");
  EXPECT_EQ(started[0].at("steps"), planned.steps);
  const auto end = browse.Handle({{"type", "seek"}, {"step", planned.steps - 1}});
  EXPECT_EQ(end[0].at("status"), "success");
  EXPECT_EQ(end[0], ObsMessage(planned.steps - 1, demo.observations.back(), Status::kSuccess));
  EXPECT_EQ(browse.Handle({{"type", "seek"}, {"step", planned.steps}})[0].at("type"), "error");
  EXPECT_EQ(browse.Handle(ActionMsg({0.5f, 0.5f, 0.5f}))[0].at("type"), "error");
}

TEST(TeleopSession, DiscardDropsEpisode) {
  TempDir dir("discard");
  TeleopSession s({.data_dir = dir.path()});
  s.Handle(Start(2));
  s.Handle(ActionMsg({0.2f, 0.5f, 0.5f}));
  EXPECT_EQ(s.Handle({{"type", "control"}, {"cmd", "discard"}})[0].at("type"), "discarded");
  EXPECT_FALSE(s.active());
  EXPECT_FALSE(fs::exists(dir.path() / "manifest.json"));
}

TEST(ModeFromName, Names) {
  EXPECT_EQ(ModeFromName("teleop"), Mode::kTeleop);
  EXPECT_EQ(ModeFromName("replay"), Mode::kReplay);
  EXPECT_FALSE(ModeFromName("watch").has_value());
}

}  // namespace
}  // namespace pegbench::session

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

#include <cstdio>

#include <boost/beast/core/detail/base64.hpp>

#include "pegbench/episode.h"

namespace pegbench::session {
namespace {

namespace b64 = boost::beast::detail::base64;

std::string EncodeImage(const render::Image& image) { return EncodeBase64(image.pixels); }

bool IsUnit(const nlohmann::json& v) {
  return v.is_number() && v.get<double>() >= 0.0 && v.get<double>() <= 1.0;
}

}  // namespace

std::optional<Mode> ModeFromName(std::string_view name) {
  if (name == "teleop") return Mode::kTeleop;
  if (name == "replay") return Mode::kReplay;
  return std::nullopt;
}

std::string EncodeBase64(const std::vector<uint8_t>& bytes) {
  std::string out(b64::encoded_size(bytes.size()), '\0');
  out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
  return out;
}

std::vector<uint8_t> DecodeBase64(std::string_view text) {
  std::vector<uint8_t> out(b64::decoded_size(text.size()));
  const auto [written, read] = b64::decode(out.data(), text.data(), text.size());
  if (read != text.size()) throw std::invalid_argument("invalid base64 payload");
  out.resize(written);
  return out;
}

std::string_view StatusName(Status s) {
  switch (s) {
    case Status::kRunning: return "running";
    case Status::kSuccess: return "success";
    case Status::kFailed: return "failed";
  }
  return "unknown";
}

nlohmann::json ObsMessage(int step, const sensors::Observation& obs, Status status,
                          const model::AttentionSummary* attention) {
  nlohmann::json ft = nlohmann::json::array();
  for (int r = 0; r < sensors::kFtRows; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < sensors::kFtCols; ++c) row.push_back(obs.ft.at(r, c));
    ft.push_back(row);
  }
  nlohmann::json j = {{"type", "obs"},
                      {"step", step},
                      {"image_left", EncodeImage(obs.image_left)},
                      {"image_right", EncodeImage(obs.image_right)},
                      {"ft_window", ft},
                      {"proprio", obs.proprio},
                      {"status", StatusName(status)}};
  if (attention) {
    nlohmann::json a = model::ToJson(*attention, step);
    a.erase("step");
    j["attention"] = a;
  }
  return j;
}

nlohmann::json ErrorMessage(const std::string& message) {
  return {{"type", "error"}, {"message", message}};
}

TeleopSession::TeleopSession(SessionConfig config)
    : config_(std::move(config)), next_seed_(config_.first_seed) {
  config_.sim.Validate();
  if (config_.checkpoint) attention_model_ = checkpoint::Load(*config_.checkpoint);
}

std::vector<std::string> TeleopSession::HandleText(std::string_view frame) {
  std::vector<nlohmann::json> replies;
  nlohmann::json message = nlohmann::json::parse(frame, nullptr, false);
  if (message.is_discarded()) {
    replies.push_back(ErrorMessage("malformed JSON frame"));
  } else {
    replies = Handle(message);
  }
  std::vector<std::string> out;
  for (const auto& r : replies) out.push_back(r.dump());
  return out;
}

std::vector<nlohmann::json> TeleopSession::Handle(const nlohmann::json& message) {
  if (!message.is_object() || !message.contains("type") || !message.at("type").is_string()) {
    return {ErrorMessage("message needs a string 'type'")};
  }
  const std::string type = message.at("type").get<std::string>();
  try {
    if (type == "action") return Action(message);
    if (type == "control") return Control(message);
    if (type == "seek") return Seek(message);
  } catch (const std::exception& e) {
    return {ErrorMessage(e.what())};
  }
  return {ErrorMessage("unknown message type '" + type + "'")};
}

void TeleopSession::Begin(uint64_t seed, const variations::VariationSpec& spec) {
  seed_ = seed;
  spec_ = spec;
  state_ = sim::InitEpisode(seed, spec, config_.sim);
  initial_offset_ = state_->lateral_offset;
  history_ = sensors::PrefilledHistory(state_->last_wrench_moving, state_->last_wrench_compliant);
  current_ = sensors::Observe(*state_, history_);
  last_info_ = {};
  observations_.clear();
  actions_.clear();
}

nlohmann::json TeleopSession::Obs(int step, const sensors::Observation& obs, Status status) {
  if (!attention_model_) return ObsMessage(step, obs, status);
  model::ForwardCache<float> cache;
  const auto& m = *attention_model_->model;
  m.Forward(model::Preprocess<float>(obs, m.config()), attention_model_->mask, &cache);
  const model::AttentionSummary a = model::AttentionProportions(cache, m.config());
  return ObsMessage(step, obs, status, &a);
}

nlohmann::json TeleopSession::CurrentObs() {
  Status status = Status::kRunning;
  if (last_info_.terminal()) status = last_info_.success ? Status::kSuccess : Status::kFailed;
  return Obs(state_->step, current_, status);
}

std::vector<nlohmann::json> TeleopSession::Control(const nlohmann::json& message) {
  const std::string cmd = message.value("cmd", "");
  if (config_.mode == Mode::kReplay) {
    if (cmd != "start") return {ErrorMessage("replay mode accepts only the start command")};
    if (!replay_data_) replay_data_ = dataset::Load(config_.data_dir);
    const nlohmann::json& which = message.value("demo", nlohmann::json(0));
    replay_demo_ = nullptr;
    for (size_t i = 0; i < replay_data_->size(); ++i) {
      const auto& d = replay_data_->demos[i];
      if ((which.is_number_integer() && which.get<size_t>() == i) ||
          (which.is_string() && which.get<std::string>() == d.meta.id)) {
        replay_demo_ = &d;
      }
    }
    if (!replay_demo_) return {ErrorMessage("no such demo " + which.dump())};
    episode::ScriptedPolicy policy(replay_demo_->actions);
    episode::EpisodeOptions opts;
    opts.record_observations = false;
    opts.max_actions = static_cast<int>(replay_demo_->size());
    const auto& meta = replay_demo_->meta;
    replay_final_ = episode::RunEpisode(
                        sim::InitEpisodeAt(meta.seed, meta.spec, meta.initial_offset, config_.sim),
                        policy, config_.sim, opts)
                        .final_info;
    return {{{"type", "replay"}, {"id", meta.id}, {"steps", replay_demo_->size()}},
            Obs(0, replay_demo_->observations[0], Status::kRunning)};
  }
  if (cmd == "start") {
    variations::VariationSpec spec = variations::CanonicalSpec();
    if (message.contains("spec")) spec = variations::SpecFromJson(message.at("spec"));
    const uint64_t seed = message.contains("seed") ? message.at("seed").get<uint64_t>() : next_seed_++;
    if (!message.contains("spec")) spec.seed = seed;
    Begin(seed, spec);
    return {CurrentObs()};
  }
  if (!state_) return {ErrorMessage("no episode; send start first")};
  if (cmd == "reset") {
    Begin(seed_, spec_);
    return {CurrentObs()};
  }
  if (cmd == "save") return Save();
  if (cmd == "discard") {
    state_.reset();
    observations_.clear();
    actions_.clear();
    return {{{"type", "discarded"}}};
  }
  return {ErrorMessage("unknown control command '" + cmd + "'")};
}

std::vector<nlohmann::json> TeleopSession::Action(const nlohmann::json& message) {
  if (config_.mode != Mode::kTeleop) return {ErrorMessage("actions require teleop mode")};
  if (!state_) return {ErrorMessage("no episode; send start first")};
  for (const char* key : {"ax", "ay", "az"}) {
    if (!message.contains(key) || !IsUnit(message.at(key))) {
      return {ErrorMessage(std::string("action component ") + key + " must be a number in [0, 1]")};
    }
  }
  if (!last_info_.terminal()) {
    const sim::Action a = {message.at("ax").get<float>(), message.at("ay").get<float>(),
                           message.at("az").get<float>()};
    observations_.push_back(current_);
    actions_.push_back(a);
    last_info_ = sim::Step(*state_, a, config_.sim);
    sensors::PushFt(history_, last_info_.wrench_moving, last_info_.wrench_compliant);
    current_ = sensors::Observe(*state_, history_);
  }
  return {CurrentObs()};
}

std::vector<nlohmann::json> TeleopSession::Seek(const nlohmann::json& message) {
  if (config_.mode != Mode::kReplay || !replay_demo_) {
    return {ErrorMessage("seek requires a started replay")};
  }
  const nlohmann::json& s = message.value("step", nlohmann::json());
  const int n = static_cast<int>(replay_demo_->size());
  if (!s.is_number_integer() || s.get<int>() < 0 || s.get<int>() >= n) {
    return {ErrorMessage("step must be an integer in [0, " + std::to_string(n) + ")")};
  }
  const int step = s.get<int>();
  Status status = Status::kRunning;
  if (step == n - 1) status = replay_final_.success ? Status::kSuccess : Status::kFailed;
  return {Obs(step, replay_demo_->observations[step], status)};
}

std::vector<nlohmann::json> TeleopSession::Save() {
  if (!last_info_.terminal() || !last_info_.success) {
    return {ErrorMessage("only a successful episode can be saved")};
  }
  dataset::Dataset existing;
  if (std::filesystem::exists(config_.data_dir / "manifest.json")) {
    existing = dataset::Load(config_.data_dir);
  }
  std::string id;
  for (size_t k = existing.size();; ++k) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "teleop_%05zu", k);
    id = buf;
    bool taken = false;
    for (const auto& d : existing.demos) taken = taken || d.meta.id == id;
    if (!taken) break;
  }
  dataset::Demonstration demo;
  demo.meta.id = id;
  demo.meta.seed = seed_;
  demo.meta.spec = spec_;
  demo.meta.initial_offset = initial_offset_;
  demo.meta.source = dataset::Source::kTeleop;
  demo.observations = observations_;
  demo.actions = actions_;
  existing.demos.push_back(std::move(demo));
  dataset::Save(existing, config_.data_dir);
  const size_t steps = actions_.size();
  state_.reset();
  observations_.clear();
  actions_.clear();
  return {{{"type", "saved"}, {"id", id}, {"steps", steps}}};
}

}  // namespace pegbench::session

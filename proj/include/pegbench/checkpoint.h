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

#ifndef PEGBENCH_CHECKPOINT_H_
#define PEGBENCH_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "pegbench/model.h"

namespace pegbench::checkpoint {

class CheckpointFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr char kMagic[4] = {'P', 'G', 'N', 'N'};
inline constexpr uint32_t kVersion = 1;

struct LoadedCheckpoint {
  std::unique_ptr<model::PerceiverPolicy<float>> model;
  model::ModalityMask mask;
  nlohmann::json extra;  // caller metadata, e.g. training step and seed
};

// Layout: magic, u32 version, u32 header length, JSON header
// {encoder, mask, params: [{name, shape, offset, count}], extra}, then every
// parameter as little-endian float32 in table order.
std::vector<uint8_t> Serialize(const model::PerceiverPolicy<float>& model,
                               const model::ModalityMask& mask,
                               const nlohmann::json& extra = nlohmann::json::object());
LoadedCheckpoint Deserialize(const std::vector<uint8_t>& bytes);

void Save(const std::filesystem::path& path, const model::PerceiverPolicy<float>& model,
          const model::ModalityMask& mask,
          const nlohmann::json& extra = nlohmann::json::object());
// Throws CheckpointFormatError on a missing, truncated or inconsistent file.
LoadedCheckpoint Load(const std::filesystem::path& path);

// All parameter values concatenated in registration order.
std::vector<float> Snapshot(const nd::ParamStore<float>& store);
void Restore(nd::ParamStore<float>& store, const std::vector<float>& values);

}  // namespace pegbench::checkpoint

#endif  // PEGBENCH_CHECKPOINT_H_

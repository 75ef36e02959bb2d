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

#include "pegbench/checkpoint.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace pegbench::checkpoint {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint32_t GetU32(const std::vector<uint8_t>& in, size_t pos) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(in[pos + i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<uint8_t> Serialize(const model::PerceiverPolicy<float>& model,
                               const model::ModalityMask& mask, const nlohmann::json& extra) {
  const auto& store = model.params();
  nlohmann::json table = nlohmann::json::array();
  size_t offset = 0;
  for (size_t i = 0; i < store.size(); ++i) {
    const auto& p = store[i];
    table.push_back({{"name", p.name}, {"shape", p.value.shape}, {"offset", offset},
                     {"count", p.value.size()}});
    offset += p.value.size();
  }
  const nlohmann::json header = {{"encoder", model::ToJson(model.config())},
                                 {"mask", {{"vision", mask.vision},
                                           {"touch", mask.touch},
                                           {"proprio", mask.proprio}}},
                                 {"params", table},
                                 {"extra", extra}};
  const std::string text = header.dump();
  std::vector<uint8_t> out(std::begin(kMagic), std::end(kMagic));
  PutU32(out, kVersion);
  PutU32(out, static_cast<uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  const size_t data_start = out.size();
  out.resize(data_start + offset * sizeof(float));
  uint8_t* dst = out.data() + data_start;
  for (size_t i = 0; i < store.size(); ++i) {
    const auto& v = store[i].value.data;
    std::memcpy(dst, v.data(), v.size() * sizeof(float));
    dst += v.size() * sizeof(float);
  }
  return out;
}

LoadedCheckpoint Deserialize(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 12 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw CheckpointFormatError("not a checkpoint: bad magic");
  }
  const uint32_t version = GetU32(bytes, 4);
  if (version != kVersion) {
    throw CheckpointFormatError("unsupported checkpoint version " + std::to_string(version));
  }
  const uint32_t header_len = GetU32(bytes, 8);
  if (bytes.size() < 12 + static_cast<size_t>(header_len)) {
    throw CheckpointFormatError("truncated checkpoint header");
  }
  LoadedCheckpoint out;
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.begin() + 12, bytes.begin() + 12 + header_len);
    const auto& m = header.at("mask");
    out.mask = {m.at("vision").get<bool>(), m.at("touch").get<bool>(),
                m.at("proprio").get<bool>()};
    out.model = std::make_unique<model::PerceiverPolicy<float>>(
        model::EncoderConfigFromJson(header.at("encoder")), 0);
    out.extra = header.value("extra", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointFormatError(std::string("bad checkpoint header: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointFormatError(std::string("bad checkpoint header: ") + e.what());
  }
  auto& store = out.model->params();
  const auto& table = header.at("params");
  if (!table.is_array() || table.size() != store.size()) {
    throw CheckpointFormatError("checkpoint parameter table does not match the encoder config");
  }
  const size_t data_start = 12 + header_len;
  const size_t n_floats = (bytes.size() - data_start) / sizeof(float);
  if ((bytes.size() - data_start) != store.ParameterCount() * sizeof(float)) {
    throw CheckpointFormatError("checkpoint data size does not match the parameter table");
  }
  for (const auto& entry : table) {
    const std::string name = entry.at("name").get<std::string>();
    nd::Param<float>* p = store.Find(name);
    if (!p) throw CheckpointFormatError("unknown checkpoint parameter " + name);
    if (entry.at("shape").get<std::vector<int>>() != p->value.shape) {
      throw CheckpointFormatError("shape mismatch for parameter " + name);
    }
    const size_t offset = entry.at("offset").get<size_t>();
    const size_t count = entry.at("count").get<size_t>();
    if (count != p->value.size() || offset + count > n_floats) {
      throw CheckpointFormatError("truncated checkpoint data for " + name);
    }
    std::memcpy(p->value.data.data(), bytes.data() + data_start + offset * sizeof(float),
                count * sizeof(float));
  }
  return out;
}

void Save(const std::filesystem::path& path, const model::PerceiverPolicy<float>& model,
          const model::ModalityMask& mask, const nlohmann::json& extra) {
  const std::vector<uint8_t> bytes = Serialize(model, mask, extra);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("cannot write checkpoint " + path.string());
}

LoadedCheckpoint Load(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointFormatError("cannot open checkpoint " + path.string());
  const std::vector<uint8_t> bytes{std::istreambuf_iterator<char>(f),
                                   std::istreambuf_iterator<char>()};
  return Deserialize(bytes);
}

std::vector<float> Snapshot(const nd::ParamStore<float>& store) {
  std::vector<float> out;
  out.reserve(store.ParameterCount());
  for (size_t i = 0; i < store.size(); ++i) {
    const auto& v = store[i].value.data;
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

void Restore(nd::ParamStore<float>& store, const std::vector<float>& values) {
  if (values.size() != store.ParameterCount()) {
    throw std::invalid_argument("snapshot size does not match the parameter store");
  }
  auto it = values.begin();
  for (size_t i = 0; i < store.size(); ++i) {
    auto& v = store[i].value.data;
    std::copy(it, it + static_cast<std::ptrdiff_t>(v.size()), v.begin());
    it += static_cast<std::ptrdiff_t>(v.size());
  }
}

}  // namespace pegbench::checkpoint

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

#include <filesystem>
#include <fstream>

#include "gtest/gtest.h"

namespace pegbench::checkpoint {
namespace {

namespace fs = std::filesystem;

model::EncoderConfig SmallConfig() {
  model::EncoderConfig c;
  c.n_latents = 2;
  c.latent_dim = 8;
  c.token_dim = 8;
  c.self_attn_layers = 1;
  c.heads = 2;
  c.mlp_hidden = 8;
  c.z_vt_dim = 6;
  c.z_p_dim = 4;
  c.patch = 42;
  c.proprio_hidden = 5;
  c.policy_hidden = 7;
  return c;
}

fs::path TempFile(const std::string& name) {
  return fs::temp_directory_path() / ("pegbench_ckpt_" + name + ".bin");
}

void ExpectSameParams(const nd::ParamStore<float>& a, const nd::ParamStore<float>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].name, b[i].name);
    EXPECT_EQ(a[i].value.shape, b[i].value.shape);
    EXPECT_EQ(a[i].value.data, b[i].value.data);
  }
}

TEST(Checkpoint, SerializeRoundTrip) {
  model::PerceiverPolicy<float> m(SmallConfig(), 3);
  const model::ModalityMask mask = *model::MaskFromName("no-touch");
  const auto bytes = Serialize(m, mask, {{"step", 250}, {"seed", 2}});
  ASSERT_GE(bytes.size(), 12u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "PGNN");
  const LoadedCheckpoint loaded = Deserialize(bytes);
  EXPECT_EQ(loaded.model->config(), m.config());
  EXPECT_EQ(loaded.mask, mask);
  EXPECT_EQ(loaded.extra.at("step"), 250);
  ExpectSameParams(loaded.model->params(), m.params());
  // the payload holds every float exactly once
  EXPECT_GT(bytes.size(), m.params().ParameterCount() * 4);
}

TEST(Checkpoint, FileRoundTripGivesSameActions) {
  const fs::path path = TempFile("file");
  model::PerceiverPolicy<float> m(SmallConfig(), 4);
  Save(path, m, {});
  const LoadedCheckpoint loaded = Load(path);
  ExpectSameParams(loaded.model->params(), m.params());
  model::ModelInput<float> in;
  in.vision = nd::Mat<float>::Constant(8, 42 * 42 * 3, 0.1f);
  in.touch = nd::Mat<float>::Constant(32, 12, -0.2f);
  in.proprio = nd::RowVec<float>::Constant(14, 0.3f);
  EXPECT_EQ(loaded.model->Forward(in, {}, nullptr), m.Forward(in, {}, nullptr));
  fs::remove(path);
}

TEST(Checkpoint, CorruptionIsFormatError) {
  model::PerceiverPolicy<float> m(SmallConfig(), 5);
  const auto good = Serialize(m, {});

  auto bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_THROW(Deserialize(bad_magic), CheckpointFormatError);

  auto bad_version = good;
  bad_version[4] = static_cast<uint8_t>(kVersion + 1);
  EXPECT_THROW(Deserialize(bad_version), CheckpointFormatError);

  for (size_t keep : {size_t{0}, size_t{3}, size_t{11}, good.size() / 2, good.size() - 1}) {
    const std::vector<uint8_t> cut(good.begin(), good.begin() + keep);
    EXPECT_THROW(Deserialize(cut), CheckpointFormatError) << keep;
  }
  auto extra_bytes = good;
  extra_bytes.push_back(0);
  EXPECT_THROW(Deserialize(extra_bytes), CheckpointFormatError);

  auto bad_header = good;
  bad_header[12] = '!';
  EXPECT_THROW(Deserialize(bad_header), CheckpointFormatError);

  EXPECT_THROW(Load("/nonexistent/pegbench/model.ckpt"), CheckpointFormatError);
}

TEST(Checkpoint, SnapshotRestore) {
  model::PerceiverPolicy<float> a(SmallConfig(), 6), b(SmallConfig(), 7);
  const std::vector<float> snap = Snapshot(a.params());
  EXPECT_EQ(snap.size(), a.params().ParameterCount());
  Restore(b.params(), snap);
  ExpectSameParams(a.params(), b.params());
  std::vector<float> wrong(snap.size() + 1);
  EXPECT_THROW(Restore(b.params(), wrong), std::invalid_argument);
}

}  // namespace
}  // namespace pegbench::checkpoint

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

#ifndef PEGBENCH_MODEL_H_
#define PEGBENCH_MODEL_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pegbench/episode.h"
#include "pegbench/ndnet.h"
#include "pegbench/sensors.h"

namespace pegbench::model {

struct EncoderConfig {
  int n_latents = 8;
  int latent_dim = 64;
  int token_dim = 64;
  int self_attn_layers = 2;
  int heads = 4;
  int mlp_hidden = 128;
  int z_vt_dim = 288;
  int z_p_dim = 32;
  int patch = 14;
  int image_size = render::kImageSize;
  int ft_rows = sensors::kFtRows;
  int ft_cols = sensors::kFtCols;
  int proprio_dim = sensors::kProprioDim;
  int proprio_hidden = 64;
  int policy_hidden = 256;
  int action_dim = 3;

  int patches_per_view() const { return (image_size / patch) * (image_size / patch); }
  int patch_values() const { return patch * patch * render::kChannels; }
  int vision_tokens() const { return 2 * patches_per_view(); }
  int z_dim() const { return z_vt_dim + z_p_dim; }
  // Throws std::invalid_argument on inconsistent sizes.
  void Validate() const;
  bool operator==(const EncoderConfig&) const = default;
};

nlohmann::json ToJson(const EncoderConfig& c);
EncoderConfig EncoderConfigFromJson(const nlohmann::json& j);

struct ModalityMask {
  bool vision = true;
  bool touch = true;
  bool proprio = true;
  bool operator==(const ModalityMask&) const = default;
};

// full, no-vision, no-touch, no-prop, touch-only, prop-only, vision-only
std::optional<ModalityMask> MaskFromName(std::string_view name);
std::string MaskName(const ModalityMask& mask);
inline const std::array<std::string_view, 7> kMaskNames = {
    "full", "no-vision", "no-touch", "no-prop", "touch-only", "prop-only", "vision-only"};

enum class TokenTag : uint8_t { kVisionLeft, kVisionRight, kTactile };

// Scaled model inputs for one observation.
template <typename T>
struct ModelInput {
  nd::Mat<T> vision;   // [vision_tokens, patch_values], left view first
  nd::Mat<T> touch;    // [ft_rows, ft_cols]
  nd::RowVec<T> proprio;
};

inline constexpr double kForceScale = 1.0 / 20.0;   // per N
inline constexpr double kTorqueScale = 1.0 / 0.5;   // per N m
inline constexpr double kPositionScale = 0.02;      // per mm
// Added to each channel's pixel variance (8-bit units squared) before the
// square root, so flat views stay finite.
inline constexpr double kPixelVarianceFloor = 1.0;

// Each view is standardized per channel; patches are raster ordered, values
// within a patch are (row, column, channel) ordered.
template <typename T>
ModelInput<T> Preprocess(const sensors::Observation& obs, const EncoderConfig& config);

template <typename T>
struct BlockCache {
  nd::LayerNormCache<T> ln_kv;
  nd::Mat<T> kv;
  nd::LayerNormCache<T> ln_attn;
  nd::Mat<T> attn_in;
  nd::AttentionCache<T> attn;
  nd::LayerNormCache<T> ln_mlp;
  nd::Mat<T> mlp_in;
  nd::Mat<T> hidden;
  nd::Mat<T> act;
};

template <typename T>
struct ForwardCache {
  ModalityMask mask;
  std::vector<TokenTag> tags;
  int n_vision = 0;
  int n_touch = 0;
  nd::Mat<T> vision_in;
  nd::Mat<T> touch_in;
  BlockCache<T> cross;
  std::vector<BlockCache<T>> self;
  nd::LayerNormCache<T> ln_out;
  nd::Mat<T> flat;
  nd::RowVec<T> z_vt;
  nd::Mat<T> proprio_in;
  nd::Mat<T> proprio_hidden;
  nd::RowVec<T> z_p;
  nd::Mat<T> z;
  nd::Mat<T> h1, h2;
  nd::Mat<T> action;
};

// Latent cross-attention encoder over patch and F/T tokens, a proprio MLP and
// an MLP policy head with logistic output.
template <typename T>
class PerceiverPolicy {
 public:
  PerceiverPolicy(const EncoderConfig& config, uint64_t seed);
  PerceiverPolicy(const PerceiverPolicy&) = delete;
  PerceiverPolicy& operator=(const PerceiverPolicy&) = delete;

  const EncoderConfig& config() const { return config_; }
  nd::ParamStore<T>& params() { return store_; }
  const nd::ParamStore<T>& params() const { return store_; }

  // Masked modalities contribute no tokens. With no tokens z_vt is zero; with
  // proprio masked z_p is zero.
  nd::RowVec<T> Forward(const ModelInput<T>& input, const ModalityMask& mask,
                        ForwardCache<T>* cache) const;
  // Accumulates parameter gradients for d loss / d action.
  void Backward(const ForwardCache<T>& cache, const nd::RowVec<T>& d_action);

 private:
  struct Block {
    nd::LayerNorm<T> ln_kv;
    nd::LayerNorm<T> ln_attn;
    nd::MultiHeadAttention<T> attn;
    nd::LayerNorm<T> ln_mlp;
    nd::Linear<T> mlp1, mlp2;
  };
  nd::Mat<T> BlockForward(const Block& b, const nd::Mat<T>& x, const nd::Mat<T>* tokens,
                          BlockCache<T>* c) const;
  // Returns d x; adds d tokens into *d_tokens for cross blocks.
  nd::Mat<T> BlockBackward(Block& b, const BlockCache<T>& c, const nd::Mat<T>& dy,
                           nd::Mat<T>* d_tokens);

  EncoderConfig config_;
  nd::ParamStore<T> store_;
  nd::Linear<T> patch_proj_, touch_proj_;
  nd::Param<T>* pos_vision_ = nullptr;
  nd::Param<T>* pos_touch_ = nullptr;
  nd::Param<T>* latents_ = nullptr;
  Block cross_;
  std::vector<Block> self_;
  nd::LayerNorm<T> ln_out_;
  nd::Linear<T> proj_vt_;
  nd::Linear<T> prop1_, prop2_;
  nd::Linear<T> pol1_, pol2_, pol3_;
};

struct AttentionSummary {
  double vision_left = 0.0;
  double vision_right = 0.0;
  double tactile = 0.0;
  std::vector<double> token_weights;                  // mean over heads and latents
  std::vector<std::vector<double>> vision_heatmaps;   // per view, raster order
  std::vector<double> tactile_weights;                // oldest row first
};

// Cross-attention weights averaged over heads and latents, grouped by token
// modality. Masked modalities report zero.
template <typename T>
AttentionSummary AttentionProportions(const ForwardCache<T>& cache, const EncoderConfig& config);

nlohmann::json ToJson(const AttentionSummary& a, int step);

// Mean-squared-error behavior cloning step: forward, backward, Adam update.
// Returns the mean loss before the update.
double TrainStep(PerceiverPolicy<float>& model, nd::Adam<float>& adam,
                 const std::vector<const sensors::Observation*>& obs,
                 const std::vector<sim::Action>& targets, const ModalityMask& mask);

// Mean loss over a batch without updating.
double BatchLoss(const PerceiverPolicy<float>& model,
                 const std::vector<const sensors::Observation*>& obs,
                 const std::vector<sim::Action>& targets, const ModalityMask& mask);

// Runs the learned policy in the simulator. In 2-D action mode the
// insertion-axis action stays neutral.
class ModelPolicy : public episode::Policy {
 public:
  ModelPolicy(const PerceiverPolicy<float>& model, ModalityMask mask)
      : model_(model), mask_(mask) {}
  sim::Action Act(const sensors::Observation& obs, const sim::WorldState& state) override;
  // Set to receive the attention summary of every step.
  std::function<void(const AttentionSummary&)> on_attention;

 private:
  const PerceiverPolicy<float>& model_;
  ModalityMask mask_;
  ForwardCache<float> cache_;
};

}  // namespace pegbench::model

#endif  // PEGBENCH_MODEL_H_

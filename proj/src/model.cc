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

#include "pegbench/model.h"

#include <cmath>
#include <stdexcept>

namespace pegbench::model {
namespace {

using nd::Mat;
using nd::RowVec;

template <typename T>
Eigen::Map<const Mat<T>> AsRow(const Mat<T>& m) {
  return Eigen::Map<const Mat<T>>(m.data(), 1, m.size());
}

}  // namespace

void EncoderConfig::Validate() const {
  auto positive = [](int v, const char* name) {
    if (v <= 0) throw std::invalid_argument(std::string("encoder config: ") + name + " must be positive");
  };
  positive(n_latents, "n_latents");
  positive(latent_dim, "latent_dim");
  positive(token_dim, "token_dim");
  positive(heads, "heads");
  positive(mlp_hidden, "mlp_hidden");
  positive(z_vt_dim, "z_vt_dim");
  positive(z_p_dim, "z_p_dim");
  positive(patch, "patch");
  positive(ft_rows, "ft_rows");
  positive(ft_cols, "ft_cols");
  positive(proprio_dim, "proprio_dim");
  positive(proprio_hidden, "proprio_hidden");
  positive(policy_hidden, "policy_hidden");
  if (self_attn_layers < 0) throw std::invalid_argument("encoder config: negative layer count");
  if (image_size % patch != 0) throw std::invalid_argument("encoder config: patch must divide image");
  if (latent_dim % heads != 0) throw std::invalid_argument("encoder config: heads must divide latent_dim");
  if (action_dim != 2 && action_dim != 3) throw std::invalid_argument("encoder config: action_dim must be 2 or 3");
}

nlohmann::json ToJson(const EncoderConfig& c) {
  return {{"n_latents", c.n_latents},       {"latent_dim", c.latent_dim},
          {"token_dim", c.token_dim},       {"self_attn_layers", c.self_attn_layers},
          {"heads", c.heads},               {"mlp_hidden", c.mlp_hidden},
          {"z_vt_dim", c.z_vt_dim},         {"z_p_dim", c.z_p_dim},
          {"patch", c.patch},               {"image_size", c.image_size},
          {"ft_rows", c.ft_rows},           {"ft_cols", c.ft_cols},
          {"proprio_dim", c.proprio_dim},   {"proprio_hidden", c.proprio_hidden},
          {"policy_hidden", c.policy_hidden}, {"action_dim", c.action_dim}};
}

EncoderConfig EncoderConfigFromJson(const nlohmann::json& j) {
  EncoderConfig c;
  auto get = [&j](const char* key, int& field) {
    if (j.contains(key)) field = j.at(key).get<int>();
  };
  get("n_latents", c.n_latents);
  get("latent_dim", c.latent_dim);
  get("token_dim", c.token_dim);
  get("self_attn_layers", c.self_attn_layers);
  get("heads", c.heads);
  get("mlp_hidden", c.mlp_hidden);
  get("z_vt_dim", c.z_vt_dim);
  get("z_p_dim", c.z_p_dim);
  get("patch", c.patch);
  get("image_size", c.image_size);
  get("ft_rows", c.ft_rows);
  get("ft_cols", c.ft_cols);
  get("proprio_dim", c.proprio_dim);
  get("proprio_hidden", c.proprio_hidden);
  get("policy_hidden", c.policy_hidden);
  get("action_dim", c.action_dim);
  c.Validate();
  return c;
}

std::optional<ModalityMask> MaskFromName(std::string_view name) {
  if (name == "full") return ModalityMask{true, true, true};
  if (name == "no-vision") return ModalityMask{false, true, true};
  if (name == "no-touch") return ModalityMask{true, false, true};
  if (name == "no-prop") return ModalityMask{true, true, false};
  if (name == "touch-only") return ModalityMask{false, true, false};
  if (name == "prop-only") return ModalityMask{false, false, true};
  if (name == "vision-only") return ModalityMask{true, false, false};
  return std::nullopt;
}

std::string MaskName(const ModalityMask& mask) {
  for (std::string_view name : kMaskNames) {
    if (*MaskFromName(name) == mask) return std::string(name);
  }
  return "none";
}

template <typename T>
ModelInput<T> Preprocess(const sensors::Observation& obs, const EncoderConfig& config) {
  if (config.image_size != render::kImageSize || config.ft_rows != sensors::kFtRows ||
      config.ft_cols != sensors::kFtCols || config.proprio_dim != sensors::kProprioDim) {
    throw nd::ShapeError("encoder config does not match observation sizes");
  }
  ModelInput<T> in;
  const int per_side = config.image_size / config.patch;
  const int ppv = config.patches_per_view();
  in.vision.resize(2 * ppv, config.patch_values());
  const render::Image* views[2] = {&obs.image_left, &obs.image_right};
  const int n_px = config.image_size * config.image_size;
  for (int v = 0; v < 2; ++v) {
    const uint8_t* px = views[v]->pixels.data();
    // per-channel standardization over the view; lighting is a per-channel
    // multiply, so it cancels up to quantization
    double mean[3] = {0, 0, 0}, inv_std[3] = {0, 0, 0};
    for (int i = 0; i < n_px; ++i) {
      for (int ch = 0; ch < 3; ++ch) mean[ch] += px[i * 3 + ch];
    }
    for (double& m : mean) m /= n_px;
    for (int i = 0; i < n_px; ++i) {
      for (int ch = 0; ch < 3; ++ch) inv_std[ch] += std::pow(px[i * 3 + ch] - mean[ch], 2);
    }
    for (double& sd : inv_std) sd = 1.0 / std::sqrt(sd / n_px + kPixelVarianceFloor);
    for (int py = 0; py < per_side; ++py) {
      for (int pxi = 0; pxi < per_side; ++pxi) {
        T* dst = in.vision.row(v * ppv + py * per_side + pxi).data();
        for (int r = 0; r < config.patch; ++r) {
          const uint8_t* src =
              px + ((py * config.patch + r) * config.image_size + pxi * config.patch) * 3;
          for (int k = 0; k < config.patch * 3; ++k) {
            const int ch = k % 3;
            *dst++ = static_cast<T>((src[k] - mean[ch]) * inv_std[ch]);
          }
        }
      }
    }
  }
  in.touch.resize(config.ft_rows, config.ft_cols);
  for (int r = 0; r < config.ft_rows; ++r) {
    for (int c = 0; c < config.ft_cols; ++c) {
      const double scale = (c % 6) < 3 ? kForceScale : kTorqueScale;
      in.touch(r, c) = static_cast<T>(obs.ft.at(r, c) * scale);
    }
  }
  in.proprio.resize(config.proprio_dim);
  for (int i = 0; i < config.proprio_dim; ++i) {
    const bool position = (i % 7) < 3;
    in.proprio(i) = static_cast<T>(position ? obs.proprio[i] * kPositionScale : obs.proprio[i]);
  }
  return in;
}

template <typename T>
PerceiverPolicy<T>::PerceiverPolicy(const EncoderConfig& config, uint64_t seed) : config_(config) {
  config_.Validate();
  Rng rng = Rng::ForStream(seed, Stream::kInit);
  const EncoderConfig& c = config_;
  auto& s = store_;
  patch_proj_ = nd::Linear<T>(s, "vision.patch_proj", c.patch_values(), c.token_dim, rng);
  touch_proj_ = nd::Linear<T>(s, "touch.proj", c.ft_cols, c.token_dim, rng);
  pos_vision_ = &s.Add("vision.pos", {c.vision_tokens(), c.token_dim});
  pos_touch_ = &s.Add("touch.pos", {c.ft_rows, c.token_dim});
  latents_ = &s.Add("latents", {c.n_latents, c.latent_dim});
  nd::InitNormal(*pos_vision_, 0.02, rng);
  nd::InitNormal(*pos_touch_, 0.02, rng);
  nd::InitNormal(*latents_, 0.02, rng);
  auto make_block = [&](const std::string& name, bool cross) {
    Block b;
    if (cross) b.ln_kv = nd::LayerNorm<T>(s, name + ".ln_kv", c.token_dim);
    b.ln_attn = nd::LayerNorm<T>(s, name + ".ln_attn", c.latent_dim);
    b.attn = nd::MultiHeadAttention<T>(s, name + ".attn", c.latent_dim,
                                       cross ? c.token_dim : c.latent_dim, c.latent_dim, c.heads,
                                       rng);
    b.ln_mlp = nd::LayerNorm<T>(s, name + ".ln_mlp", c.latent_dim);
    b.mlp1 = nd::Linear<T>(s, name + ".mlp1", c.latent_dim, c.mlp_hidden, rng);
    b.mlp2 = nd::Linear<T>(s, name + ".mlp2", c.mlp_hidden, c.latent_dim, rng);
    return b;
  };
  cross_ = make_block("cross", true);
  for (int i = 0; i < c.self_attn_layers; ++i) {
    self_.push_back(make_block("self" + std::to_string(i), false));
  }
  ln_out_ = nd::LayerNorm<T>(s, "latent.ln_out", c.latent_dim);
  proj_vt_ = nd::Linear<T>(s, "latent.proj_vt", c.n_latents * c.latent_dim, c.z_vt_dim, rng);
  prop1_ = nd::Linear<T>(s, "proprio.fc1", c.proprio_dim, c.proprio_hidden, rng);
  prop2_ = nd::Linear<T>(s, "proprio.fc2", c.proprio_hidden, c.z_p_dim, rng);
  pol1_ = nd::Linear<T>(s, "policy.fc1", c.z_dim(), c.policy_hidden, rng);
  pol2_ = nd::Linear<T>(s, "policy.fc2", c.policy_hidden, c.policy_hidden, rng);
  pol3_ = nd::Linear<T>(s, "policy.fc3", c.policy_hidden, c.action_dim, rng);
}

template <typename T>
Mat<T> PerceiverPolicy<T>::BlockForward(const Block& b, const Mat<T>& x, const Mat<T>* tokens,
                                        BlockCache<T>* c) const {
  if (tokens) c->kv = b.ln_kv.Forward(*tokens, &c->ln_kv);
  c->attn_in = b.ln_attn.Forward(x, &c->ln_attn);
  const Mat<T> x1 = x + b.attn.Forward(c->attn_in, tokens ? c->kv : c->attn_in, &c->attn);
  c->mlp_in = b.ln_mlp.Forward(x1, &c->ln_mlp);
  c->hidden = b.mlp1.Forward(c->mlp_in);
  c->act = nd::Gelu<T>(c->hidden);
  return x1 + b.mlp2.Forward(c->act);
}

template <typename T>
Mat<T> PerceiverPolicy<T>::BlockBackward(Block& b, const BlockCache<T>& c, const Mat<T>& dy,
                                         Mat<T>* d_tokens) {
  const Mat<T> d_act = b.mlp2.Backward(c.act, dy);
  const Mat<T> d_hidden = nd::GeluBackward<T>(c.hidden, d_act);
  const Mat<T> d_mlp_in = b.mlp1.Backward(c.mlp_in, d_hidden);
  const Mat<T> dx1 = dy + b.ln_mlp.Backward(c.ln_mlp, d_mlp_in);
  auto [dq, dkv] = b.attn.Backward(c.attn, dx1);
  if (d_tokens) {
    *d_tokens += b.ln_kv.Backward(c.ln_kv, dkv);
  } else {
    dq += dkv;
  }
  return dx1 + b.ln_attn.Backward(c.ln_attn, dq);
}

template <typename T>
RowVec<T> PerceiverPolicy<T>::Forward(const ModelInput<T>& in, const ModalityMask& mask,
                                      ForwardCache<T>* cache) const {
  ForwardCache<T> local;
  ForwardCache<T>& c = cache ? *cache : local;
  const EncoderConfig& cfg = config_;
  if (!mask.vision && !mask.touch && !mask.proprio) {
    throw std::invalid_argument("modality mask disables every input");
  }
  c.mask = mask;
  c.n_vision = mask.vision ? cfg.vision_tokens() : 0;
  c.n_touch = mask.touch ? cfg.ft_rows : 0;
  const int n_tok = c.n_vision + c.n_touch;
  c.tags.clear();
  c.z_vt = RowVec<T>::Zero(cfg.z_vt_dim);
  if (n_tok > 0) {
    Mat<T> tokens(n_tok, cfg.token_dim);
    if (mask.vision) {
      if (in.vision.rows() != c.n_vision) throw nd::ShapeError("vision token count mismatch");
      c.vision_in = in.vision;
      tokens.topRows(c.n_vision) = patch_proj_.Forward(in.vision) + pos_vision_->value.matrix();
      for (int i = 0; i < c.n_vision; ++i) {
        c.tags.push_back(i < cfg.patches_per_view() ? TokenTag::kVisionLeft : TokenTag::kVisionRight);
      }
    }
    if (mask.touch) {
      c.touch_in = in.touch;
      tokens.bottomRows(c.n_touch) = touch_proj_.Forward(in.touch) + pos_touch_->value.matrix();
      c.tags.insert(c.tags.end(), c.n_touch, TokenTag::kTactile);
    }
    Mat<T> x = BlockForward(cross_, latents_->value.matrix(), &tokens, &c.cross);
    c.self.resize(self_.size());
    for (size_t i = 0; i < self_.size(); ++i) x = BlockForward(self_[i], x, nullptr, &c.self[i]);
    const Mat<T> y = ln_out_.Forward(x, &c.ln_out);
    c.flat = AsRow(y);
    c.z_vt = proj_vt_.Forward(c.flat);
  }
  c.z_p = RowVec<T>::Zero(cfg.z_p_dim);
  if (mask.proprio) {
    c.proprio_in = in.proprio;
    c.proprio_hidden = prop1_.Forward(c.proprio_in);
    c.z_p = prop2_.Forward(nd::Gelu<T>(c.proprio_hidden));
  }
  c.z.resize(1, cfg.z_dim());
  c.z << c.z_vt, c.z_p;
  c.h1 = pol1_.Forward(c.z);
  c.h2 = pol2_.Forward(nd::Gelu<T>(c.h1));
  c.action = nd::Sigmoid<T>(pol3_.Forward(nd::Gelu<T>(c.h2)));
  return c.action.row(0);
}

template <typename T>
void PerceiverPolicy<T>::Backward(const ForwardCache<T>& c, const RowVec<T>& d_action) {
  const EncoderConfig& cfg = config_;
  const Mat<T> d_logits = nd::SigmoidBackward<T>(c.action, d_action);
  const Mat<T> d_a2 = pol3_.Backward(nd::Gelu<T>(c.h2), d_logits);
  const Mat<T> d_a1 = pol2_.Backward(nd::Gelu<T>(c.h1), nd::GeluBackward<T>(c.h2, d_a2));
  const Mat<T> d_z = pol1_.Backward(c.z, nd::GeluBackward<T>(c.h1, d_a1));
  if (c.mask.proprio) {
    const Mat<T> d_g = prop2_.Backward(nd::Gelu<T>(c.proprio_hidden), d_z.rightCols(cfg.z_p_dim));
    prop1_.AccumulateGrad(c.proprio_in, nd::GeluBackward<T>(c.proprio_hidden, d_g));
  }
  const int n_tok = c.n_vision + c.n_touch;
  if (n_tok == 0) return;
  const Mat<T> d_flat = proj_vt_.Backward(c.flat, d_z.leftCols(cfg.z_vt_dim));
  const Mat<T> d_y = Eigen::Map<const Mat<T>>(d_flat.data(), cfg.n_latents, cfg.latent_dim);
  Mat<T> dx = ln_out_.Backward(c.ln_out, d_y);
  for (size_t i = self_.size(); i-- > 0;) dx = BlockBackward(self_[i], c.self[i], dx, nullptr);
  Mat<T> d_tokens = Mat<T>::Zero(n_tok, cfg.token_dim);
  dx = BlockBackward(cross_, c.cross, dx, &d_tokens);
  latents_->grad.matrix() += dx;
  if (c.n_vision > 0) {
    const Mat<T> dv = d_tokens.topRows(c.n_vision);
    pos_vision_->grad.matrix() += dv;
    patch_proj_.AccumulateGrad(c.vision_in, dv);
  }
  if (c.n_touch > 0) {
    const Mat<T> dt = d_tokens.bottomRows(c.n_touch);
    pos_touch_->grad.matrix() += dt;
    touch_proj_.AccumulateGrad(c.touch_in, dt);
  }
}

template <typename T>
AttentionSummary AttentionProportions(const ForwardCache<T>& c, const EncoderConfig& config) {
  AttentionSummary out;
  const int ppv = config.patches_per_view();
  out.vision_heatmaps.assign(2, std::vector<double>(ppv, 0.0));
  out.tactile_weights.assign(config.ft_rows, 0.0);
  const int n_tok = c.n_vision + c.n_touch;
  if (n_tok == 0 || c.cross.attn.attn.empty()) return out;
  out.token_weights.assign(n_tok, 0.0);
  const auto& heads = c.cross.attn.attn;
  for (const auto& a : heads) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.token_weights[j] += a.col(j).sum();
  }
  const double norm = static_cast<double>(heads.size()) * heads[0].rows();
  for (double& w : out.token_weights) w /= norm;
  for (int j = 0; j < n_tok; ++j) {
    const double w = out.token_weights[j];
    switch (c.tags[j]) {
      case TokenTag::kVisionLeft:
        out.vision_left += w;
        out.vision_heatmaps[0][j] = w;
        break;
      case TokenTag::kVisionRight:
        out.vision_right += w;
        out.vision_heatmaps[1][j - ppv] = w;
        break;
      case TokenTag::kTactile:
        out.tactile += w;
        out.tactile_weights[j - c.n_vision] = w;
        break;
    }
  }
  return out;
}

nlohmann::json ToJson(const AttentionSummary& a, int step) {
  nlohmann::json heatmaps = nlohmann::json::array();
  for (const auto& view : a.vision_heatmaps) {
    const size_t side = static_cast<size_t>(std::lround(std::sqrt(view.size())));
    nlohmann::json grid = nlohmann::json::array();
    for (size_t r = 0; r < side; ++r) {
      grid.push_back(std::vector<double>(view.begin() + r * side, view.begin() + (r + 1) * side));
    }
    heatmaps.push_back(grid);
  }
  return {{"step", step},
          {"proportions",
           {{"vision_left", a.vision_left}, {"vision_right", a.vision_right}, {"tactile", a.tactile}}},
          {"vision_heatmaps", heatmaps},
          {"tactile_weights", a.tactile_weights}};
}

namespace {

void CheckBatch(const std::vector<const sensors::Observation*>& obs,
                const std::vector<sim::Action>& targets) {
  if (obs.empty() || obs.size() != targets.size()) {
    throw std::invalid_argument("batch needs matching non-empty observations and targets");
  }
}

}  // namespace

double TrainStep(PerceiverPolicy<float>& model, nd::Adam<float>& adam,
                 const std::vector<const sensors::Observation*>& obs,
                 const std::vector<sim::Action>& targets, const ModalityMask& mask) {
  CheckBatch(obs, targets);
  const EncoderConfig& cfg = model.config();
  const int a_dim = cfg.action_dim;
  const double count = static_cast<double>(obs.size()) * a_dim;
  model.params().ZeroGrad();
  ForwardCache<float> cache;
  double loss = 0.0;
  for (size_t i = 0; i < obs.size(); ++i) {
    const ModelInput<float> in = Preprocess<float>(*obs[i], cfg);
    const RowVec<float> pred = model.Forward(in, mask, &cache);
    RowVec<float> d(a_dim);
    for (int k = 0; k < a_dim; ++k) {
      const double diff = pred(k) - targets[i][k];
      loss += diff * diff;
      d(k) = static_cast<float>(2.0 * diff / count);
    }
    model.Backward(cache, d);
  }
  adam.Step();
  return loss / count;
}

double BatchLoss(const PerceiverPolicy<float>& model,
                 const std::vector<const sensors::Observation*>& obs,
                 const std::vector<sim::Action>& targets, const ModalityMask& mask) {
  CheckBatch(obs, targets);
  const EncoderConfig& cfg = model.config();
  double loss = 0.0;
  for (size_t i = 0; i < obs.size(); ++i) {
    const RowVec<float> pred = model.Forward(Preprocess<float>(*obs[i], cfg), mask, nullptr);
    for (int k = 0; k < cfg.action_dim; ++k) {
      const double diff = pred(k) - targets[i][k];
      loss += diff * diff;
    }
  }
  return loss / (static_cast<double>(obs.size()) * cfg.action_dim);
}

sim::Action ModelPolicy::Act(const sensors::Observation& obs, const sim::WorldState& /*state*/) {
  const EncoderConfig& cfg = model_.config();
  const RowVec<float> a = model_.Forward(Preprocess<float>(obs, cfg), mask_, &cache_);
  if (on_attention) on_attention(AttentionProportions(cache_, cfg));
  return {a(0), a(1), cfg.action_dim == 3 ? a(2) : 0.5f};
}

#define PEGBENCH_MODEL_INSTANTIATE(T)                                                          \
  template ModelInput<T> Preprocess<T>(const sensors::Observation&, const EncoderConfig&);     \
  template class PerceiverPolicy<T>;                                                           \
  template AttentionSummary AttentionProportions<T>(const ForwardCache<T>&, const EncoderConfig&);

PEGBENCH_MODEL_INSTANTIATE(float)
PEGBENCH_MODEL_INSTANTIATE(double)

}  // namespace pegbench::model

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

#include "pegbench/ndnet.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace pegbench::nd {

template <typename T>
Tensor<T>::Tensor(std::vector<int> s) : shape(std::move(s)) {
  size_t n = 1;
  for (int e : shape) {
    if (e <= 0) throw ShapeError("tensor extents must be positive");
    n *= static_cast<size_t>(e);
  }
  data.assign(n, T(0));
}

template <typename T>
int Tensor<T>::rows() const {
  return shape.size() <= 1 ? 1 : shape[0];
}

template <typename T>
int Tensor<T>::cols() const {
  if (shape.empty()) return 0;
  if (shape.size() == 1) return shape[0];
  return static_cast<int>(data.size() / static_cast<size_t>(shape[0]));
}

template <typename T>
Param<T>& ParamStore<T>::Add(const std::string& name, std::vector<int> shape) {
  if (Find(name)) throw std::invalid_argument("duplicate parameter name " + name);
  auto p = std::make_unique<Param<T>>();
  p->name = name;
  p->value = Tensor<T>(shape);
  p->grad = Tensor<T>(std::move(shape));
  params_.push_back(std::move(p));
  return *params_.back();
}

template <typename T>
Param<T>* ParamStore<T>::Find(const std::string& name) {
  for (auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

template <typename T>
const Param<T>* ParamStore<T>::Find(const std::string& name) const {
  for (const auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

template <typename T>
void ParamStore<T>::ZeroGrad() {
  for (auto& p : params_) std::fill(p->grad.data.begin(), p->grad.data.end(), T(0));
}

template <typename T>
size_t ParamStore<T>::ParameterCount() const {
  size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

template <typename T>
void InitFanIn(Param<T>& p, int fan_in, Rng& rng) {
  const double bound = std::sqrt(1.0 / fan_in);
  for (T& v : p.value.data) v = static_cast<T>(rng.Uniform(-bound, bound));
}

template <typename T>
void InitNormal(Param<T>& p, double stddev, Rng& rng) {
  for (T& v : p.value.data) v = static_cast<T>(rng.Normal(0.0, stddev));
}

template <typename T>
Linear<T>::Linear(ParamStore<T>& store, const std::string& name, int d_in, int d_out, Rng& rng)
    : d_in_(d_in), d_out_(d_out) {
  w_ = &store.Add(name + ".w", {d_in, d_out});
  b_ = &store.Add(name + ".b", {d_out});
  InitFanIn(*w_, d_in, rng);
}

template <typename T>
Mat<T> Linear<T>::Forward(const Mat<T>& x) const {
  if (x.cols() != d_in_) {
    throw ShapeError("linear " + w_->name + ": input width " + std::to_string(x.cols()) +
                     " != " + std::to_string(d_in_));
  }
  Mat<T> y = x * w_->value.matrix();
  y.rowwise() += b_->value.matrix().row(0);
  return y;
}

template <typename T>
void Linear<T>::AccumulateGrad(const Mat<T>& x, const Mat<T>& dy) {
  if (dy.cols() != d_out_ || dy.rows() != x.rows() || x.cols() != d_in_) {
    throw ShapeError("linear backward shape");
  }
  w_->grad.matrix().noalias() += x.transpose() * dy;
  b_->grad.matrix().row(0) += dy.colwise().sum();
}

template <typename T>
Mat<T> Linear<T>::Backward(const Mat<T>& x, const Mat<T>& dy) {
  AccumulateGrad(x, dy);
  return dy * w_->value.matrix().transpose();
}

template <typename T>
LayerNorm<T>::LayerNorm(ParamStore<T>& store, const std::string& name, int dim) {
  gamma_ = &store.Add(name + ".gamma", {dim});
  beta_ = &store.Add(name + ".beta", {dim});
  std::fill(gamma_->value.data.begin(), gamma_->value.data.end(), T(1));
}

template <typename T>
Mat<T> LayerNorm<T>::Forward(const Mat<T>& x, LayerNormCache<T>* cache) const {
  const int d = static_cast<int>(gamma_->value.size());
  if (x.cols() != d) throw ShapeError("layer norm width mismatch");
  LayerNormCache<T> local;
  LayerNormCache<T>& c = cache ? *cache : local;
  c.xhat.resize(x.rows(), d);
  c.inv_std.resize(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const T mean = x.row(r).mean();
    const auto centered = x.row(r).array() - mean;
    const T var = centered.square().mean();
    c.inv_std(r) = T(1) / std::sqrt(var + static_cast<T>(kEps));
    c.xhat.row(r) = centered * c.inv_std(r);
  }
  Mat<T> y = c.xhat;
  y.array().rowwise() *= gamma_->value.matrix().row(0).array();
  y.rowwise() += beta_->value.matrix().row(0);
  return y;
}

template <typename T>
Mat<T> LayerNorm<T>::Backward(const LayerNormCache<T>& c, const Mat<T>& dy) {
  const auto gamma = gamma_->value.matrix().row(0).array();
  gamma_->grad.matrix().row(0) += (dy.array() * c.xhat.array()).colwise().sum().matrix();
  beta_->grad.matrix().row(0) += dy.colwise().sum();
  Mat<T> dxhat = dy;
  dxhat.array().rowwise() *= gamma;
  const T n = static_cast<T>(dy.cols());
  Mat<T> dx(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    const T sum = dxhat.row(r).sum();
    const T dot = dxhat.row(r).dot(c.xhat.row(r));
    dx.row(r) = (c.inv_std(r) / n) *
                (n * dxhat.row(r).array() - sum - c.xhat.row(r).array() * dot).matrix();
  }
  return dx;
}

template <typename T>
Mat<T> Gelu(const Mat<T>& x) {
  const T k = static_cast<T>(1.0 / std::numbers::sqrt2);
  return x.unaryExpr([k](T v) { return T(0.5) * v * (T(1) + std::erf(v * k)); });
}

template <typename T>
Mat<T> GeluBackward(const Mat<T>& x, const Mat<T>& dy) {
  const T k = static_cast<T>(1.0 / std::numbers::sqrt2);
  const T pdf_scale = static_cast<T>(1.0 / std::sqrt(2.0 * std::numbers::pi));
  const Mat<T> d = x.unaryExpr([k, pdf_scale](T v) {
    return T(0.5) * (T(1) + std::erf(v * k)) + v * pdf_scale * std::exp(T(-0.5) * v * v);
  });
  return (d.array() * dy.array()).matrix();
}

template <typename T>
Mat<T> Sigmoid(const Mat<T>& x) {
  return x.unaryExpr([](T v) { return T(1) / (T(1) + std::exp(-v)); });
}

template <typename T>
Mat<T> SigmoidBackward(const Mat<T>& y, const Mat<T>& dy) {
  return (dy.array() * y.array() * (T(1) - y.array())).matrix();
}

template <typename T>
Mat<T> SoftmaxRows(const Mat<T>& x) {
  Mat<T> y(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const T m = x.row(r).maxCoeff();
    y.row(r) = (x.row(r).array() - m).exp().matrix();
    y.row(r) /= y.row(r).sum();
  }
  return y;
}

template <typename T>
Mat<T> SoftmaxRowsBackward(const Mat<T>& y, const Mat<T>& dy) {
  Mat<T> dx(y.rows(), y.cols());
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    const T dot = y.row(r).dot(dy.row(r));
    dx.row(r) = (y.row(r).array() * (dy.row(r).array() - dot)).matrix();
  }
  return dx;
}

template <typename T>
MultiHeadAttention<T>::MultiHeadAttention(ParamStore<T>& store, const std::string& name, int d_q,
                                          int d_kv, int d_model, int heads, Rng& rng)
    : d_model_(d_model), heads_(heads) {
  if (heads <= 0 || d_model % heads != 0) {
    throw ShapeError("attention width must be divisible by the head count");
  }
  wq_ = Linear<T>(store, name + ".q", d_q, d_model, rng);
  wk_ = Linear<T>(store, name + ".k", d_kv, d_model, rng);
  wv_ = Linear<T>(store, name + ".v", d_kv, d_model, rng);
  wo_ = Linear<T>(store, name + ".o", d_model, d_q, rng);
}

template <typename T>
Mat<T> MultiHeadAttention<T>::Forward(const Mat<T>& xq, const Mat<T>& xkv,
                                      AttentionCache<T>* cache) const {
  AttentionCache<T> local;
  AttentionCache<T>& c = cache ? *cache : local;
  c.xq = xq;
  c.xkv = xkv;
  c.q = wq_.Forward(xq);
  c.k = wk_.Forward(xkv);
  c.v = wv_.Forward(xkv);
  const int dh = d_model_ / heads_;
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  c.attn.resize(heads_);
  c.o.resize(xq.rows(), d_model_);
  for (int h = 0; h < heads_; ++h) {
    const auto qh = c.q.middleCols(h * dh, dh);
    const auto kh = c.k.middleCols(h * dh, dh);
    const auto vh = c.v.middleCols(h * dh, dh);
    const Mat<T> scores = (qh * kh.transpose()) * scale;
    c.attn[h] = SoftmaxRows<T>(scores);
    c.o.middleCols(h * dh, dh) = c.attn[h] * vh;
  }
  return wo_.Forward(c.o);
}

template <typename T>
std::pair<Mat<T>, Mat<T>> MultiHeadAttention<T>::Backward(const AttentionCache<T>& c,
                                                          const Mat<T>& dout) {
  const Mat<T> d_o = wo_.Backward(c.o, dout);
  const int dh = d_model_ / heads_;
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  Mat<T> dq(c.q.rows(), c.q.cols());
  Mat<T> dk(c.k.rows(), c.k.cols());
  Mat<T> dv(c.v.rows(), c.v.cols());
  for (int h = 0; h < heads_; ++h) {
    const auto d_oh = d_o.middleCols(h * dh, dh);
    const auto qh = c.q.middleCols(h * dh, dh);
    const auto kh = c.k.middleCols(h * dh, dh);
    const auto vh = c.v.middleCols(h * dh, dh);
    const Mat<T> d_attn = d_oh * vh.transpose();
    dv.middleCols(h * dh, dh) = c.attn[h].transpose() * d_oh;
    const Mat<T> d_scores = SoftmaxRowsBackward<T>(c.attn[h], d_attn) * scale;
    dq.middleCols(h * dh, dh) = d_scores * kh;
    dk.middleCols(h * dh, dh) = d_scores.transpose() * qh;
  }
  Mat<T> dxq = wq_.Backward(c.xq, dq);
  Mat<T> dxkv = wk_.Backward(c.xkv, dk);
  dxkv += wv_.Backward(c.xkv, dv);
  return {std::move(dxq), std::move(dxkv)};
}

template <typename T>
T MseLoss(const Mat<T>& pred, const Mat<T>& target, Mat<T>* grad) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw ShapeError("mse: prediction and target shapes differ");
  }
  const Mat<T> diff = pred - target;
  const T count = static_cast<T>(diff.size());
  if (grad) *grad = diff * (T(2) / count);
  return diff.squaredNorm() / count;
}

template <typename T>
Adam<T>::Adam(ParamStore<T>& store, AdamConfig config) : store_(&store), config_(config) {
  for (size_t i = 0; i < store.size(); ++i) {
    m_.emplace_back(store[i].value.size(), T(0));
    v_.emplace_back(store[i].value.size(), T(0));
  }
}

template <typename T>
void Adam<T>::Step() {
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  const T b1 = static_cast<T>(config_.beta1);
  const T b2 = static_cast<T>(config_.beta2);
  const T lr = static_cast<T>(config_.lr);
  const T eps = static_cast<T>(config_.eps);
  const T inv_c1 = static_cast<T>(1.0 / c1);
  const T inv_c2 = static_cast<T>(1.0 / c2);
  for (size_t i = 0; i < store_->size(); ++i) {
    Param<T>& p = (*store_)[i];
    auto& m = m_[i];
    auto& v = v_[i];
    for (size_t j = 0; j < p.value.size(); ++j) {
      const T g = p.grad.data[j];
      m[j] = b1 * m[j] + (T(1) - b1) * g;
      v[j] = b2 * v[j] + (T(1) - b2) * g * g;
      // a zero gradient history leaves the parameter untouched
      if (m[j] == T(0)) continue;
      p.value.data[j] -= lr * (m[j] * inv_c1) / (std::sqrt(v[j] * inv_c2) + eps);
    }
  }
  store_->ZeroGrad();
}

GradCheckReport GradCheck(ParamStore<double>& store, const std::function<double()>& loss_and_grad,
                          const std::function<double()>& loss, const GradCheckOptions& options) {
  GradCheckReport report;
  loss_and_grad();
  std::vector<std::vector<double>> analytic;
  for (size_t i = 0; i < store.size(); ++i) analytic.push_back(store[i].grad.data);
  Rng rng(options.seed);
  for (size_t i = 0; i < store.size(); ++i) {
    Param<double>& p = store[i];
    std::vector<int> idx(p.value.size());
    std::iota(idx.begin(), idx.end(), 0);
    const int k = std::min<int>(options.samples_per_tensor, static_cast<int>(idx.size()));
    for (int j = 0; j < k; ++j) {
      std::swap(idx[j], idx[j + rng.UniformInt(static_cast<int>(idx.size()) - j)]);
    }
    for (int j = 0; j < k; ++j) {
      double& v = p.value.data[idx[j]];
      const double saved = v;
      v = saved + options.h;
      const double up = loss();
      v = saved - options.h;
      const double down = loss();
      v = saved;
      const double numeric = (up - down) / (2.0 * options.h);
      const double a = analytic[i][idx[j]];
      const double denom = std::max({std::abs(a), std::abs(numeric), options.floor});
      const double rel = std::abs(a - numeric) / denom;
      ++report.checked;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = p.name;
        report.worst_index = idx[j];
      }
    }
  }
  report.passed = report.max_rel_error < options.tolerance;
  return report;
}

#define PEGBENCH_ND_INSTANTIATE(T)                                              \
  template struct Tensor<T>;                                                    \
  template class ParamStore<T>;                                                 \
  template void InitFanIn<T>(Param<T>&, int, Rng&);                             \
  template void InitNormal<T>(Param<T>&, double, Rng&);                         \
  template class Linear<T>;                                                     \
  template class LayerNorm<T>;                                                  \
  template Mat<T> Gelu<T>(const Mat<T>&);                                       \
  template Mat<T> GeluBackward<T>(const Mat<T>&, const Mat<T>&);                \
  template Mat<T> Sigmoid<T>(const Mat<T>&);                                    \
  template Mat<T> SigmoidBackward<T>(const Mat<T>&, const Mat<T>&);             \
  template Mat<T> SoftmaxRows<T>(const Mat<T>&);                                \
  template Mat<T> SoftmaxRowsBackward<T>(const Mat<T>&, const Mat<T>&);         \
  template class MultiHeadAttention<T>;                                         \
  template T MseLoss<T>(const Mat<T>&, const Mat<T>&, Mat<T>*);                 \
  template class Adam<T>;

PEGBENCH_ND_INSTANTIATE(float)
PEGBENCH_ND_INSTANTIATE(double)

#undef PEGBENCH_ND_INSTANTIATE

}  // namespace pegbench::nd

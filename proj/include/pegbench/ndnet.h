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

#ifndef PEGBENCH_NDNET_H_
#define PEGBENCH_NDNET_H_

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pegbench/rng.h"

// Dense tensors with explicit per-layer backward passes. T is float for
// training and double for gradient checks.
namespace pegbench::nd {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using RowVec = Eigen::Matrix<T, 1, Eigen::Dynamic>;
template <typename T>
using MatMap = Eigen::Map<Mat<T>>;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Row-major tensor; product(shape) == data.size().
template <typename T>
struct Tensor {
  std::vector<int> shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s);
  size_t size() const { return data.size(); }
  // first extent as rows, the rest flattened as columns; 1-D tensors are a
  // single row
  int rows() const;
  int cols() const;
  MatMap<T> matrix() { return MatMap<T>(data.data(), rows(), cols()); }
  Eigen::Map<const Mat<T>> matrix() const {
    return Eigen::Map<const Mat<T>>(data.data(), rows(), cols());
  }
};

template <typename T>
struct Param {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;
};

// Owns parameters in registration order; pointers stay valid.
template <typename T>
class ParamStore {
 public:
  Param<T>& Add(const std::string& name, std::vector<int> shape);
  Param<T>* Find(const std::string& name);
  const Param<T>* Find(const std::string& name) const;
  void ZeroGrad();
  size_t ParameterCount() const;
  size_t size() const { return params_.size(); }
  Param<T>& operator[](size_t i) { return *params_[i]; }
  const Param<T>& operator[](size_t i) const { return *params_[i]; }

 private:
  std::vector<std::unique_ptr<Param<T>>> params_;
};

// Fills with U(-sqrt(1/fan_in), sqrt(1/fan_in)).
template <typename T>
void InitFanIn(Param<T>& p, int fan_in, Rng& rng);
template <typename T>
void InitNormal(Param<T>& p, double stddev, Rng& rng);

// y = x W + b with W: [d_in, d_out], b: [d_out].
template <typename T>
class Linear {
 public:
  Linear() = default;
  Linear(ParamStore<T>& store, const std::string& name, int d_in, int d_out, Rng& rng);
  Mat<T> Forward(const Mat<T>& x) const;
  // Accumulates dW and db; returns dx.
  Mat<T> Backward(const Mat<T>& x, const Mat<T>& dy);
  // Accumulates dW and db only.
  void AccumulateGrad(const Mat<T>& x, const Mat<T>& dy);
  int d_in() const { return d_in_; }
  int d_out() const { return d_out_; }
  Param<T>& weight() { return *w_; }
  Param<T>& bias() { return *b_; }

 private:
  Param<T>* w_ = nullptr;
  Param<T>* b_ = nullptr;
  int d_in_ = 0;
  int d_out_ = 0;
};

template <typename T>
struct LayerNormCache {
  Mat<T> xhat;
  Eigen::Matrix<T, Eigen::Dynamic, 1> inv_std;
};

// Normalizes each row, then scales by gamma and shifts by beta.
template <typename T>
class LayerNorm {
 public:
  static constexpr double kEps = 1e-5;
  LayerNorm() = default;
  LayerNorm(ParamStore<T>& store, const std::string& name, int dim);
  Mat<T> Forward(const Mat<T>& x, LayerNormCache<T>* cache) const;
  Mat<T> Backward(const LayerNormCache<T>& cache, const Mat<T>& dy);

 private:
  Param<T>* gamma_ = nullptr;
  Param<T>* beta_ = nullptr;
};

// Exact GELU, x * Phi(x).
template <typename T>
Mat<T> Gelu(const Mat<T>& x);
template <typename T>
Mat<T> GeluBackward(const Mat<T>& x, const Mat<T>& dy);

template <typename T>
Mat<T> Sigmoid(const Mat<T>& x);
// Takes the sigmoid output y.
template <typename T>
Mat<T> SigmoidBackward(const Mat<T>& y, const Mat<T>& dy);

// Row-wise softmax, max-subtracted.
template <typename T>
Mat<T> SoftmaxRows(const Mat<T>& x);
// Takes the softmax output y.
template <typename T>
Mat<T> SoftmaxRowsBackward(const Mat<T>& y, const Mat<T>& dy);

template <typename T>
struct AttentionCache {
  Mat<T> xq;
  Mat<T> xkv;
  Mat<T> q, k, v;
  std::vector<Mat<T>> attn;  // per head, [n_q, n_kv]
  Mat<T> o;                  // concatenated heads, [n_q, d_model]
};

// Scaled dot-product attention with learned Q/K/V/output projections.
template <typename T>
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(ParamStore<T>& store, const std::string& name, int d_q, int d_kv,
                     int d_model, int heads, Rng& rng);
  // xq: [n_q, d_q], xkv: [n_kv, d_kv] -> [n_q, d_q]
  Mat<T> Forward(const Mat<T>& xq, const Mat<T>& xkv, AttentionCache<T>* cache) const;
  // Returns (dxq, dxkv).
  std::pair<Mat<T>, Mat<T>> Backward(const AttentionCache<T>& cache, const Mat<T>& dout);
  int heads() const { return heads_; }

 private:
  Linear<T> wq_, wk_, wv_, wo_;
  int d_model_ = 0;
  int heads_ = 1;
};

// Mean of squared differences; grad (if non-null) = 2 (pred - target) / count.
template <typename T>
T MseLoss(const Mat<T>& pred, const Mat<T>& target, Mat<T>* grad);

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam. Step() applies the update and zeroes all grads.
template <typename T>
class Adam {
 public:
  Adam(ParamStore<T>& store, AdamConfig config = {});
  void Step();
  long step_count() const { return t_; }
  const AdamConfig& config() const { return config_; }

 private:
  ParamStore<T>* store_;
  AdamConfig config_;
  std::vector<std::vector<T>> m_, v_;
  long t_ = 0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  int worst_index = -1;
  int checked = 0;
  bool passed = false;
};

// Compares analytic gradients with central differences. `loss_and_grad`
// must zero grads, evaluate the loss and accumulate gradients; `loss` only
// evaluates. Relative error is |a - n| / max(|a|, |n|, floor).
struct GradCheckOptions {
  double h = 1e-5;
  int samples_per_tensor = 200;
  double tolerance = 1e-5;
  // denominator floor of the relative error; central differences at h = 1e-5
  // carry about 1e-11 of rounding noise, so gradients that are exactly zero
  // (e.g. key biases under a row softmax) need a floor well above that
  double floor = 1e-5;
  uint64_t seed = 0;
};
GradCheckReport GradCheck(ParamStore<double>& store, const std::function<double()>& loss_and_grad,
                          const std::function<double()>& loss, const GradCheckOptions& options);

}  // namespace pegbench::nd

#endif  // PEGBENCH_NDNET_H_

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

#ifndef PEGBENCH_RNG_H_
#define PEGBENCH_RNG_H_

#include <cstdint>
#include <random>

namespace pegbench {

// SplitMix64 finalizer; used to derive independent stream seeds.
uint64_t MixSeed(uint64_t a, uint64_t b);

// Named stream ids so that independent consumers of one episode seed never
// share an engine.
enum class Stream : uint64_t {
  kEpisode = 1,
  kNoise = 2,
  kExpert = 3,
  kVariation = 4,
  kInit = 5,
  kShuffle = 6,
  kOffline = 7,
};

// Seeded random stream. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard; the distributions below are implemented here so
// that draws are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}
  static Rng ForStream(uint64_t seed, Stream stream) {
    return Rng(MixSeed(seed, static_cast<uint64_t>(stream)));
  }

  uint64_t NextU64() { return engine_(); }
  // uniform on [0, 1) with 53 bits of resolution
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // uniform on {0, ..., n - 1}
  int UniformInt(int n);
  // standard normal via Box-Muller, caching the second variate
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }
  bool Bernoulli(double p) { return Uniform() < p; }

  bool operator==(const Rng& other) const {
    return engine_ == other.engine_ && has_spare_ == other.has_spare_ &&
           (!has_spare_ || spare_ == other.spare_);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pegbench

#endif  // PEGBENCH_RNG_H_

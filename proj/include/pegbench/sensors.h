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

#ifndef PEGBENCH_SENSORS_H_
#define PEGBENCH_SENSORS_H_

#include <array>

#include "pegbench/render.h"
#include "pegbench/rng.h"
#include "pegbench/sim.h"
#include "pegbench/variations.h"

namespace pegbench::sensors {

inline constexpr int kFtRows = 32;
inline constexpr int kFtCols = 12;
inline constexpr int kProprioDim = 14;

// Rows oldest to newest; columns (F_xyz, tau_xyz) of the moving arm, then of
// the compliant arm. Row-major.
struct FtHistory {
  std::array<float, kFtRows * kFtCols> data{};
  float& at(int row, int col) { return data[row * kFtCols + col]; }
  float at(int row, int col) const { return data[row * kFtCols + col]; }
  bool operator==(const FtHistory&) const = default;
};

// (position_xyz mm, quaternion_wxyz) of the moving wrist, then the compliant
// wrist.
using Proprio = std::array<float, kProprioDim>;

struct Observation {
  render::Image image_left;   // moving-arm wrist camera
  render::Image image_right;  // compliant-arm wrist camera
  FtHistory ft;
  Proprio proprio{};
  bool operator==(const Observation&) const = default;
};

std::array<float, kFtCols> FtRow(const sim::Wrench& moving, const sim::Wrench& compliant);

// Every row equal to the given wrenches.
FtHistory PrefilledHistory(const sim::Wrench& moving, const sim::Wrench& compliant);

// Shifts rows up by one and writes the newest row last.
void PushFt(FtHistory& history, const sim::Wrench& moving, const sim::Wrench& compliant);

// Flange point of each wrist in its own frame, mm.
Eigen::Vector3d FlangePoint();

// Wrist pose = object pose composed with the inverse grasp transform. The
// quaternion's sign is canonicalized to w >= 0.
Proprio ProprioObs(const sim::WorldState& state);

// Adds zero-mean Gaussian noise to every FT entry and to proprio. Orientation
// noise is a small rotation with per-axis standard deviation sigma_rot_deg,
// applied in the wrist frame. Images are not touched.
void ApplyNoise(Observation& obs, const variations::SensorNoiseInstance& noise, Rng& rng);

// Renders both views, copies `history` and computes proprio; noise is added
// iff SensorNoise is active, drawing from state.noise_rng.
Observation Observe(sim::WorldState& state, const FtHistory& history);

}  // namespace pegbench::sensors

#endif  // PEGBENCH_SENSORS_H_

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

#include "pegbench/sensors.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

namespace pegbench::sensors {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

void WristPose(const sim::WorldState& s, sim::Arm arm, float* out) {
  const auto& grasp = arm == sim::Arm::kMoving ? s.peg_grasp() : s.hole_grasp();
  const variations::RigidTransform g = variations::GraspRigidTransform(grasp);
  const Eigen::Matrix3d orientation = sim::NominalRotation(arm) * g.rotation.transpose();
  const Eigen::Vector3d pos =
      sim::ObjectOrigin(s, arm) + orientation * (FlangePoint() - g.translation);
  Eigen::Quaterniond q(orientation);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() *= -1.0;
  out[0] = static_cast<float>(pos.x());
  out[1] = static_cast<float>(pos.y());
  out[2] = static_cast<float>(pos.z());
  out[3] = static_cast<float>(q.w());
  out[4] = static_cast<float>(q.x());
  out[5] = static_cast<float>(q.y());
  out[6] = static_cast<float>(q.z());
}

void PerturbPose(float* pose, const variations::SensorNoiseInstance& noise, Rng& rng) {
  for (int i = 0; i < 3; ++i) {
    pose[i] = static_cast<float>(pose[i] + rng.Normal(0.0, noise.sigma_pos));
  }
  const double sr = noise.sigma_rot_deg * kDegToRad;
  const Eigen::Vector3d delta(rng.Normal(0.0, sr), rng.Normal(0.0, sr), rng.Normal(0.0, sr));
  if (delta.isZero(0.0)) return;
  Eigen::Quaterniond q(pose[3], pose[4], pose[5], pose[6]);
  const Eigen::Quaterniond dq(Eigen::AngleAxisd(delta.norm(), delta.normalized()));
  q = (q * dq).normalized();
  if (q.w() < 0.0) q.coeffs() *= -1.0;
  pose[3] = static_cast<float>(q.w());
  pose[4] = static_cast<float>(q.x());
  pose[5] = static_cast<float>(q.y());
  pose[6] = static_cast<float>(q.z());
}

}  // namespace

std::array<float, kFtCols> FtRow(const sim::Wrench& m, const sim::Wrench& c) {
  std::array<float, kFtCols> row;
  for (int i = 0; i < 3; ++i) {
    row[i] = static_cast<float>(m.force[i]);
    row[3 + i] = static_cast<float>(m.torque[i]);
    row[6 + i] = static_cast<float>(c.force[i]);
    row[9 + i] = static_cast<float>(c.torque[i]);
  }
  return row;
}

FtHistory PrefilledHistory(const sim::Wrench& moving, const sim::Wrench& compliant) {
  FtHistory h;
  const auto row = FtRow(moving, compliant);
  for (int r = 0; r < kFtRows; ++r) std::copy(row.begin(), row.end(), &h.at(r, 0));
  return h;
}

void PushFt(FtHistory& history, const sim::Wrench& moving, const sim::Wrench& compliant) {
  std::copy(history.data.begin() + kFtCols, history.data.end(), history.data.begin());
  const auto row = FtRow(moving, compliant);
  std::copy(row.begin(), row.end(), &history.at(kFtRows - 1, 0));
}

Eigen::Vector3d FlangePoint() { return {0.0, 0.0, -60.0}; }

Proprio ProprioObs(const sim::WorldState& state) {
  Proprio p{};
  WristPose(state, sim::Arm::kMoving, p.data());
  WristPose(state, sim::Arm::kCompliant, p.data() + 7);
  return p;
}

void ApplyNoise(Observation& obs, const variations::SensorNoiseInstance& noise, Rng& rng) {
  for (int r = 0; r < kFtRows; ++r) {
    for (int c = 0; c < kFtCols; ++c) {
      const double sigma = (c % 6) < 3 ? noise.sigma_force : noise.sigma_torque;
      obs.ft.at(r, c) = static_cast<float>(obs.ft.at(r, c) + rng.Normal(0.0, sigma));
    }
  }
  PerturbPose(obs.proprio.data(), noise, rng);
  PerturbPose(obs.proprio.data() + 7, noise, rng);
}

Observation Observe(sim::WorldState& state, const FtHistory& history) {
  Observation obs;
  obs.image_left = render::RenderWrist(state, sim::Arm::kMoving);
  obs.image_right = render::RenderWrist(state, sim::Arm::kCompliant);
  obs.ft = history;
  obs.proprio = ProprioObs(state);
  if (state.spec.Has(variations::VariationKind::kSensorNoise)) {
    ApplyNoise(obs, state.spec.instances.noise, state.noise_rng);
  }
  return obs;
}

}  // namespace pegbench::sensors

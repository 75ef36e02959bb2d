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

#ifndef PEGBENCH_VARIATIONS_H_
#define PEGBENCH_VARIATIONS_H_

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"
#include "pegbench/geom.h"
#include "pegbench/rng.h"

namespace pegbench::variations {

enum class VariationKind {
  kGraspPose,
  kPegHoleShape,
  kObjectBodyShape,
  kSceneAppearance,
  kCameraPose,
  kSensorNoise,
};

inline constexpr std::array<VariationKind, 6> kAllKinds = {
    VariationKind::kGraspPose,       VariationKind::kPegHoleShape, VariationKind::kObjectBodyShape,
    VariationKind::kSceneAppearance, VariationKind::kCameraPose,   VariationKind::kSensorNoise};

using KindSet = std::set<VariationKind>;

// The three physical factors that multisensory augmentation targets.
inline const KindSet kBaseKinds = {VariationKind::kGraspPose, VariationKind::kPegHoleShape,
                                   VariationKind::kObjectBodyShape};

// Short CLI names: grasp, shape, body, scene, camera, noise.
std::string_view KindName(VariationKind kind);
std::optional<VariationKind> KindFromName(std::string_view name);
// Parses "grasp,shape,body"; "all" expands to every kind and "" / "none" to
// the empty set. Throws std::invalid_argument on unknown names.
KindSet ParseKinds(std::string_view list);
std::string FormatKinds(const KindSet& kinds);

enum class Split { kTrain, kEval, kCanonical };
std::string_view SplitName(Split split);
std::optional<Split> SplitFromName(std::string_view name);

enum class BodyShape { kCube, kCylinder, kOctagonalPrism };
std::string_view BodyName(BodyShape shape);

inline constexpr double kBodyWidthMm = 76.0;
inline constexpr double kThinWidthFactor = 0.6;

struct BodyInstance {
  BodyShape shape = BodyShape::kCube;
  double width_factor = 1.0;
  bool operator==(const BodyInstance&) const = default;
};

// Grasp perturbation: translation along the grasp x and z axes, tilt about y
// and a quarter turn about z.
struct GraspTransform {
  double t_x = 0.0;  // mm
  double t_z = 0.0;  // mm
  double r_y = 0.0;  // degrees
  double r_z = 0.0;  // degrees
  bool operator==(const GraspTransform&) const = default;
};

// Maps object-frame coordinates into the wrist frame: p_wrist = R p_obj + t.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();  // mm
};

// R = Rz(r_z) * Ry(r_y), t = (t_x, 0, t_z).
RigidTransform GraspRigidTransform(const GraspTransform& grasp);

struct Rgb {
  double r = 0.0, g = 0.0, b = 0.0;
  bool operator==(const Rgb&) const = default;
};

struct Lighting {
  bool on = true;
  Rgb color{1.0, 1.0, 1.0};
  double intensity = 1.0;
  bool operator==(const Lighting&) const = default;
};

inline constexpr int kFloorTextureCount = 20;
inline constexpr int kTrainFloorTextures = 6;  // ids 0..5; ids 6..19 are held out

struct SceneAppearanceInstance {
  int floor_texture = 0;  // 0 is the light-wood floor
  Rgb object_color{0.80, 0.30, 0.22};
  Lighting lighting;
  bool operator==(const SceneAppearanceInstance&) const = default;
};

struct CameraPoseInstance {
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();  // mm
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double angle_deg = 0.0;
  bool operator==(const CameraPoseInstance& o) const {
    return translation == o.translation && axis == o.axis && angle_deg == o.angle_deg;
  }
};

struct SensorNoiseInstance {
  double sigma_force = 0.0;      // N
  double sigma_torque = 0.0;     // N m
  double sigma_pos = 0.0;        // mm
  double sigma_rot_deg = 0.0;    // degrees per axis
  bool operator==(const SensorNoiseInstance&) const = default;
};

// standard deviations used whenever sensor noise is active
SensorNoiseInstance DefaultSensorNoise();

struct VariationInstances {
  geom::ShapeId shape = geom::ShapeId::kKey;
  BodyInstance peg_body;
  BodyInstance hole_body;
  GraspTransform peg_grasp;
  GraspTransform hole_grasp;
  SceneAppearanceInstance appearance;
  // index 0: moving (peg) wrist camera, index 1: compliant (hole) wrist camera
  std::array<CameraPoseInstance, 2> cameras;
  SensorNoiseInstance noise;
  bool operator==(const VariationInstances&) const = default;
};

struct VariationSpec {
  KindSet active;
  Split split = Split::kCanonical;
  uint64_t seed = 0;
  VariationInstances instances;
  bool operator==(const VariationSpec&) const = default;
  bool Has(VariationKind kind) const { return active.count(kind) > 0; }
};

// Tunables for the few places where alternative readings of the factor
// ranges exist.
struct VariationConfig {
  double camera_max_angle_deg = 5.0;
  double camera_max_translation_mm = 40.0;
  std::vector<double> grasp_rz_choices_deg = {0.0, 90.0, 180.0, 270.0};
  double grasp_max_tx_mm = 17.0;
  double grasp_max_tz_mm = 14.0;
  double grasp_max_ry_deg = 10.0;
  // both arms' grasps are perturbed unless this is false
  bool perturb_hole_grasp = true;
};

VariationSpec CanonicalSpec();

// Draws the instance for `kind` into `instances`. Grasp sampling reads the
// already sampled body widths, so bodies must be drawn first when both are
// active (ComposeSpec does this).
void SampleInstance(VariationKind kind, Split split, Rng& rng, VariationInstances* instances,
                    const VariationConfig& config = {});

GraspTransform SampleGrasp(Split split, double width_factor, Rng& rng,
                           const VariationConfig& config = {});
geom::ShapeId SampleShape(Split split, Rng& rng);
SceneAppearanceInstance SampleAppearance(Split split, Rng& rng);
CameraPoseInstance SampleCamera(Rng& rng, const VariationConfig& config = {});

// One instance per kind in `kinds`, fixed for the whole episode.
VariationSpec ComposeSpec(const KindSet& kinds, Split split, uint64_t seed,
                          const VariationConfig& config = {});

nlohmann::json ToJson(const VariationSpec& spec);
VariationSpec SpecFromJson(const nlohmann::json& j);

nlohmann::json ToJson(const SceneAppearanceInstance& appearance);
SceneAppearanceInstance AppearanceFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const CameraPoseInstance& camera);
CameraPoseInstance CameraFromJson(const nlohmann::json& j);

}  // namespace pegbench::variations

#endif  // PEGBENCH_VARIATIONS_H_

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

#include "pegbench/variations.h"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Geometry>

namespace pegbench::variations {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

Rgb SampleColor(Rng& rng) {
  return {rng.Uniform(0.1, 0.95), rng.Uniform(0.1, 0.95), rng.Uniform(0.1, 0.95)};
}

void SampleBodies(Split split, Rng& rng, VariationInstances* inst) {
  if (split == Split::kTrain) {
    constexpr BodyShape kTrainBodies[] = {BodyShape::kCube, BodyShape::kCylinder};
    inst->peg_body = {kTrainBodies[rng.UniformInt(2)], 1.0};
    inst->hole_body = {kTrainBodies[rng.UniformInt(2)], 1.0};
  } else {
    constexpr BodyShape kAll[] = {BodyShape::kCube, BodyShape::kCylinder,
                                  BodyShape::kOctagonalPrism};
    inst->hole_body = {kAll[rng.UniformInt(3)], 1.0};
    inst->peg_body = {kAll[rng.UniformInt(3)], kThinWidthFactor};
  }
}

nlohmann::json ColorJson(const Rgb& c) { return {c.r, c.g, c.b}; }
Rgb ColorFromJson(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}
nlohmann::json VecJson(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
Eigen::Vector3d VecFromJson(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

nlohmann::json GraspJson(const GraspTransform& g) {
  return {{"t_x", g.t_x}, {"t_z", g.t_z}, {"r_y", g.r_y}, {"r_z", g.r_z}};
}
GraspTransform GraspFromJson(const nlohmann::json& j) {
  return {j.at("t_x").get<double>(), j.at("t_z").get<double>(), j.at("r_y").get<double>(),
          j.at("r_z").get<double>()};
}

BodyShape BodyFromName(std::string_view name) {
  for (BodyShape b : {BodyShape::kCube, BodyShape::kCylinder, BodyShape::kOctagonalPrism}) {
    if (BodyName(b) == name) return b;
  }
  throw std::invalid_argument("unknown body shape: " + std::string(name));
}

}  // namespace

std::string_view KindName(VariationKind kind) {
  switch (kind) {
    case VariationKind::kGraspPose: return "grasp";
    case VariationKind::kPegHoleShape: return "shape";
    case VariationKind::kObjectBodyShape: return "body";
    case VariationKind::kSceneAppearance: return "scene";
    case VariationKind::kCameraPose: return "camera";
    case VariationKind::kSensorNoise: return "noise";
  }
  return "";
}

std::optional<VariationKind> KindFromName(std::string_view name) {
  for (VariationKind k : kAllKinds) {
    if (KindName(k) == name) return k;
  }
  return std::nullopt;
}

KindSet ParseKinds(std::string_view list) {
  KindSet out;
  std::stringstream ss{std::string(list)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item == "none" || item == "canonical") continue;
    if (item == "all") {
      out.insert(kAllKinds.begin(), kAllKinds.end());
      continue;
    }
    if (item == "base") {
      out.insert(kBaseKinds.begin(), kBaseKinds.end());
      continue;
    }
    auto kind = KindFromName(item);
    if (!kind) throw std::invalid_argument("unknown variation kind: " + item);
    out.insert(*kind);
  }
  return out;
}

std::string FormatKinds(const KindSet& kinds) {
  std::string out;
  for (VariationKind k : kinds) {
    if (!out.empty()) out += ",";
    out += KindName(k);
  }
  return out;
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kEval: return "eval";
    case Split::kCanonical: return "canonical";
  }
  return "";
}

std::optional<Split> SplitFromName(std::string_view name) {
  for (Split s : {Split::kTrain, Split::kEval, Split::kCanonical}) {
    if (SplitName(s) == name) return s;
  }
  return std::nullopt;
}

std::string_view BodyName(BodyShape shape) {
  switch (shape) {
    case BodyShape::kCube: return "cube";
    case BodyShape::kCylinder: return "cylinder";
    case BodyShape::kOctagonalPrism: return "octagonal_prism";
  }
  return "";
}

SensorNoiseInstance DefaultSensorNoise() { return {5.0, 0.15, 1.0, 0.57}; }

RigidTransform GraspRigidTransform(const GraspTransform& g) {
  RigidTransform out;
  if (g.r_z != 0.0 || g.r_y != 0.0) {
    out.rotation = (Eigen::AngleAxisd(g.r_z * kDegToRad, Eigen::Vector3d::UnitZ()) *
                    Eigen::AngleAxisd(g.r_y * kDegToRad, Eigen::Vector3d::UnitY()))
                       .toRotationMatrix();
  }
  out.translation = Eigen::Vector3d(g.t_x, 0.0, g.t_z);
  return out;
}

VariationSpec CanonicalSpec() {
  VariationSpec spec;
  spec.split = Split::kCanonical;
  return spec;
}

GraspTransform SampleGrasp(Split split, double width_factor, Rng& rng,
                           const VariationConfig& config) {
  GraspTransform g;
  const double max_tx = config.grasp_max_tx_mm * width_factor;
  g.t_x = rng.Uniform(-max_tx, max_tx);
  g.t_z = rng.Uniform(0.0, config.grasp_max_tz_mm);
  const auto& rz = config.grasp_rz_choices_deg;
  g.r_z = rz.empty() ? 0.0 : rz[rng.UniformInt(static_cast<int>(rz.size()))];
  // y-axis tilt is held out of training
  g.r_y = split == Split::kEval ? rng.Uniform(-config.grasp_max_ry_deg, config.grasp_max_ry_deg)
                                : 0.0;
  return g;
}

geom::ShapeId SampleShape(Split split, Rng& rng) {
  using geom::ShapeId;
  constexpr ShapeId kTrain[] = {ShapeId::kKey, ShapeId::kCircle, ShapeId::kCross};
  constexpr ShapeId kEval[] = {ShapeId::kArrow, ShapeId::kU,       ShapeId::kPentagon,
                               ShapeId::kLine,  ShapeId::kHexagon, ShapeId::kDiamond};
  if (split == Split::kTrain) return kTrain[rng.UniformInt(3)];
  return kEval[rng.UniformInt(6)];
}

SceneAppearanceInstance SampleAppearance(Split split, Rng& rng) {
  SceneAppearanceInstance a;
  if (split == Split::kTrain) {
    a.floor_texture = rng.UniformInt(kTrainFloorTextures);
    a.object_color = SampleColor(rng);
  } else {
    a.floor_texture = kTrainFloorTextures + rng.UniformInt(kFloorTextureCount - kTrainFloorTextures);
    a.object_color = SampleColor(rng);
    a.lighting.on = rng.Bernoulli(0.75);
    a.lighting.color = {rng.Uniform(0.6, 1.0), rng.Uniform(0.6, 1.0), rng.Uniform(0.6, 1.0)};
    a.lighting.intensity = rng.Uniform(0.3, 1.0);
  }
  return a;
}

CameraPoseInstance SampleCamera(Rng& rng, const VariationConfig& config) {
  CameraPoseInstance c;
  const double m = config.camera_max_translation_mm;
  c.translation = {rng.Uniform(-m, m), rng.Uniform(-m, m), rng.Uniform(-m, m)};
  Eigen::Vector3d axis;
  do {
    axis = {rng.Normal(), rng.Normal(), rng.Normal()};
  } while (axis.norm() < 1e-12);
  c.axis = axis.normalized();
  c.angle_deg = rng.Uniform(0.0, config.camera_max_angle_deg);
  return c;
}

void SampleInstance(VariationKind kind, Split split, Rng& rng, VariationInstances* inst,
                    const VariationConfig& config) {
  if (split == Split::kCanonical) {
    throw std::invalid_argument("instances are sampled from the train or eval split");
  }
  switch (kind) {
    case VariationKind::kGraspPose:
      inst->peg_grasp = SampleGrasp(split, inst->peg_body.width_factor, rng, config);
      if (config.perturb_hole_grasp) {
        inst->hole_grasp = SampleGrasp(split, inst->hole_body.width_factor, rng, config);
      }
      break;
    case VariationKind::kPegHoleShape:
      inst->shape = SampleShape(split, rng);
      break;
    case VariationKind::kObjectBodyShape:
      SampleBodies(split, rng, inst);
      break;
    case VariationKind::kSceneAppearance:
      inst->appearance = SampleAppearance(split, rng);
      break;
    case VariationKind::kCameraPose:
      inst->cameras[0] = SampleCamera(rng, config);
      inst->cameras[1] = SampleCamera(rng, config);
      break;
    case VariationKind::kSensorNoise:
      inst->noise = DefaultSensorNoise();
      break;
  }
}

VariationSpec ComposeSpec(const KindSet& kinds, Split split, uint64_t seed,
                          const VariationConfig& config) {
  VariationSpec spec = CanonicalSpec();
  spec.seed = seed;
  if (kinds.empty()) return spec;
  if (split == Split::kCanonical) {
    throw std::invalid_argument("a non-empty variation set needs the train or eval split");
  }
  spec.active = kinds;
  spec.split = split;
  Rng rng = Rng::ForStream(seed, Stream::kVariation);
  // bodies precede grasps: thin bodies shrink the grasp translation range
  constexpr VariationKind kOrder[] = {
      VariationKind::kPegHoleShape,    VariationKind::kObjectBodyShape, VariationKind::kGraspPose,
      VariationKind::kSceneAppearance, VariationKind::kCameraPose,      VariationKind::kSensorNoise};
  for (VariationKind k : kOrder) {
    if (kinds.count(k)) SampleInstance(k, split, rng, &spec.instances, config);
  }
  return spec;
}

nlohmann::json ToJson(const VariationSpec& spec) {
  const VariationInstances& in = spec.instances;
  nlohmann::json active = nlohmann::json::array();
  for (VariationKind k : spec.active) active.push_back(std::string(KindName(k)));
  nlohmann::json cameras = nlohmann::json::array();
  for (const CameraPoseInstance& c : in.cameras) cameras.push_back(ToJson(c));
  return {
      {"active", active},
      {"split", std::string(SplitName(spec.split))},
      {"seed", spec.seed},
      {"instances",
       {
           {"shape", std::string(geom::ShapeName(in.shape))},
           {"peg_body", {{"shape", std::string(BodyName(in.peg_body.shape))},
                         {"width_factor", in.peg_body.width_factor}}},
           {"hole_body", {{"shape", std::string(BodyName(in.hole_body.shape))},
                          {"width_factor", in.hole_body.width_factor}}},
           {"peg_grasp", GraspJson(in.peg_grasp)},
           {"hole_grasp", GraspJson(in.hole_grasp)},
           {"appearance", ToJson(in.appearance)},
           {"cameras", cameras},
           {"noise",
            {{"sigma_force", in.noise.sigma_force},
             {"sigma_torque", in.noise.sigma_torque},
             {"sigma_pos", in.noise.sigma_pos},
             {"sigma_rot_deg", in.noise.sigma_rot_deg}}},
       }},
  };
}

VariationSpec SpecFromJson(const nlohmann::json& j) {
  VariationSpec spec;
  for (const auto& name : j.at("active")) {
    auto kind = KindFromName(name.get<std::string>());
    if (!kind) throw std::invalid_argument("unknown variation kind in spec");
    spec.active.insert(*kind);
  }
  auto split = SplitFromName(j.at("split").get<std::string>());
  if (!split) throw std::invalid_argument("unknown split in spec");
  spec.split = *split;
  spec.seed = j.at("seed").get<uint64_t>();
  const auto& in = j.at("instances");
  auto shape = geom::ShapeFromName(in.at("shape").get<std::string>());
  if (!shape) throw std::invalid_argument("unknown shape in spec");
  VariationInstances& out = spec.instances;
  out.shape = *shape;
  out.peg_body = {BodyFromName(in.at("peg_body").at("shape").get<std::string>()),
                  in.at("peg_body").at("width_factor").get<double>()};
  out.hole_body = {BodyFromName(in.at("hole_body").at("shape").get<std::string>()),
                   in.at("hole_body").at("width_factor").get<double>()};
  out.peg_grasp = GraspFromJson(in.at("peg_grasp"));
  out.hole_grasp = GraspFromJson(in.at("hole_grasp"));
  out.appearance = AppearanceFromJson(in.at("appearance"));
  const auto& cams = in.at("cameras");
  for (size_t i = 0; i < out.cameras.size(); ++i) out.cameras[i] = CameraFromJson(cams.at(i));
  const auto& n = in.at("noise");
  out.noise = {n.at("sigma_force").get<double>(), n.at("sigma_torque").get<double>(),
               n.at("sigma_pos").get<double>(), n.at("sigma_rot_deg").get<double>()};
  return spec;
}

nlohmann::json ToJson(const SceneAppearanceInstance& a) {
  return {{"floor_texture", a.floor_texture},
          {"object_color", ColorJson(a.object_color)},
          {"lighting",
           {{"on", a.lighting.on},
            {"color", ColorJson(a.lighting.color)},
            {"intensity", a.lighting.intensity}}}};
}

SceneAppearanceInstance AppearanceFromJson(const nlohmann::json& a) {
  SceneAppearanceInstance out;
  out.floor_texture = a.at("floor_texture").get<int>();
  if (out.floor_texture < 0 || out.floor_texture >= kFloorTextureCount) {
    throw std::invalid_argument("floor texture id out of range");
  }
  out.object_color = ColorFromJson(a.at("object_color"));
  out.lighting.on = a.at("lighting").at("on").get<bool>();
  out.lighting.color = ColorFromJson(a.at("lighting").at("color"));
  out.lighting.intensity = a.at("lighting").at("intensity").get<double>();
  return out;
}

nlohmann::json ToJson(const CameraPoseInstance& c) {
  return {{"translation", VecJson(c.translation)}, {"axis", VecJson(c.axis)},
          {"angle_deg", c.angle_deg}};
}

CameraPoseInstance CameraFromJson(const nlohmann::json& j) {
  CameraPoseInstance c;
  c.translation = VecFromJson(j.at("translation"));
  c.axis = VecFromJson(j.at("axis"));
  c.angle_deg = j.at("angle_deg").get<double>();
  return c;
}

}  // namespace pegbench::variations

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

#include "pegbench/sim.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

namespace pegbench::sim {
namespace {

constexpr double kMmToM = 1e-3;
constexpr int kClampIterations = 24;

Eigen::Vector3d Lift(geom::Vec2 v, double z = 0.0) { return {v.x, v.y, z}; }

geom::ContactQuery Query(const WorldState& s, geom::Vec2 offset, const SimConfig& config) {
  return geom::QueryContact(s.geometry->peg, s.geometry->cavity, offset, config.grid_pitch);
}

// Largest step toward `target` along one axis that keeps the peg insertable.
// `from` must be insertable.
geom::Vec2 ClampAxis(const WorldState& s, geom::Vec2 from, geom::Vec2 target,
                     const SimConfig& config) {
  if (Query(s, target, config).insertable) return target;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < kClampIterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (Query(s, from + (target - from) * mid, config).insertable) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return from + (target - from) * lo;
}

ObjectWrenches InsertionWrench(geom::Vec2 lateral_offset, double depth, geom::Vec2 excess,
                               bool bottomed, const SimConfig& config) {
  const Eigen::Vector3d wall(-config.wall_stiffness * excess.x,
                             -config.wall_stiffness * excess.y, 0.0);
  const double wall_norm = wall.norm();
  const double axial =
      bottomed ? -config.push_force : -std::min(config.push_force, config.friction_mu * wall_norm);
  ObjectWrenches out;
  out.peg.force = wall + Eigen::Vector3d(0.0, 0.0, axial);
  // wall contact acts halfway along the inserted length
  const Eigen::Vector3d r_peg(0.0, 0.0, -0.5 * depth);
  out.peg.torque = (r_peg * kMmToM).cross(out.peg.force);
  out.hole.force = -out.peg.force;
  const Eigen::Vector3d r_hole = Lift(lateral_offset, 0.5 * depth);
  out.hole.torque = (r_hole * kMmToM).cross(out.hole.force);
  return out;
}

}  // namespace

void SimConfig::Validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("sim config: ") + name + " must be positive");
    }
  };
  positive(push_force, "push_force");
  positive(advance_rate, "advance_rate");
  positive(hole_depth, "hole_depth");
  positive(friction_mu, "friction_mu");
  positive(wall_stiffness, "wall_stiffness");
  positive(max_delta, "max_delta");
  positive(ft_fail_force, "ft_fail_force");
  positive(ft_fail_torque, "ft_fail_torque");
  positive(tolerance, "tolerance");
  for (double d : success_thresholds) positive(d, "success_thresholds");
  if (horizon <= 0) throw std::invalid_argument("sim config: horizon must be positive");
  if (grid_pitch < 0.1 || grid_pitch > 1.0) {
    throw std::invalid_argument("sim config: grid_pitch must lie in [0.1, 1.0]");
  }
  if (action_dim != 2 && action_dim != 3) {
    throw std::invalid_argument("sim config: action_dim must be 2 or 3");
  }
  if (max_delta * horizon <= 60.0) {
    throw std::invalid_argument("sim config: max_delta * horizon must exceed 60 mm");
  }
}

nlohmann::json ToJson(const SimConfig& c) {
  return {{"push_force", c.push_force},
          {"advance_rate", c.advance_rate},
          {"hole_depth", c.hole_depth},
          {"friction_mu", c.friction_mu},
          {"wall_stiffness", c.wall_stiffness},
          {"max_delta", c.max_delta},
          {"horizon", c.horizon},
          {"success_thresholds", c.success_thresholds},
          {"ft_fail_force", c.ft_fail_force},
          {"ft_fail_torque", c.ft_fail_torque},
          {"grid_pitch", c.grid_pitch},
          {"tolerance", c.tolerance},
          {"action_dim", c.action_dim}};
}

SimConfig SimConfigFromJson(const nlohmann::json& j) {
  SimConfig c;
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("push_force", c.push_force);
  get("advance_rate", c.advance_rate);
  get("hole_depth", c.hole_depth);
  get("friction_mu", c.friction_mu);
  get("wall_stiffness", c.wall_stiffness);
  get("max_delta", c.max_delta);
  get("horizon", c.horizon);
  get("success_thresholds", c.success_thresholds);
  get("ft_fail_force", c.ft_fail_force);
  get("ft_fail_torque", c.ft_fail_torque);
  get("grid_pitch", c.grid_pitch);
  get("tolerance", c.tolerance);
  get("action_dim", c.action_dim);
  c.Validate();
  return c;
}

std::string_view FailureName(Failure failure) {
  switch (failure) {
    case Failure::kNone: return "none";
    case Failure::kHorizonExceeded: return "horizon";
    case Failure::kForceTorqueExceeded: return "force_torque";
  }
  return "";
}

std::shared_ptr<const EpisodeGeometry> MakeGeometry(geom::ShapeId shape, double tolerance) {
  geom::Polygon2 peg = geom::BuildShape(shape);
  geom::Polygon2 cavity = geom::Dilate(peg, tolerance);
  return std::make_shared<const EpisodeGeometry>(EpisodeGeometry{std::move(peg), std::move(cavity)});
}

geom::Vec2 SampleInitialOffset(uint64_t seed) {
  Rng rng = Rng::ForStream(seed, Stream::kEpisode);
  auto component = [&rng]() {
    const double magnitude = rng.Uniform(15.0, 30.0);
    return rng.Bernoulli(0.5) ? magnitude : -magnitude;
  };
  const double x = component();
  const double y = component();
  return {x, y};
}

WorldState InitEpisode(uint64_t seed, const variations::VariationSpec& spec,
                       const SimConfig& config) {
  return InitEpisodeAt(seed, spec, SampleInitialOffset(seed), config);
}

WorldState InitEpisodeAt(uint64_t seed, const variations::VariationSpec& spec, geom::Vec2 offset,
                         const SimConfig& config) {
  config.Validate();
  WorldState s;
  s.lateral_offset = offset;
  s.seed = seed;
  s.spec = spec;
  s.geometry = MakeGeometry(spec.instances.shape, config.tolerance);
  s.noise_rng = Rng(MixSeed(MixSeed(seed, static_cast<uint64_t>(Stream::kNoise)), spec.seed));
  const geom::ContactQuery q = Query(s, offset, config);
  ObjectWrenches w;
  if (!q.insertable) w = ContactWrench(q, offset, {0.0, 0.0}, 0.0, config);
  std::tie(s.last_wrench_moving, s.last_wrench_compliant) = ToWrists(w, s);
  return s;
}

ObjectWrenches ContactWrench(const geom::ContactQuery& q, geom::Vec2 lateral_offset,
                             geom::Vec2 lateral_velocity, double press_depth,
                             const SimConfig& config) {
  ObjectWrenches out;
  if (q.insertable) return out;
  const double normal = config.push_force + config.wall_stiffness * std::max(0.0, press_depth);
  Eigen::Vector3d force(0.0, 0.0, -normal);
  const double speed = lateral_velocity.Norm();
  if (speed > 0.0) {
    const double friction = config.friction_mu * normal / speed;
    force.x() = -friction * lateral_velocity.x;
    force.y() = -friction * lateral_velocity.y;
  }
  const geom::Vec2 c = q.blocked_centroid.value_or(geom::Vec2{});
  out.peg.force = force;
  out.peg.torque = (Lift(c) * kMmToM).cross(force);
  out.hole.force = -force;
  out.hole.torque = (Lift(c + lateral_offset) * kMmToM).cross(out.hole.force);
  return out;
}

Wrench WristWrench(const Wrench& w, const variations::GraspTransform& grasp) {
  const variations::RigidTransform g = variations::GraspRigidTransform(grasp);
  Wrench out;
  out.force = g.rotation * w.force;
  out.torque = g.rotation * w.torque + (g.translation * kMmToM).cross(out.force);
  return out;
}

Eigen::Matrix3d NominalRotation(Arm arm) {
  if (arm == Arm::kMoving) return Eigen::Matrix3d::Identity();
  Eigen::Matrix3d r = Eigen::Matrix3d::Zero();
  r(0, 0) = -1.0;
  r(1, 1) = 1.0;
  r(2, 2) = -1.0;
  return r;
}

Eigen::Vector3d ObjectOrigin(const WorldState& s, Arm arm) {
  if (arm == Arm::kMoving) return Lift(s.lateral_offset);
  return {0.0, 0.0, -s.depth};
}

std::pair<Wrench, Wrench> ToWrists(const ObjectWrenches& w, const WorldState& s) {
  const Eigen::Matrix3d nom_c = NominalRotation(Arm::kCompliant).transpose();
  Wrench hole_nominal{nom_c * w.hole.force, nom_c * w.hole.torque};
  return {WristWrench(w.peg, s.peg_grasp()), WristWrench(hole_nominal, s.hole_grasp())};
}

bool CheckSuccess(const WorldState& s, const SimConfig& config) {
  const auto& d = config.success_thresholds;
  // the axial test is non-strict so that depth = hole_depth - d_z counts
  return std::abs(s.lateral_offset.x) < d[0] && std::abs(s.lateral_offset.y) < d[1] &&
         config.hole_depth - s.depth <= d[2];
}

bool ExceedsFtLimits(const Wrench& w, const SimConfig& config) {
  return w.force.norm() > config.ft_fail_force || w.torque.norm() > config.ft_fail_torque;
}

Eigen::Vector3d ActionToDelta(const Action& action, const SimConfig& config) {
  Eigen::Vector3d delta;
  for (int i = 0; i < 3; ++i) {
    const double a = action[i];
    if (!std::isfinite(a)) throw std::invalid_argument("action component is not finite");
    delta[i] = (std::clamp(a, 0.0, 1.0) - 0.5) * 2.0 * config.max_delta;
  }
  if (config.action_dim == 2) delta.z() = 0.0;
  return delta;
}

StepInfo Step(WorldState& s, const Action& action, const SimConfig& config,
              const StepOverride& override_wrench) {
  if (s.terminal) throw TerminalStateError();
  const Eigen::Vector3d delta = ActionToDelta(action, config);
  const geom::Vec2 lateral{delta.x(), delta.y()};
  const geom::Vec2 target = s.lateral_offset + lateral;
  const double press = std::max(0.0, delta.z());

  ObjectWrenches w;
  if (s.depth == 0.0) {
    const geom::ContactQuery q = Query(s, target, config);
    s.lateral_offset = target;
    if (q.insertable) {
      s.depth = std::min(config.hole_depth, config.advance_rate + press);
    } else {
      w = ContactWrench(q, target, lateral, press, config);
    }
  } else {
    const bool bottomed = s.depth >= config.hole_depth;
    geom::Vec2 clamped = ClampAxis(s, s.lateral_offset, {target.x, s.lateral_offset.y}, config);
    clamped = ClampAxis(s, clamped, {clamped.x, target.y}, config);
    s.lateral_offset = clamped;
    s.depth = std::min(config.hole_depth, s.depth + config.advance_rate + press);
    w = InsertionWrench(clamped, s.depth, target - clamped, bottomed, config);
  }
  ++s.step;

  if (override_wrench.peg) w.peg = *override_wrench.peg;
  if (override_wrench.hole) w.hole = *override_wrench.hole;
  StepInfo info;
  std::tie(info.wrench_moving, info.wrench_compliant) = ToWrists(w, s);
  s.last_wrench_moving = info.wrench_moving;
  s.last_wrench_compliant = info.wrench_compliant;

  // judged on the object wrenches: the grasp lever only re-expresses them
  if (ExceedsFtLimits(w.peg, config) || ExceedsFtLimits(w.hole, config)) {
    info.failure = Failure::kForceTorqueExceeded;
  } else if (CheckSuccess(s, config)) {
    info.success = true;
  } else if (s.step >= config.horizon) {
    info.failure = Failure::kHorizonExceeded;
  }
  s.terminal = info.terminal();
  return info;
}

}  // namespace pegbench::sim

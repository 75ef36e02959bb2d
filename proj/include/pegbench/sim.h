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

#ifndef PEGBENCH_SIM_H_
#define PEGBENCH_SIM_H_

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string_view>

#include <Eigen/Core>

#include "json.hpp"
#include "pegbench/geom.h"
#include "pegbench/rng.h"
#include "pegbench/variations.h"

namespace pegbench::sim {

// World frame: the insertion axis is +z; the hole's lateral position is the
// origin. The peg face center sits at (offset_x, offset_y, 0) and the hole
// face center at (0, 0, -depth), so depth grows as the compliant arm advances
// the hole over the peg. Both objects stay axis-aligned.
struct SimConfig {
  double push_force = 15.0;      // N
  double advance_rate = 2.5;     // mm/step
  double hole_depth = 25.0;      // mm
  double friction_mu = 0.3;
  double wall_stiffness = 40.0;  // N/mm
  double max_delta = 2.0;        // mm/step
  int horizon = 200;
  std::array<double, 3> success_thresholds = {2.0, 2.0, 10.0};  // mm
  double ft_fail_force = 100.0;  // N
  double ft_fail_torque = 6.0;   // N m
  double grid_pitch = 0.5;       // mm
  double tolerance = 5.0;        // mm, cavity dilation
  int action_dim = 3;            // 2 drops the insertion-axis component

  // Throws std::invalid_argument when a field is out of range.
  void Validate() const;
};

nlohmann::json ToJson(const SimConfig& config);
// Missing keys keep their defaults.
SimConfig SimConfigFromJson(const nlohmann::json& j);

struct Wrench {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();   // N
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();  // N m
  bool operator==(const Wrench& o) const { return force == o.force && torque == o.torque; }
};

enum class Failure { kNone, kHorizonExceeded, kForceTorqueExceeded };
std::string_view FailureName(Failure failure);

struct StepInfo {
  Wrench wrench_moving;
  Wrench wrench_compliant;
  bool success = false;
  Failure failure = Failure::kNone;
  bool terminal() const { return success || failure != Failure::kNone; }
};

class TerminalStateError : public std::logic_error {
 public:
  TerminalStateError() : std::logic_error("step called on a terminated episode") {}
};

// Peg cross-section and its dilated cavity, shared by copies of a state.
struct EpisodeGeometry {
  geom::Polygon2 peg;
  geom::Polygon2 cavity;
};
std::shared_ptr<const EpisodeGeometry> MakeGeometry(geom::ShapeId shape, double tolerance);

enum class Arm { kMoving, kCompliant };

struct WorldState {
  geom::Vec2 lateral_offset;  // peg minus hole, mm
  double depth = 0.0;         // mm
  int step = 0;
  uint64_t seed = 0;
  variations::VariationSpec spec;
  std::shared_ptr<const EpisodeGeometry> geometry;
  // drives sensor noise only; simulation itself draws nothing after init
  Rng noise_rng;
  Wrench last_wrench_moving;    // wrist frame
  Wrench last_wrench_compliant; // wrist frame
  bool terminal = false;

  const variations::GraspTransform& peg_grasp() const { return spec.instances.peg_grasp; }
  const variations::GraspTransform& hole_grasp() const { return spec.instances.hole_grasp; }
};

// Initial offset components are i.i.d. with magnitude U[15, 30] mm and a
// random sign, drawn from the seed's episode stream only (the variation spec
// does not influence them).
geom::Vec2 SampleInitialOffset(uint64_t seed);

WorldState InitEpisode(uint64_t seed, const variations::VariationSpec& spec,
                       const SimConfig& config = {});
// Same as InitEpisode with an explicit initial offset (used by replay).
WorldState InitEpisodeAt(uint64_t seed, const variations::VariationSpec& spec, geom::Vec2 offset,
                         const SimConfig& config = {});

using Action = std::array<float, 3>;

// Object-frame wrenches on the peg and on the hole, each about its own
// object origin.
struct ObjectWrenches {
  Wrench peg;
  Wrench hole;
};

// Contact-phase wrench at depth 0. `press_depth` is the extra axial push from
// a positive insertion-axis action, in mm.
ObjectWrenches ContactWrench(const geom::ContactQuery& q, geom::Vec2 lateral_offset,
                             geom::Vec2 lateral_velocity, double press_depth,
                             const SimConfig& config);

// F' = R F, tau' = R tau + t x (R F) with t in mm converted to meters.
Wrench WristWrench(const Wrench& object_wrench, const variations::GraspTransform& grasp);

// Rotation from the arm's nominal grasp frame to the world frame: identity for
// the moving arm, a half turn about y for the compliant arm (which faces the
// peg).
Eigen::Matrix3d NominalRotation(Arm arm);

// Object-frame origin of each object in world coordinates.
Eigen::Vector3d ObjectOrigin(const WorldState& state, Arm arm);

// Re-expresses object-frame wrenches at both wrists.
std::pair<Wrench, Wrench> ToWrists(const ObjectWrenches& w, const WorldState& state);

bool CheckSuccess(const WorldState& state, const SimConfig& config);
bool ExceedsFtLimits(const Wrench& w, const SimConfig& config);

// Optional overrides for tests: replaces the computed object-frame wrenches
// before termination is decided.
struct StepOverride {
  std::optional<Wrench> peg;
  std::optional<Wrench> hole;
};

// Advances one step. Termination priority: force-torque limit, then success,
// then horizon. The limits apply to the object-frame wrenches, so the grasp
// never changes when an episode ends. Throws TerminalStateError if the
// episode already ended.
StepInfo Step(WorldState& state, const Action& action, const SimConfig& config = {},
              const StepOverride& override_wrench = {});

// Mapped delta per axis: (a - 0.5) * 2 * max_delta, with axis 2 zeroed in
// 2-D action mode.
Eigen::Vector3d ActionToDelta(const Action& action, const SimConfig& config);

}  // namespace pegbench::sim

#endif  // PEGBENCH_SIM_H_

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

#ifndef PEGBENCH_GEOM_H_
#define PEGBENCH_GEOM_H_

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace pegbench::geom {

// All coordinates are millimeters.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2&) const = default;
  double Norm() const { return std::hypot(x, y); }
};

inline double Dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double Cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Box2 {
  Vec2 min;
  Vec2 max;
};

// Simple counter-clockwise polygon. The constructor enforces the invariants
// (>= 3 vertices, finite, |coordinate| < 1e4, simple, positive area) and
// throws GeometryError otherwise.
class Polygon2 {
 public:
  explicit Polygon2(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  size_t size() const { return vertices_.size(); }
  const Vec2& operator[](size_t i) const { return vertices_[i]; }

  double SignedArea() const;
  Vec2 Centroid() const;
  Box2 Bounds() const;

  bool operator==(const Polygon2&) const = default;

 private:
  std::vector<Vec2> vertices_;
};

// True when no two non-adjacent edges intersect.
bool IsSimple(const std::vector<Vec2>& vertices);

enum class ShapeId { kArrow, kCircle, kCross, kDiamond, kHexagon, kKey, kLine, kPentagon, kU };

inline constexpr std::array<ShapeId, 9> kAllShapes = {
    ShapeId::kArrow,   ShapeId::kCircle, ShapeId::kCross, ShapeId::kDiamond, ShapeId::kHexagon,
    ShapeId::kKey,     ShapeId::kLine,   ShapeId::kPentagon, ShapeId::kU};

std::string_view ShapeName(ShapeId id);
std::optional<ShapeId> ShapeFromName(std::string_view name);

// Canonical cross-section of `id`, fit to a 40 mm x 40 mm box centered on the
// origin and uniformly scaled. scale must lie in (0, 2].
Polygon2 BuildShape(ShapeId id, double scale = 1.0);

// Outward offset by `offset` mm. Convex corners use miter joins; reflex
// corners meet at the intersection of the two offset edges. Throws
// GeometryError when an offset edge flips direction or the result is not
// simple.
Polygon2 Dilate(const Polygon2& poly, double offset);

// Even-odd containment with a +x ray. Points within 1e-9 mm of an edge count
// as inside.
bool PointIn(const Polygon2& poly, Vec2 p);

// Distance from p to the polygon boundary.
double BoundaryDistance(const Polygon2& poly, Vec2 p);

// Rotation (degrees, counter-clockwise) about the area centroid, then
// translation.
Polygon2 Transform(const Polygon2& poly, double rotation_deg, Vec2 translation);

struct ContactQuery {
  bool insertable = false;
  double blocked_fraction = 0.0;
  // mean of blocked samples in the peg's own frame; set iff blocked_fraction > 0
  std::optional<Vec2> blocked_centroid;
  int samples = 0;

  bool operator==(const ContactQuery&) const = default;
};

inline constexpr double kDefaultGridPitch = 0.5;

// Samples the interior of `peg` on a grid of pitch `grid_pitch` anchored at
// the peg's bounding-box corner, translates the samples by `lateral_offset`
// and counts those that fall outside `cavity`. Throws GeometryError when the
// pitch lies outside [0.1, 1.0] or the peg has no interior samples.
ContactQuery QueryContact(const Polygon2& peg, const Polygon2& cavity, Vec2 lateral_offset,
                          double grid_pitch = kDefaultGridPitch);

// Exact containment of peg + offset in cavity: every peg vertex inside the
// cavity, no cavity vertex strictly inside the translated peg and no proper
// edge crossing.
bool ContainsTranslated(const Polygon2& cavity, const Polygon2& peg, Vec2 offset);

nlohmann::json ShapeJson(ShapeId id, const Polygon2& poly);
// [{"shape", "vertices_mm"}] for all nine shapes at scale 1
nlohmann::json ShapeCatalogJson();

}  // namespace pegbench::geom

#endif  // PEGBENCH_GEOM_H_

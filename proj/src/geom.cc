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

#include "pegbench/geom.h"

#include <algorithm>
#include <numbers>

namespace pegbench::geom {
namespace {

constexpr double kEdgeTolerance = 1e-9;
constexpr double kMaxCoordinate = 1e4;

// sign of the turn a -> b -> c
double Orient(Vec2 a, Vec2 b, Vec2 c) { return Cross(b - a, c - a); }

bool OnSegment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

// closed segment intersection, including touching and collinear overlap
bool SegmentsIntersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double d1 = Orient(c, d, a);
  const double d2 = Orient(c, d, b);
  const double d3 = Orient(a, b, c);
  const double d4 = Orient(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && OnSegment(c, d, a)) return true;
  if (d2 == 0 && OnSegment(c, d, b)) return true;
  if (d3 == 0 && OnSegment(a, b, c)) return true;
  if (d4 == 0 && OnSegment(a, b, d)) return true;
  return false;
}

bool SegmentsCrossProperly(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double d1 = Orient(c, d, a);
  const double d2 = Orient(c, d, b);
  const double d3 = Orient(a, b, c);
  const double d4 = Orient(a, b, d);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

double SegmentDistance(Vec2 a, Vec2 b, Vec2 p) {
  const Vec2 ab = b - a;
  const double len2 = Dot(ab, ab);
  double t = len2 > 0 ? Dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + ab * t - p).Norm();
}

// x coordinates where the horizontal line through y crosses the polygon,
// using the same half-open rule as the ray-casting test
void RowCrossings(const Polygon2& poly, double y, std::vector<double>* out) {
  out->clear();
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[j];
    const Vec2 b = poly[i];
    if ((a.y > y) != (b.y > y)) {
      out->push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
    }
  }
  std::sort(out->begin(), out->end());
}

bool RowHasVertex(const Polygon2& poly, double y) {
  for (const Vec2& v : poly.vertices()) {
    if (std::abs(v.y - y) <= 1e-6) return true;
  }
  return false;
}

// Incremental classifier for increasing x along one row. Falls back to the
// exact point test whenever a sample sits near a crossing.
class RowClassifier {
 public:
  RowClassifier(const Polygon2& poly, const std::vector<double>& crossings, double y, bool exact)
      : poly_(poly), crossings_(crossings), y_(y), exact_(exact) {}

  bool Inside(double x) {
    if (exact_) return PointIn(poly_, {x, y_});
    while (next_ < crossings_.size() && crossings_[next_] < x - 1e-6) ++next_;
    if (next_ < crossings_.size() && crossings_[next_] <= x + 1e-6) {
      return PointIn(poly_, {x, y_});
    }
    return (next_ % 2) == 1;
  }

 private:
  const Polygon2& poly_;
  const std::vector<double>& crossings_;
  double y_;
  bool exact_;
  size_t next_ = 0;
};

// parameters in (0, 1) at which segment a-b meets the boundary of poly
std::vector<double> SplitParams(Vec2 a, Vec2 b, const Polygon2& poly) {
  std::vector<double> ts = {0.0, 1.0};
  const Vec2 r = b - a;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 c = poly[j];
    const Vec2 s = poly[i] - c;
    const double denom = Cross(r, s);
    if (std::abs(denom) < 1e-14) {
      // parallel: project collinear endpoints
      if (std::abs(Cross(c - a, r)) < 1e-9) {
        const double len2 = Dot(r, r);
        for (Vec2 q : {c, poly[i]}) {
          const double t = Dot(q - a, r) / len2;
          if (t > 0 && t < 1) ts.push_back(t);
        }
      }
      continue;
    }
    const double t = Cross(c - a, s) / denom;
    const double u = Cross(c - a, r) / denom;
    if (t > 0 && t < 1 && u >= -1e-12 && u <= 1 + 1e-12) ts.push_back(t);
  }
  std::sort(ts.begin(), ts.end());
  return ts;
}

bool StrictlyInside(const Polygon2& poly, Vec2 p) {
  return PointIn(poly, p) && BoundaryDistance(poly, p) > kEdgeTolerance;
}

Polygon2 RegularPolygon(int sides, double radius, double phase_deg) {
  std::vector<Vec2> v;
  v.reserve(sides);
  for (int k = 0; k < sides; ++k) {
    const double a = (phase_deg + 360.0 * k / sides) * std::numbers::pi / 180.0;
    v.push_back({radius * std::cos(a), radius * std::sin(a)});
  }
  return Polygon2(std::move(v));
}

}  // namespace

Polygon2::Polygon2(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw GeometryError("polygon needs at least 3 vertices");
  for (const Vec2& v : vertices_) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || std::abs(v.x) >= kMaxCoordinate ||
        std::abs(v.y) >= kMaxCoordinate) {
      throw GeometryError("polygon coordinate out of range");
    }
  }
  if (!(SignedArea() > 0)) throw GeometryError("polygon must be counter-clockwise");
  if (!IsSimple(vertices_)) throw GeometryError("polygon self-intersects");
}

double Polygon2::SignedArea() const {
  double area = 0.0;
  const size_t n = vertices_.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) area += Cross(vertices_[j], vertices_[i]);
  return 0.5 * area;
}

Vec2 Polygon2::Centroid() const {
  double cx = 0.0, cy = 0.0, a2 = 0.0;
  const size_t n = vertices_.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const double c = Cross(vertices_[j], vertices_[i]);
    a2 += c;
    cx += (vertices_[j].x + vertices_[i].x) * c;
    cy += (vertices_[j].y + vertices_[i].y) * c;
  }
  return {cx / (3.0 * a2), cy / (3.0 * a2)};
}

Box2 Polygon2::Bounds() const {
  Box2 b{vertices_[0], vertices_[0]};
  for (const Vec2& v : vertices_) {
    b.min.x = std::min(b.min.x, v.x);
    b.min.y = std::min(b.min.y, v.y);
    b.max.x = std::max(b.max.x, v.x);
    b.max.y = std::max(b.max.y, v.y);
  }
  return b;
}

bool IsSimple(const std::vector<Vec2>& v) {
  const size_t n = v.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2 a = v[i], b = v[(i + 1) % n];
    if (a == b) return false;
    for (size_t j = i + 1; j < n; ++j) {
      // skip edges sharing a vertex
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (SegmentsIntersect(a, b, v[j], v[(j + 1) % n])) return false;
    }
  }
  return true;
}

std::string_view ShapeName(ShapeId id) {
  switch (id) {
    case ShapeId::kArrow: return "arrow";
    case ShapeId::kCircle: return "circle";
    case ShapeId::kCross: return "cross";
    case ShapeId::kDiamond: return "diamond";
    case ShapeId::kHexagon: return "hexagon";
    case ShapeId::kKey: return "key";
    case ShapeId::kLine: return "line";
    case ShapeId::kPentagon: return "pentagon";
    case ShapeId::kU: return "u";
  }
  return "";
}

std::optional<ShapeId> ShapeFromName(std::string_view name) {
  for (ShapeId id : kAllShapes) {
    if (ShapeName(id) == name) return id;
  }
  return std::nullopt;
}

Polygon2 BuildShape(ShapeId id, double scale) {
  if (!(scale > 0.0 && scale <= 2.0)) throw GeometryError("shape scale must lie in (0, 2]");
  Polygon2 base = [id]() -> Polygon2 {
    switch (id) {
      case ShapeId::kArrow:
        return Polygon2({{-6, -20}, {6, -20}, {6, 2}, {16, 2}, {0, 20}, {-16, 2}, {-6, 2}});
      case ShapeId::kCircle:
        return RegularPolygon(32, 20.0, 0.0);
      case ShapeId::kCross:
        return Polygon2({{-7, -20}, {7, -20}, {7, -7}, {20, -7}, {20, 7}, {7, 7},
                         {7, 20}, {-7, 20}, {-7, 7}, {-20, 7}, {-20, -7}, {-7, -7}});
      case ShapeId::kDiamond:
        return Polygon2({{0, -20}, {14, 0}, {0, 20}, {-14, 0}});
      case ShapeId::kHexagon:
        return RegularPolygon(6, 20.0, 0.0);
      case ShapeId::kKey:
        // blade along x with one tooth below it and a square bow on the right
        return Polygon2({{-20, -5}, {-14, -5}, {-14, -11}, {-8, -11}, {-8, -5}, {4, -5},
                         {4, -12}, {20, -12}, {20, 12}, {4, 12}, {4, 5}, {-20, 5}});
      case ShapeId::kLine:
        return Polygon2({{-20, -4}, {20, -4}, {20, 4}, {-20, 4}});
      case ShapeId::kPentagon:
        return RegularPolygon(5, 20.0, 90.0);
      case ShapeId::kU:
        return Polygon2({{-18, -18}, {18, -18}, {18, 18}, {8, 18},
                         {8, -8}, {-8, -8}, {-8, 18}, {-18, 18}});
    }
    throw GeometryError("unknown shape");
  }();
  if (scale == 1.0) return base;
  std::vector<Vec2> v = base.vertices();
  for (Vec2& p : v) p = p * scale;
  return Polygon2(std::move(v));
}

Polygon2 Dilate(const Polygon2& poly, double offset) {
  if (!(offset >= 0.0)) throw GeometryError("dilation offset must be non-negative");
  if (offset == 0.0) return poly;
  const auto& v = poly.vertices();
  const size_t n = v.size();
  std::vector<Vec2> normals(n);  // normal of edge i -> i+1
  for (size_t i = 0; i < n; ++i) {
    const Vec2 d = v[(i + 1) % n] - v[i];
    const double len = d.Norm();
    normals[i] = {d.y / len, -d.x / len};
  }
  std::vector<Vec2> out(n);
  for (size_t i = 0; i < n; ++i) {
    const Vec2 n1 = normals[(i + n - 1) % n];
    const Vec2 n2 = normals[i];
    const double c = 1.0 + Dot(n1, n2);
    if (c < 1e-9) throw GeometryError("dilation of a hairpin corner");
    out[i] = v[i] + (n1 + n2) * (offset / c);
  }
  for (size_t i = 0; i < n; ++i) {
    const Vec2 before = v[(i + 1) % n] - v[i];
    const Vec2 after = out[(i + 1) % n] - out[i];
    if (Dot(before, after) <= 0) throw GeometryError("dilation collapsed an edge");
  }
  if (!IsSimple(out)) throw GeometryError("dilation self-intersects");
  return Polygon2(std::move(out));
}

double BoundaryDistance(const Polygon2& poly, Vec2 p) {
  double best = INFINITY;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    best = std::min(best, SegmentDistance(poly[j], poly[i], p));
  }
  return best;
}

bool PointIn(const Polygon2& poly, Vec2 p) {
  const size_t n = poly.size();
  bool inside = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[j];
    const Vec2 b = poly[i];
    if (SegmentDistance(a, b, p) <= kEdgeTolerance) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (x > p.x) inside = !inside;
    }
  }
  return inside;
}

Polygon2 Transform(const Polygon2& poly, double rotation_deg, Vec2 translation) {
  std::vector<Vec2> v = poly.vertices();
  if (rotation_deg != 0.0) {
    const Vec2 c = poly.Centroid();
    const double a = rotation_deg * std::numbers::pi / 180.0;
    const double ca = std::cos(a), sa = std::sin(a);
    for (Vec2& p : v) {
      const Vec2 d = p - c;
      p = {c.x + ca * d.x - sa * d.y, c.y + sa * d.x + ca * d.y};
    }
  }
  if (translation.x != 0.0 || translation.y != 0.0) {
    for (Vec2& p : v) p = p + translation;
  }
  return Polygon2(std::move(v));
}

ContactQuery QueryContact(const Polygon2& peg, const Polygon2& cavity, Vec2 lateral_offset,
                          double grid_pitch) {
  if (!(grid_pitch >= 0.1 && grid_pitch <= 1.0)) {
    throw GeometryError("grid pitch must lie in [0.1, 1.0] mm");
  }
  const Box2 box = peg.Bounds();
  const int nx = static_cast<int>(std::ceil((box.max.x - box.min.x) / grid_pitch));
  const int ny = static_cast<int>(std::ceil((box.max.y - box.min.y) / grid_pitch));

  std::vector<double> peg_cross, cav_cross;
  int samples = 0, blocked = 0;
  double sum_x = 0.0, sum_y = 0.0;
  for (int j = 0; j < ny; ++j) {
    const double y = box.min.y + (j + 0.5) * grid_pitch;
    const double yc = y + lateral_offset.y;
    RowCrossings(peg, y, &peg_cross);
    RowCrossings(cavity, yc, &cav_cross);
    RowClassifier in_peg(peg, peg_cross, y, RowHasVertex(peg, y));
    RowClassifier in_cavity(cavity, cav_cross, yc, RowHasVertex(cavity, yc));
    for (int i = 0; i < nx; ++i) {
      const double x = box.min.x + (i + 0.5) * grid_pitch;
      if (!in_peg.Inside(x)) continue;
      ++samples;
      if (!in_cavity.Inside(x + lateral_offset.x)) {
        ++blocked;
        sum_x += x;
        sum_y += y;
      }
    }
  }
  if (samples == 0) throw GeometryError("peg has no interior grid samples");

  ContactQuery q;
  q.samples = samples;
  q.insertable = blocked == 0;
  q.blocked_fraction = static_cast<double>(blocked) / samples;
  if (blocked > 0) q.blocked_centroid = Vec2{sum_x / blocked, sum_y / blocked};
  return q;
}

bool ContainsTranslated(const Polygon2& cavity, const Polygon2& peg_local, Vec2 offset) {
  std::vector<Vec2> moved = peg_local.vertices();
  for (Vec2& p : moved) p = p + offset;
  const Polygon2 peg(std::move(moved));

  for (const Vec2& v : peg.vertices()) {
    if (!PointIn(cavity, v)) return false;
  }
  for (const Vec2& v : cavity.vertices()) {
    if (StrictlyInside(peg, v)) return false;
  }
  const size_t np = peg.size(), nc = cavity.size();
  for (size_t i = 0, j = np - 1; i < np; j = i++) {
    for (size_t k = 0, l = nc - 1; k < nc; l = k++) {
      if (SegmentsCrossProperly(peg[j], peg[i], cavity[l], cavity[k])) return false;
    }
  }
  // touching configurations: peg edge pieces must stay in the cavity and
  // cavity edge pieces must stay out of the peg interior
  for (size_t i = 0, j = np - 1; i < np; j = i++) {
    const Vec2 a = peg[j], b = peg[i];
    const auto ts = SplitParams(a, b, cavity);
    for (size_t m = 1; m < ts.size(); ++m) {
      if (!PointIn(cavity, a + (b - a) * (0.5 * (ts[m - 1] + ts[m])))) return false;
    }
  }
  for (size_t k = 0, l = nc - 1; k < nc; l = k++) {
    const Vec2 a = cavity[l], b = cavity[k];
    const auto ts = SplitParams(a, b, peg);
    for (size_t m = 1; m < ts.size(); ++m) {
      if (StrictlyInside(peg, a + (b - a) * (0.5 * (ts[m - 1] + ts[m])))) return false;
    }
  }
  return true;
}

nlohmann::json ShapeJson(ShapeId id, const Polygon2& poly) {
  nlohmann::json verts = nlohmann::json::array();
  for (const Vec2& v : poly.vertices()) verts.push_back({v.x, v.y});
  return {{"shape", std::string(ShapeName(id))}, {"vertices_mm", verts}};
}

nlohmann::json ShapeCatalogJson() {
  nlohmann::json out = nlohmann::json::array();
  for (ShapeId id : kAllShapes) out.push_back(ShapeJson(id, BuildShape(id, 1.0)));
  return out;
}

}  // namespace pegbench::geom

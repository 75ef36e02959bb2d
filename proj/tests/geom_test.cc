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
#include <cmath>
#include <numbers>
#include <vector>

#include "gtest/gtest.h"
#include "pegbench/rng.h"

namespace pegbench::geom {
namespace {

// winding-number containment, independent of the library's ray casting
bool WindingContains(const Polygon2& poly, Vec2 p) {
  int wn = 0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % n];
    const double side = Cross(b - a, p - a);
    if (a.y <= p.y) {
      if (b.y > p.y && side > 0) ++wn;
    } else {
      if (b.y <= p.y && side < 0) --wn;
    }
  }
  return wn != 0;
}

double SegmentDistance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  double t = Dot(p - a, ab) / Dot(ab, ab);
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + ab * t)).Norm();
}

double EdgeDistance(const Polygon2& poly, Vec2 p) {
  double d = 1e300;
  for (size_t i = 0; i < poly.size(); ++i) {
    d = std::min(d, SegmentDistance(p, poly[i], poly[(i + 1) % poly.size()]));
  }
  return d;
}

std::vector<Vec2> GridSamples(const Polygon2& poly, double pitch) {
  std::vector<Vec2> out;
  const Box2 b = poly.Bounds();
  for (double x = b.min.x; x <= b.max.x; x += pitch) {
    for (double y = b.min.y; y <= b.max.y; y += pitch) {
      if (WindingContains(poly, {x, y})) out.push_back({x, y});
    }
  }
  return out;
}

Polygon2 Square(double side) {
  const double h = side / 2;
  return Polygon2({{-h, -h}, {h, -h}, {h, h}, {-h, h}});
}

TEST(Polygon2, RejectsInvalid) {
  EXPECT_THROW(Polygon2({{0, 0}, {1, 0}}), GeometryError);
  // clockwise
  EXPECT_THROW(Polygon2({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), GeometryError);
  // bow tie
  EXPECT_THROW(Polygon2({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), GeometryError);
  EXPECT_THROW(Polygon2({{0, 0}, {2e4, 0}, {0, 1}}), GeometryError);
  EXPECT_THROW(Polygon2({{0, 0}, {NAN, 0}, {0, 1}}), GeometryError);
}

TEST(BuildShape, AllShapesValidAndFitBox) {
  for (ShapeId id : kAllShapes) {
    const Polygon2 p = BuildShape(id);
    EXPECT_GT(p.SignedArea(), 0.0) << ShapeName(id);
    EXPECT_TRUE(IsSimple(p.vertices())) << ShapeName(id);
    const Box2 b = p.Bounds();
    EXPECT_GE(b.min.x, -20.0 - 1e-9);
    EXPECT_GE(b.min.y, -20.0 - 1e-9);
    EXPECT_LE(b.max.x, 20.0 + 1e-9);
    EXPECT_LE(b.max.y, 20.0 + 1e-9);
    EXPECT_EQ(BuildShape(id), p);
    EXPECT_EQ(ShapeFromName(ShapeName(id)), id);
  }
  EXPECT_THROW(BuildShape(ShapeId::kKey, 0.0), GeometryError);
  EXPECT_THROW(BuildShape(ShapeId::kKey, 2.5), GeometryError);
}

TEST(BuildShape, DiamondHalfTurnSymmetric) {
  const Polygon2 d = BuildShape(ShapeId::kDiamond);
  ASSERT_EQ(d.size(), 4u);
  for (const Vec2& v : d.vertices()) {
    const bool found = std::any_of(d.vertices().begin(), d.vertices().end(), [&](Vec2 w) {
      return (w + v).Norm() < 1e-9;
    });
    EXPECT_TRUE(found);
  }
}

TEST(BuildShape, HexagonAreaClosedForm) {
  const Polygon2 h = BuildShape(ShapeId::kHexagon);
  ASSERT_EQ(h.size(), 6u);
  const double s = (h[1] - h[0]).Norm();
  for (size_t i = 0; i < 6; ++i) EXPECT_NEAR((h[(i + 1) % 6] - h[i]).Norm(), s, 1e-9);
  const double closed = 3.0 * std::sqrt(3.0) / 2.0 * s * s;
  EXPECT_NEAR(h.SignedArea() / closed, 1.0, 1e-9);
}

TEST(BuildShape, CircleAreaNearPiRSquared) {
  const Polygon2 c = BuildShape(ShapeId::kCircle);
  ASSERT_EQ(c.size(), 32u);
  const Vec2 center = c.Centroid();
  const double r = (c[0] - center).Norm();
  EXPECT_NEAR(c.SignedArea() / (std::numbers::pi * r * r), 1.0, 0.01);
}

TEST(Dilate, SquareMiter) {
  const Polygon2 d = Dilate(Square(20.0), 5.0);
  ASSERT_EQ(d.size(), 4u);
  const Polygon2 expected = Square(30.0);
  for (const Vec2& v : expected.vertices()) {
    const bool found = std::any_of(d.vertices().begin(), d.vertices().end(),
                                   [&](Vec2 w) { return (w - v).Norm() < 1e-9; });
    EXPECT_TRUE(found) << v.x << "," << v.y;
  }
}

TEST(Dilate, ZeroIsIdentity) {
  for (ShapeId id : kAllShapes) {
    const Polygon2 p = BuildShape(id);
    const Polygon2 d = Dilate(p, 0.0);
    ASSERT_EQ(d.size(), p.size());
    for (size_t i = 0; i < p.size(); ++i) EXPECT_LT((d[i] - p[i]).Norm(), 1e-9);
  }
}

TEST(Dilate, CrossContainsOriginalGrid) {
  const Polygon2 cross = BuildShape(ShapeId::kCross);
  const Polygon2 d = Dilate(cross, 5.0);
  const auto samples = GridSamples(cross, 0.25);
  ASSERT_GT(samples.size(), 1000u);
  for (const Vec2& s : samples) ASSERT_TRUE(WindingContains(d, s));
}

TEST(Dilate, ResultKeepsClearance) {
  for (ShapeId id : kAllShapes) {
    const Polygon2 p = BuildShape(id);
    const Polygon2 d = Dilate(p, 5.0);
    for (const Vec2& s : GridSamples(p, 0.5)) {
      ASSERT_GE(EdgeDistance(d, s), 5.0 - 1e-6) << ShapeName(id);
    }
  }
}

TEST(Dilate, ConvexSuperset) {
  for (ShapeId id : {ShapeId::kHexagon, ShapeId::kDiamond, ShapeId::kCircle, ShapeId::kPentagon}) {
    const Polygon2 p = BuildShape(id);
    const Polygon2 twice = Dilate(Dilate(p, 2.0), 3.0);
    for (const Vec2& s : GridSamples(Dilate(p, 5.0), 0.25)) {
      ASSERT_TRUE(WindingContains(twice, s) || EdgeDistance(twice, s) < 1e-9) << ShapeName(id);
    }
  }
}

TEST(PointIn, Basics) {
  for (ShapeId id : kAllShapes) {
    const Polygon2 p = BuildShape(id);
    EXPECT_FALSE(PointIn(p, {25.0, 25.0}));
    EXPECT_FALSE(PointIn(p, {-100.0, 0.0}));
  }
  const Polygon2 hex = BuildShape(ShapeId::kHexagon);
  EXPECT_TRUE(PointIn(hex, hex.Centroid()));
  // boundary points count as inside
  const Polygon2 sq = Square(20.0);
  EXPECT_TRUE(PointIn(sq, {10.0, 0.0}));
  EXPECT_TRUE(PointIn(sq, {10.0, 10.0}));
}

TEST(PointIn, AgreesWithRasterOracle) {
  Rng rng(11);
  for (ShapeId id : kAllShapes) {
    const Polygon2 p = BuildShape(id);
    int compared = 0, agree = 0;
    for (int i = 0; i < 10000; ++i) {
      // snap to the 0.25 mm raster
      const Vec2 q{std::round(rng.Uniform(-22, 22) * 4) / 4, std::round(rng.Uniform(-22, 22) * 4) / 4};
      if (EdgeDistance(p, q) < 0.3) continue;
      ++compared;
      agree += PointIn(p, q) == WindingContains(p, q);
    }
    EXPECT_GE(agree, 0.999 * compared) << ShapeName(id);
  }
}

TEST(Transform, IdentityAndPeriodicity) {
  const Polygon2 key = BuildShape(ShapeId::kKey);
  EXPECT_EQ(Transform(key, 0.0, {0, 0}), key);
  const Polygon2 full = Transform(key, 360.0, {0, 0});
  for (size_t i = 0; i < key.size(); ++i) EXPECT_LT((full[i] - key[i]).Norm(), 1e-9);
  const Polygon2 moved = Transform(key, 0.0, {3.0, -2.0});
  for (size_t i = 0; i < key.size(); ++i) EXPECT_LT((moved[i] - key[i] - Vec2{3, -2}).Norm(), 1e-12);
}

TEST(Transform, SquareQuarterTurnSameSet) {
  const Polygon2 sq = Square(20.0);
  const Polygon2 r = Transform(sq, 90.0, {0, 0});
  EXPECT_GT(r.SignedArea(), 0.0);
  for (const Vec2& v : sq.vertices()) {
    const bool found = std::any_of(r.vertices().begin(), r.vertices().end(),
                                   [&](Vec2 w) { return (w - v).Norm() < 1e-9; });
    EXPECT_TRUE(found);
  }
}

TEST(QueryContact, ZeroOffsetAndSmallOffsetsInsertable) {
  Rng rng(5);
  for (ShapeId id : kAllShapes) {
    const Polygon2 peg = BuildShape(id);
    const Polygon2 cavity = Dilate(peg, 5.0);
    EXPECT_TRUE(QueryContact(peg, cavity, {0, 0}).insertable) << ShapeName(id);
    for (int i = 0; i < 20; ++i) {
      const double r = rng.Uniform(0.0, 1.0), a = rng.Uniform(0.0, 2 * std::numbers::pi);
      const ContactQuery q = QueryContact(peg, cavity, {r * std::cos(a), r * std::sin(a)});
      EXPECT_TRUE(q.insertable);
      EXPECT_EQ(q.blocked_fraction, 0.0);
      EXPECT_FALSE(q.blocked_centroid.has_value());
    }
    EXPECT_GT(QueryContact(peg, cavity, {40, 0}).blocked_fraction, 0.5) << ShapeName(id);
  }
}

TEST(QueryContact, KeyBlockedAtTwenty) {
  const Polygon2 key = BuildShape(ShapeId::kKey);
  const Polygon2 cavity = Dilate(key, 5.0);
  const ContactQuery q = QueryContact(key, cavity, {20, 0});
  EXPECT_FALSE(q.insertable);
  ASSERT_TRUE(q.blocked_centroid.has_value());
  EXPECT_GT(q.blocked_centroid->x, 0.0);
  const Box2 b = key.Bounds();
  EXPECT_GE(q.blocked_centroid->x, b.min.x);
  EXPECT_LE(q.blocked_centroid->x, b.max.x);
  EXPECT_GE(q.blocked_centroid->y, b.min.y);
  EXPECT_LE(q.blocked_centroid->y, b.max.y);

  // oracle: fraction of 0.1 mm samples of the peg that leave the cavity
  const auto samples = GridSamples(key, 0.1);
  int blocked = 0;
  for (const Vec2& s : samples) blocked += !WindingContains(cavity, s + Vec2{20, 0});
  EXPECT_NEAR(q.blocked_fraction, static_cast<double>(blocked) / samples.size(), 0.02);
}

TEST(QueryContact, MonotoneInOffset) {
  const Polygon2 key = BuildShape(ShapeId::kKey);
  const Polygon2 cavity = Dilate(key, 5.0);
  const double f6 = QueryContact(key, cavity, {6, 0}).blocked_fraction;
  const double f20 = QueryContact(key, cavity, {20, 0}).blocked_fraction;
  EXPECT_LT(f6, f20);
}

TEST(QueryContact, DeterministicAndValidated) {
  const Polygon2 peg = BuildShape(ShapeId::kArrow);
  const Polygon2 cavity = Dilate(peg, 5.0);
  EXPECT_EQ(QueryContact(peg, cavity, {7.3, -4.1}), QueryContact(peg, cavity, {7.3, -4.1}));
  EXPECT_THROW(QueryContact(peg, cavity, {0, 0}, 0.05), GeometryError);
  EXPECT_THROW(QueryContact(peg, cavity, {0, 0}, 1.5), GeometryError);
}

TEST(ContainsTranslated, MatchesGridInsertability) {
  const Polygon2 peg = BuildShape(ShapeId::kU);
  const Polygon2 cavity = Dilate(peg, 5.0);
  EXPECT_TRUE(ContainsTranslated(cavity, peg, {0, 0}));
  EXPECT_FALSE(ContainsTranslated(cavity, peg, {20, 0}));
}

TEST(ShapeCatalog, ListsNineShapes) {
  const auto j = ShapeCatalogJson();
  ASSERT_EQ(j.size(), 9u);
  EXPECT_TRUE(j[0].contains("vertices_mm"));
}

}  // namespace
}  // namespace pegbench::geom

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

#include "pegbench/render.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "pegbench/sim.h"
#include "pegbench/variations.h"

namespace pegbench::render {
namespace {

using sim::Arm;
using variations::CanonicalSpec;
using variations::ComposeSpec;
using variations::Split;
using variations::VariationKind;

bool IsObjectLayer(Layer l) { return l == Layer::kBody || l == Layer::kFace || l == Layer::kShape; }

// mean column of the opposing object's pixels
double ObjectCentroidColumn(const RenderOutput& r) {
  double sum = 0.0;
  int n = 0;
  for (int row = 0; row < kImageSize; ++row) {
    for (int col = 0; col < kImageSize; ++col) {
      if (IsObjectLayer(r.layers[row * kImageSize + col])) {
        sum += col;
        ++n;
      }
    }
  }
  EXPECT_GT(n, 0);
  return sum / n;
}

int CountDiff(const Image& a, const Image& b) {
  int n = 0;
  for (size_t i = 0; i < a.pixels.size(); ++i) n += a.pixels[i] != b.pixels[i];
  return n;
}

TEST(RenderWrist, Deterministic) {
  const auto spec = ComposeSpec({VariationKind::kSceneAppearance, VariationKind::kCameraPose,
                                 VariationKind::kGraspPose},
                                Split::kEval, 3);
  const sim::WorldState s = sim::InitEpisode(4, spec);
  for (Arm arm : {Arm::kMoving, Arm::kCompliant}) {
    const Image a = RenderWrist(s, arm);
    const Image b = RenderWrist(s, arm);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.pixels.size(), static_cast<size_t>(kImageBytes));
  }
}

TEST(RenderWrist, PainterLayersPresent) {
  const sim::WorldState s = sim::InitEpisodeAt(0, CanonicalSpec(), {0.0, 0.0});
  const RenderOutput r = RenderWristLayers(s, Arm::kMoving);
  std::vector<int> counts(6, 0);
  for (Layer l : r.layers) ++counts[static_cast<int>(l)];
  EXPECT_GT(counts[static_cast<int>(Layer::kFloor)], 0);
  EXPECT_GT(counts[static_cast<int>(Layer::kFace)], 0);
  EXPECT_GT(counts[static_cast<int>(Layer::kShape)], 0);
  EXPECT_GT(counts[static_cast<int>(Layer::kGripper)], 0);
}

TEST(RenderWrist, ObjectColorChangeIsLocal) {
  sim::WorldState a = sim::InitEpisode(2, CanonicalSpec());
  sim::WorldState b = a;
  b.spec.instances.appearance.object_color = {0.1, 0.9, 0.4};
  for (Arm arm : {Arm::kMoving, Arm::kCompliant}) {
    const RenderOutput ra = RenderWristLayers(a, arm);
    const RenderOutput rb = RenderWristLayers(b, arm);
    // silhouette grown by one pixel for the edge blend
    std::vector<bool> allowed(kImageSize * kImageSize, false);
    for (int row = 0; row < kImageSize; ++row) {
      for (int col = 0; col < kImageSize; ++col) {
        if (!IsObjectLayer(ra.layers[row * kImageSize + col])) continue;
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int r = row + dr, c = col + dc;
            if (r >= 0 && r < kImageSize && c >= 0 && c < kImageSize) allowed[r * kImageSize + c] = true;
          }
        }
      }
    }
    int changed = 0;
    for (int p = 0; p < kImageSize * kImageSize; ++p) {
      bool differs = false;
      for (int ch = 0; ch < kChannels; ++ch) {
        differs |= ra.image.pixels[p * kChannels + ch] != rb.image.pixels[p * kChannels + ch];
      }
      if (!differs) continue;
      ++changed;
      EXPECT_TRUE(allowed[p]) << "pixel " << p;
    }
    EXPECT_GT(changed, 0);
  }
}

TEST(RenderWrist, LateralOffsetMovesObject) {
  const auto at = [](double x) { return sim::InitEpisodeAt(0, CanonicalSpec(), {x, 0.0}); };
  for (Arm arm : {Arm::kMoving, Arm::kCompliant}) {
    const double c0 = ObjectCentroidColumn(RenderWristLayers(at(0.0), arm));
    const double c2 = ObjectCentroidColumn(RenderWristLayers(at(2.0), arm));
    const double c20 = ObjectCentroidColumn(RenderWristLayers(at(20.0), arm));
    EXPECT_GE(std::abs(c2 - c0), 1.0);
    EXPECT_GE(std::abs(c20 - c0), 10.0);
  }
}

TEST(RenderWrist, VisualFactorsChangeImages) {
  const sim::WorldState base = sim::InitEpisode(6, CanonicalSpec());
  const Image ref = RenderWrist(base, Arm::kMoving);
  for (VariationKind kind : {VariationKind::kGraspPose, VariationKind::kSceneAppearance,
                             VariationKind::kCameraPose, VariationKind::kPegHoleShape}) {
    const sim::WorldState s = sim::InitEpisode(6, ComposeSpec({kind}, Split::kEval, 12));
    EXPECT_GT(CountDiff(RenderWrist(s, Arm::kMoving), ref), 0) << variations::KindName(kind);
  }
}

TEST(RenderWrist, LightingMultipliesFloor) {
  sim::WorldState lit = sim::InitEpisode(1, CanonicalSpec());
  sim::WorldState dim = lit;
  dim.spec.instances.appearance.lighting.intensity = 0.5;
  const RenderOutput a = RenderWristLayers(lit, Arm::kMoving);
  const RenderOutput b = RenderWristLayers(dim, Arm::kMoving);
  for (int p = 0; p < kImageSize * kImageSize; ++p) {
    if (a.layers[p] != Layer::kFloor) continue;
    for (int ch = 0; ch < kChannels; ++ch) {
      EXPECT_NEAR(b.image.pixels[p * kChannels + ch], 0.5 * a.image.pixels[p * kChannels + ch], 1.0);
    }
  }
}

TEST(Project, CenterAndBehind) {
  const sim::WorldState s = sim::InitEpisodeAt(0, CanonicalSpec(), {0.0, 0.0});
  const CameraPose cam = WristCamera(s, Arm::kMoving);
  const Intrinsics k = DefaultIntrinsics();
  EXPECT_NEAR(k.focal_px, 42.0 / std::tan(M_PI / 6.0), 1e-9);
  Eigen::Vector2d px;
  ASSERT_TRUE(Project(cam, k, cam.center + cam.rotation.col(2) * 100.0, &px));
  EXPECT_NEAR(px.x(), k.cx, 1e-9);
  EXPECT_NEAR(px.y(), k.cy, 1e-9);
  EXPECT_FALSE(Project(cam, k, cam.center - cam.rotation.col(2) * 100.0, &px));
}

TEST(FloorTexel, TexturesDiffer) {
  int distinct = 0;
  for (int t = 1; t < variations::kFloorTextureCount; ++t) {
    distinct += !(FloorTexel(t, 13.0, 7.0) == FloorTexel(0, 13.0, 7.0));
  }
  EXPECT_GE(distinct, 15);
}

TEST(EncodePpm, HeaderAndSize) {
  const Image img;
  const auto ppm = EncodePpm(img);
  const std::string header = "P6\n84 84\n255\n";
  ASSERT_EQ(ppm.size(), header.size() + kImageBytes);
  EXPECT_EQ(std::string(ppm.begin(), ppm.begin() + header.size()), header);
}

}  // namespace
}  // namespace pegbench::render

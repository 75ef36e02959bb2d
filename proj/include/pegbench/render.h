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

#ifndef PEGBENCH_RENDER_H_
#define PEGBENCH_RENDER_H_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "pegbench/sim.h"
#include "pegbench/variations.h"

namespace pegbench::render {

inline constexpr int kImageSize = 84;
inline constexpr int kChannels = 3;
inline constexpr int kImageBytes = kImageSize * kImageSize * kChannels;

// Row-major, interleaved RGB, 8 bits per channel.
struct Image {
  std::vector<uint8_t> pixels = std::vector<uint8_t>(kImageBytes, 0);
  bool operator==(const Image&) const = default;
  uint8_t at(int row, int col, int ch) const {
    return pixels[(row * kImageSize + col) * kChannels + ch];
  }
};

// Which painter's-order layer last wrote each pixel.
enum class Layer : uint8_t { kBackground, kFloor, kBody, kFace, kShape, kGripper };

struct RenderOutput {
  Image image;
  std::vector<Layer> layers = std::vector<Layer>(kImageSize * kImageSize, Layer::kBackground);
};

// Pinhole intrinsics with a 60 degree vertical field of view.
struct Intrinsics {
  double focal_px;
  double cx;
  double cy;
};
Intrinsics DefaultIntrinsics();

// Nominal camera center in wrist coordinates; it looks at the wrist origin
// (the grasp point) with wrist +y as up.
Eigen::Vector3d NominalCameraCenter();

// Camera-to-world pose. Camera axes follow the x-right, y-down, z-forward
// convention.
struct CameraPose {
  Eigen::Matrix3d rotation;  // columns are camera axes in world coordinates
  Eigen::Vector3d center;    // world, mm
};

// Nominal wrist camera composed with the arm's grasp transform and the
// CameraPose instance for that arm.
CameraPose WristCamera(const sim::WorldState& state, sim::Arm arm);

// Pixel coordinates (column, row) with pixel centers at half-integers.
// Returns false when the point lies behind the near plane.
bool Project(const CameraPose& camera, const Intrinsics& k, const Eigen::Vector3d& world,
             Eigen::Vector2d* pixel);

// Renders the view from `arm`'s wrist. The opposing object is drawn: the hole
// for the moving arm, the peg for the compliant arm.
RenderOutput RenderWristLayers(const sim::WorldState& state, sim::Arm arm);
Image RenderWrist(const sim::WorldState& state, sim::Arm arm);

// Base floor color at world floor coordinates (x, z), before lighting.
variations::Rgb FloorTexel(int texture_id, double x, double z);

// Binary PPM (P6), for inspection.
std::vector<uint8_t> EncodePpm(const Image& image);

}  // namespace pegbench::render

#endif  // PEGBENCH_RENDER_H_

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

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

namespace pegbench::render {
namespace {

using Eigen::Vector3d;
using variations::Rgb;

constexpr double kNearPlane = 1.0;         // mm
constexpr double kFloorHeight = -200.0;    // world y of the floor plane, mm
constexpr double kMaxFloorDistance = 4000.0;
constexpr double kBodyLength = variations::kBodyWidthMm;
constexpr double kAmbientOff = 0.25;
constexpr Rgb kBackground{0.62, 0.66, 0.70};
constexpr Rgb kGripper{0.20, 0.20, 0.23};

struct Palette {
  Rgb base;
  Rgb alt;
  int pattern;
  double period;
};

std::array<Palette, variations::kFloorTextureCount> BuildPalettes() {
  std::array<Palette, variations::kFloorTextureCount> out{};
  out[0] = {{0.78, 0.62, 0.44}, {0.70, 0.54, 0.37}, 0, 60.0};
  for (int id = 1; id < variations::kFloorTextureCount; ++id) {
    Rng rng(MixSeed(static_cast<uint64_t>(id), 0x666c6f6f72ULL));
    Rgb base{rng.Uniform(0.25, 0.9), rng.Uniform(0.25, 0.9), rng.Uniform(0.25, 0.9)};
    const double f = rng.Uniform(0.55, 0.8);
    out[id] = {base, {base.r * f, base.g * f, base.b * f}, 1 + id % 4, 20.0 + 10.0 * (id % 3)};
  }
  return out;
}

const std::array<Palette, variations::kFloorTextureCount>& Palettes() {
  static const auto palettes = BuildPalettes();
  return palettes;
}

Rgb Scale(const Rgb& c, double s) { return {c.r * s, c.g * s, c.b * s}; }
Rgb Mix(const Rgb& a, const Rgb& b, double t) {
  return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

uint8_t ToByte(double v) {
  return static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

class Canvas {
 public:
  Canvas(const CameraPose& camera, const Intrinsics& k, const variations::Lighting& light)
      : camera_(camera), k_(k) {
    if (light.on) {
      tint_ = Scale(light.color, light.intensity);
    } else {
      tint_ = {kAmbientOff, kAmbientOff, kAmbientOff};
    }
  }

  void SetPixel(int row, int col, const Rgb& c, Layer layer) {
    uint8_t* p = &out_.image.pixels[(row * kImageSize + col) * kChannels];
    p[0] = ToByte(c.r * tint_.r);
    p[1] = ToByte(c.g * tint_.g);
    p[2] = ToByte(c.b * tint_.b);
    out_.layers[row * kImageSize + col] = layer;
  }

  Vector3d ToCamera(const Vector3d& world) const {
    return camera_.rotation.transpose() * (world - camera_.center);
  }

  // Ray direction through a pixel center, world frame.
  Vector3d PixelRay(int row, int col) const {
    const Vector3d d((col + 0.5 - k_.cx) / k_.focal_px, (row + 0.5 - k_.cy) / k_.focal_px, 1.0);
    return camera_.rotation * d;
  }

  bool FrontFacing(const std::vector<Vector3d>& poly) const {
    const Vector3d n = (poly[1] - poly[0]).cross(poly[2] - poly[0]);
    return n.dot(camera_.center - poly[0]) > 0.0;
  }

  // Scanline fill of a planar world-space polygon, clipped to the near plane.
  void FillPolygon(const std::vector<Vector3d>& world, const Rgb& color, Layer layer) {
    std::vector<Vector3d> cam;
    cam.reserve(world.size());
    for (const Vector3d& p : world) cam.push_back(ToCamera(p));
    std::vector<Vector3d> clipped;
    for (size_t i = 0; i < cam.size(); ++i) {
      const Vector3d& a = cam[i];
      const Vector3d& b = cam[(i + 1) % cam.size()];
      const bool a_in = a.z() >= kNearPlane;
      const bool b_in = b.z() >= kNearPlane;
      if (a_in) clipped.push_back(a);
      if (a_in != b_in) {
        const double t = (kNearPlane - a.z()) / (b.z() - a.z());
        clipped.push_back(a + (b - a) * t);
      }
    }
    if (clipped.size() < 3) return;
    std::vector<Eigen::Vector2d> px;
    px.reserve(clipped.size());
    for (const Vector3d& p : clipped) {
      px.emplace_back(k_.focal_px * p.x() / p.z() + k_.cx, k_.focal_px * p.y() / p.z() + k_.cy);
    }
    double ymin = px[0].y(), ymax = px[0].y();
    for (const auto& p : px) {
      ymin = std::min(ymin, p.y());
      ymax = std::max(ymax, p.y());
    }
    const int r0 = std::max(0, static_cast<int>(std::floor(ymin - 0.5)));
    const int r1 = std::min(kImageSize - 1, static_cast<int>(std::ceil(ymax - 0.5)));
    std::vector<double> xs;
    for (int row = r0; row <= r1; ++row) {
      const double y = row + 0.5;
      xs.clear();
      for (size_t i = 0; i < px.size(); ++i) {
        const Eigen::Vector2d& a = px[i];
        const Eigen::Vector2d& b = px[(i + 1) % px.size()];
        // half-open rule: each edge owns [min y, max y)
        if ((a.y() <= y && y < b.y()) || (b.y() <= y && y < a.y())) {
          xs.push_back(a.x() + (y - a.y()) * (b.x() - a.x()) / (b.y() - a.y()));
        }
      }
      std::sort(xs.begin(), xs.end());
      for (size_t i = 0; i + 1 < xs.size(); i += 2) {
        const int c0 = std::max(0, static_cast<int>(std::ceil(xs[i] - 0.5)));
        const int c1 = std::min(kImageSize - 1, static_cast<int>(std::ceil(xs[i + 1] - 0.5)) - 1);
        for (int col = c0; col <= c1; ++col) SetPixel(row, col, color, layer);
      }
    }
  }

  RenderOutput& output() { return out_; }
  const CameraPose& camera() const { return camera_; }

 private:
  CameraPose camera_;
  Intrinsics k_;
  Rgb tint_;
  RenderOutput out_;
};

std::vector<geom::Vec2> BodySection(const variations::BodyInstance& body) {
  const double h = 0.5 * variations::kBodyWidthMm * body.width_factor;
  std::vector<geom::Vec2> out;
  auto regular = [&out](int sides, double radius, double phase) {
    for (int i = 0; i < sides; ++i) {
      const double a = phase + 2.0 * std::numbers::pi * i / sides;
      out.push_back({radius * std::cos(a), radius * std::sin(a)});
    }
  };
  switch (body.shape) {
    case variations::BodyShape::kCube:
      out = {{-h, -h}, {h, -h}, {h, h}, {-h, h}};
      break;
    case variations::BodyShape::kCylinder:
      regular(24, h, 0.0);
      break;
    case variations::BodyShape::kOctagonalPrism:
      regular(8, h / std::cos(std::numbers::pi / 8.0), std::numbers::pi / 8.0);
      break;
  }
  return out;
}

// Lifts a counter-clockwise xy section to the plane z, keeping the winding
// so that the polygon's normal points toward +z.
std::vector<Vector3d> Lift(const std::vector<geom::Vec2>& section, Vector3d origin, double z) {
  std::vector<Vector3d> out;
  out.reserve(section.size());
  for (const geom::Vec2& p : section) out.emplace_back(origin.x() + p.x, origin.y() + p.y, z);
  return out;
}

std::vector<Vector3d> Reversed(std::vector<Vector3d> v) {
  std::reverse(v.begin(), v.end());
  return v;
}

// Draws a prism whose front cap lies at z = face_z and whose body extends
// along `extend_sign` * z. Returns whether the front cap faces the camera.
bool DrawBody(Canvas& canvas, const std::vector<geom::Vec2>& section, Vector3d origin,
              double face_z, double extend_sign, const Rgb& color) {
  const double back_z = face_z + extend_sign * kBodyLength;
  // front normal points away from the body
  std::vector<Vector3d> front = Lift(section, origin, face_z);
  std::vector<Vector3d> back = Lift(section, origin, back_z);
  if (extend_sign > 0.0) {
    front = Reversed(front);
  } else {
    back = Reversed(back);
  }
  if (canvas.FrontFacing(back)) canvas.FillPolygon(back, Scale(color, 0.6), Layer::kBody);
  const size_t n = section.size();
  for (size_t i = 0; i < n; ++i) {
    const geom::Vec2 a = section[i];
    const geom::Vec2 b = section[(i + 1) % n];
    std::vector<Vector3d> quad = {
        {origin.x() + a.x, origin.y() + a.y, face_z},
        {origin.x() + b.x, origin.y() + b.y, face_z},
        {origin.x() + b.x, origin.y() + b.y, back_z},
        {origin.x() + a.x, origin.y() + a.y, back_z},
    };
    if (extend_sign < 0.0) quad = Reversed(quad);
    if (!canvas.FrontFacing(quad)) continue;
    // outward normal of a ccw section edge is (dy, -dx)
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const double up = len > 0.0 ? -(b.x - a.x) / len : 0.0;
    canvas.FillPolygon(quad, Scale(color, 0.65 + 0.2 * up), Layer::kBody);
  }
  if (!canvas.FrontFacing(front)) return false;
  canvas.FillPolygon(front, color, Layer::kFace);
  return true;
}

void DrawBox(Canvas& canvas, const Eigen::Matrix3d& rot, const Vector3d& trans,
             const Vector3d& lo, const Vector3d& hi) {
  std::array<Vector3d, 8> c;
  for (int i = 0; i < 8; ++i) {
    const Vector3d local((i & 1) ? hi.x() : lo.x(), (i & 2) ? hi.y() : lo.y(),
                         (i & 4) ? hi.z() : lo.z());
    c[i] = rot * local + trans;
  }
  // outward-wound faces
  constexpr int kFaces[6][4] = {{4, 6, 2, 0}, {3, 7, 5, 1}, {1, 5, 4, 0},
                                {6, 7, 3, 2}, {2, 3, 1, 0}, {5, 7, 6, 4}};
  for (const auto& f : kFaces) {
    std::vector<Vector3d> quad = {c[f[0]], c[f[1]], c[f[2]], c[f[3]]};
    if (canvas.FrontFacing(quad)) canvas.FillPolygon(quad, kGripper, Layer::kGripper);
  }
}

struct WristFrame {
  Eigen::Matrix3d rotation;  // wrist to world
  Vector3d translation;      // world position of the wrist origin
};

WristFrame WristToWorld(const sim::WorldState& s, sim::Arm arm) {
  const auto& grasp = arm == sim::Arm::kMoving ? s.peg_grasp() : s.hole_grasp();
  const variations::RigidTransform g = variations::GraspRigidTransform(grasp);
  const Eigen::Matrix3d a = sim::NominalRotation(arm) * g.rotation.transpose();
  return {a, sim::ObjectOrigin(s, arm) - a * g.translation};
}

}  // namespace

Intrinsics DefaultIntrinsics() {
  const double half = 0.5 * kImageSize;
  return {half / std::tan(std::numbers::pi / 6.0), half, half};
}

Eigen::Vector3d NominalCameraCenter() { return {0.0, 40.0, -100.0}; }

CameraPose WristCamera(const sim::WorldState& s, sim::Arm arm) {
  const Vector3d c0 = NominalCameraCenter();
  const Vector3d forward = (-c0).normalized();
  const Vector3d right = forward.cross(Vector3d::UnitY()).normalized();
  const Vector3d down = forward.cross(right);
  Eigen::Matrix3d r;
  r.col(0) = right;
  r.col(1) = down;
  r.col(2) = forward;
  const auto& cam = s.spec.instances.cameras[arm == sim::Arm::kMoving ? 0 : 1];
  Vector3d center = c0 + cam.translation;
  if (cam.angle_deg != 0.0) {
    r = Eigen::AngleAxisd(cam.angle_deg * std::numbers::pi / 180.0, cam.axis.normalized())
            .toRotationMatrix() *
        r;
  }
  const WristFrame w = WristToWorld(s, arm);
  return {w.rotation * r, w.rotation * center + w.translation};
}

bool Project(const CameraPose& camera, const Intrinsics& k, const Eigen::Vector3d& world,
             Eigen::Vector2d* pixel) {
  const Vector3d p = camera.rotation.transpose() * (world - camera.center);
  if (p.z() < kNearPlane) return false;
  *pixel = {k.focal_px * p.x() / p.z() + k.cx, k.focal_px * p.y() / p.z() + k.cy};
  return true;
}

Rgb FloorTexel(int texture_id, double x, double z) {
  const Palette& p = Palettes().at(texture_id);
  const double u = x / p.period;
  const double v = z / p.period;
  switch (p.pattern) {
    case 0: {  // planks along z with grain
      const double k = std::floor(u);
      const double tint = 1.0 - 0.06 * std::fmod(std::abs(k), 3.0);
      const double grain = std::fmod(std::abs(z + 13.0 * k), 9.0) < 1.5 ? 0.93 : 1.0;
      return Scale(Mix(p.base, p.alt, std::abs(u - k - 0.5) < 0.02 ? 1.0 : 0.0), tint * grain);
    }
    case 1:  // checker
      return (static_cast<int64_t>(std::floor(u)) + static_cast<int64_t>(std::floor(v))) % 2 == 0
                 ? p.base
                 : p.alt;
    case 2:  // stripes along x
      return static_cast<int64_t>(std::floor(u)) % 2 == 0 ? p.base : p.alt;
    case 3:  // stripes along z
      return static_cast<int64_t>(std::floor(v)) % 2 == 0 ? p.base : p.alt;
    default: {  // dots
      const double du = u - std::floor(u) - 0.5;
      const double dv = v - std::floor(v) - 0.5;
      return du * du + dv * dv < 0.09 ? p.alt : p.base;
    }
  }
}

RenderOutput RenderWristLayers(const sim::WorldState& s, sim::Arm arm) {
  const auto& inst = s.spec.instances;
  const CameraPose camera = WristCamera(s, arm);
  Canvas canvas(camera, DefaultIntrinsics(), inst.appearance.lighting);

  for (int row = 0; row < kImageSize; ++row) {
    for (int col = 0; col < kImageSize; ++col) {
      const Vector3d d = canvas.PixelRay(row, col);
      if (d.y() < -1e-9) {
        const double t = (kFloorHeight - camera.center.y()) / d.y();
        if (t > 0.0 && t * d.norm() < kMaxFloorDistance) {
          const Vector3d hit = camera.center + d * t;
          canvas.SetPixel(row, col, FloorTexel(inst.appearance.floor_texture, hit.x(), hit.z()),
                          Layer::kFloor);
          continue;
        }
      }
      canvas.SetPixel(row, col, kBackground, Layer::kBackground);
    }
  }

  const Rgb& color = inst.appearance.object_color;
  const bool viewing_hole = arm == sim::Arm::kMoving;
  const sim::Arm opposing = viewing_hole ? sim::Arm::kCompliant : sim::Arm::kMoving;
  const Vector3d origin = sim::ObjectOrigin(s, opposing);
  const auto& body = viewing_hole ? inst.hole_body : inst.peg_body;
  const double extend = viewing_hole ? 1.0 : -1.0;
  if (DrawBody(canvas, BodySection(body), origin, origin.z(), extend, color)) {
    const geom::Polygon2& section = viewing_hole ? s.geometry->cavity : s.geometry->peg;
    std::vector<Vector3d> shape = Lift(section.vertices(), origin, origin.z());
    if (viewing_hole) shape = Reversed(shape);
    const Rgb shade = viewing_hole ? Scale(color, 0.25) : Mix(color, {1.0, 1.0, 1.0}, 0.5);
    canvas.FillPolygon(shape, shade, Layer::kShape);
  }

  // two fingers closed on the held object's sides
  const auto& own = viewing_hole ? inst.peg_body : inst.hole_body;
  const double x0 = 0.5 * variations::kBodyWidthMm * own.width_factor + 2.0;
  const WristFrame w = WristToWorld(s, arm);
  DrawBox(canvas, w.rotation, w.translation, {x0, -14.0, -60.0}, {x0 + 10.0, 14.0, -20.0});
  DrawBox(canvas, w.rotation, w.translation, {-x0 - 10.0, -14.0, -60.0}, {-x0, 14.0, -20.0});
  return std::move(canvas.output());
}

Image RenderWrist(const sim::WorldState& state, sim::Arm arm) {
  return RenderWristLayers(state, arm).image;
}

std::vector<uint8_t> EncodePpm(const Image& image) {
  const std::string header =
      "P6\n" + std::to_string(kImageSize) + " " + std::to_string(kImageSize) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  return out;
}

}  // namespace pegbench::render

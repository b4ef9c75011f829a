// Copyright 2026 The ClothForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "common/rng.h"
#include "geometry/bvh.h"
#include "geometry/mesh.h"
#include "templates/templates.h"

namespace clothforge {

struct Intrinsics {
  double focal_px = 300;
  int width = 512;
  int height = 256;
  // Principal point; defaults to the image centre when negative.
  double cx = -1;
  double cy = -1;

  double principal_x() const { return cx < 0 ? 0.5 * width : cx; }
  double principal_y() const { return cy < 0 ? 0.5 * height : cy; }
};

struct Projection {
  double x = 0;  // continuous pixel coordinates, pixel i spans [i, i+1)
  double y = 0;
  double depth = 0;  // along the optical axis; <= 0 means behind the camera
};

struct Camera {
  Vec3 position;
  Vec3 look_at;
  Vec3 up{0, 0, 1};
  Intrinsics intrinsics;

  Vec3 forward() const;
  Vec3 right() const;
  Vec3 down() const;
  Projection project(const Vec3& p) const;
  // Point at the given depth along the ray through pixel (x, y).
  Vec3 unproject(double x, double y, double depth) const;
  Ray ray_through(double x, double y) const;
  bool in_image(const Projection& p) const;
  void validate() const;
};

struct CameraRanges {
  Range distance{0.5, 1.0};
  Range elevation{0.5235987755982988, 1.5707963267948966};  // 30..90 deg
  Range azimuth{0.0, 6.283185307179586};
};

Camera sample_camera(const Vec3& cloth_center, const CameraRanges& ranges, const Intrinsics& intrinsics,
                     Rng& rng);

enum class MaterialProcedure { kUniformColor, kTailored, kRandomTexture };
const char* to_string(MaterialProcedure p);
std::optional<MaterialProcedure> parse_material_procedure(std::string_view name);

struct Logo {
  double u0 = 0, v0 = 0, u1 = 0, v1 = 0;
  Vec3 color_a, color_b;
  uint64_t noise_seed = 0;
  double noise_scale = 8;
};

struct Material {
  MaterialProcedure procedure = MaterialProcedure::kUniformColor;
  Vec3 base{0.5, 0.5, 0.5};
  // Tailored: stripes of the secondary colour, width a fraction of the period.
  Vec3 secondary;
  double stripe_period = 0;  // 0 disables stripes
  double stripe_fraction = 0.5;
  double stripe_angle = 0;
  std::vector<Logo> logos;
  // RandomTexture: fractal value noise between base and secondary, then mixed
  // with mix_color.
  uint64_t noise_seed = 0;
  int noise_octaves = 4;
  double noise_scale = 8;
  Vec3 mix_color;
  double mix_weight = 0;

  Vec3 albedo(double u, double v) const;
};

Material sample_material(MaterialProcedure procedure, Rng& rng);

// Fractal value noise in [0, 1].
double value_noise(double x, double y, uint64_t seed, int octaves);

enum class DistractorShape { kBox, kSphere, kCylinder };
const char* to_string(DistractorShape s);

struct Distractor {
  DistractorShape shape = DistractorShape::kBox;
  double size = 0.1;  // edge length or diameter; cylinders are as tall as wide
  Vec3 center_on_plane;  // point on the plane under the object's centre
  double yaw = 0;
  Vec3 color{0.5, 0.5, 0.5};

  std::vector<std::array<Vec3, 3>> triangles() const;
};

struct DirectionalLight {
  Vec3 direction;  // unit vector pointing toward the light
  Vec3 intensity;
};

struct SceneConfig {
  CameraRanges camera;
  Intrinsics intrinsics;
  Range distractor_count{0, 5};
  Range distractor_size{0.03, 0.2};
  double distractor_margin = 0.3;  // placement area around the cloth, m
  double cloth_thickness = 0.002;
  double plane_height = 0.0;
  Range plane_size{1.5, 3.0};
  Range ambient{0.2, 0.6};
  Range light_count{1, 3};
  Range light_intensity{0.3, 0.8};
  Range light_elevation{0.35, 1.5707963267948966};

  void validate() const;
};

struct Scene {
  ClothMesh cloth;  // solidified
  Material cloth_material;
  Vec3 plane_center;
  double plane_size = 2;
  Material plane_material;
  std::vector<Distractor> distractors;
  double ambient = 0.4;
  std::vector<DirectionalLight> lights;
  Camera camera;
  Vec3 background;

  static constexpr uint32_t kClothId = 0;
  static constexpr uint32_t kPlaneId = 1;
  static constexpr uint32_t kFirstDistractorId = 2;

  std::vector<BvhObject> objects() const;
  std::array<std::array<Vec3, 3>, 2> plane_triangles() const;
};

// Solidifies the cloth, rests it on the plane and samples everything else.
Scene compose_scene(const ClothMesh& cloth, MaterialProcedure procedure, const SceneConfig& cfg, Rng& rng);

}  // namespace clothforge

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

#include "scene/scene.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "common/error.h"
#include "geometry/solidify.h"

namespace clothforge {
namespace {

constexpr double kPi = std::numbers::pi;

Vec3 random_color(Rng& rng) { return {rng.uniform(), rng.uniform(), rng.uniform()}; }

Vec3 lerp(const Vec3& a, const Vec3& b, double t) { return a + (b - a) * t; }

// A second colour clearly distinct from the first.
Vec3 contrasting_color(const Vec3& other, Rng& rng) {
  Vec3 c = random_color(rng);
  while (norm(c - other) < 0.3) c = random_color(rng);
  return c;
}

double sample(Rng& rng, const Range& r) { return rng.uniform(r.min, r.max); }

int sample_count(Rng& rng, const Range& r) {
  return static_cast<int>(rng.uniform_int(static_cast<int64_t>(std::ceil(r.min)),
                                          static_cast<int64_t>(std::floor(r.max))));
}

void check_range(const Range& r, const char* name) {
  if (!std::isfinite(r.min) || !std::isfinite(r.max) || r.min > r.max)
    throw_invalid(std::string("invalid range for ") + name);
}

double lattice(int64_t x, int64_t y, uint64_t seed) {
  const uint64_t h = mix_seed(mix_seed(seed, static_cast<uint64_t>(x)), static_cast<uint64_t>(y));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smooth(double t) { return t * t * (3 - 2 * t); }

double noise_octave(double x, double y, uint64_t seed) {
  const double fx = std::floor(x), fy = std::floor(y);
  const int64_t ix = static_cast<int64_t>(fx), iy = static_cast<int64_t>(fy);
  const double tx = smooth(x - fx), ty = smooth(y - fy);
  const double a = lattice(ix, iy, seed), b = lattice(ix + 1, iy, seed);
  const double c = lattice(ix, iy + 1, seed), d = lattice(ix + 1, iy + 1, seed);
  return (a + (b - a) * tx) + ((c + (d - c) * tx) - (a + (b - a) * tx)) * ty;
}

}  // namespace

Vec3 Camera::forward() const { return normalized(look_at - position); }
Vec3 Camera::right() const { return normalized(cross(forward(), up)); }
Vec3 Camera::down() const { return cross(forward(), right()); }

Projection Camera::project(const Vec3& p) const {
  const Vec3 f = forward(), r = right(), d = cross(f, r);
  const Vec3 rel = p - position;
  Projection out;
  out.depth = dot(rel, f);
  out.x = intrinsics.principal_x() + intrinsics.focal_px * dot(rel, r) / out.depth;
  out.y = intrinsics.principal_y() + intrinsics.focal_px * dot(rel, d) / out.depth;
  return out;
}

Vec3 Camera::unproject(double x, double y, double depth) const {
  const Vec3 f = forward(), r = right(), d = cross(f, r);
  const double a = (x - intrinsics.principal_x()) / intrinsics.focal_px;
  const double b = (y - intrinsics.principal_y()) / intrinsics.focal_px;
  return position + (f + r * a + d * b) * depth;
}

Ray Camera::ray_through(double x, double y) const { return Ray::through(position, unproject(x, y, 1.0) - position); }

bool Camera::in_image(const Projection& p) const {
  return p.depth > 0 && p.x >= 0 && p.y >= 0 && p.x < intrinsics.width && p.y < intrinsics.height;
}

void Camera::validate() const {
  if (!is_finite(position) || !is_finite(look_at) || !(norm(look_at - position) > 0))
    throw_invalid("camera position must differ from look_at");
  if (intrinsics.width <= 0 || intrinsics.height <= 0) throw_invalid("camera resolution must be positive");
  if (!(intrinsics.focal_px > 0)) throw_invalid("focal length must be positive");
  if (!(norm(cross(forward(), up)) > 1e-9)) throw_invalid("camera up hint is parallel to the view direction");
}

Camera sample_camera(const Vec3& cloth_center, const CameraRanges& ranges, const Intrinsics& intrinsics,
                     Rng& rng) {
  check_range(ranges.distance, "camera distance");
  check_range(ranges.elevation, "camera elevation");
  check_range(ranges.azimuth, "camera azimuth");
  if (!(ranges.distance.min > 0)) throw_invalid("camera distance must be positive");
  if (!(ranges.elevation.min > 0) || ranges.elevation.max > kPi / 2)
    throw_invalid("camera elevation must lie in (0, pi/2]");
  const double dist = sample(rng, ranges.distance);
  const double el = sample(rng, ranges.elevation);
  const double az = sample(rng, ranges.azimuth);
  Camera cam;
  cam.intrinsics = intrinsics;
  cam.look_at = cloth_center;
  const Vec3 dir{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
  cam.position = cloth_center + dir * dist;
  // Tangent of the sphere toward the pole; stays defined when looking down.
  cam.up = {-std::sin(el) * std::cos(az), -std::sin(el) * std::sin(az), std::cos(el)};
  cam.validate();
  return cam;
}

const char* to_string(MaterialProcedure p) {
  switch (p) {
    case MaterialProcedure::kUniformColor: return "uniform";
    case MaterialProcedure::kTailored: return "tailored";
    case MaterialProcedure::kRandomTexture: return "random_texture";
  }
  return "?";
}

std::optional<MaterialProcedure> parse_material_procedure(std::string_view name) {
  for (auto p : {MaterialProcedure::kUniformColor, MaterialProcedure::kTailored, MaterialProcedure::kRandomTexture})
    if (name == to_string(p)) return p;
  return std::nullopt;
}

double value_noise(double x, double y, uint64_t seed, int octaves) {
  double sum = 0, amp = 1, total = 0, freq = 1;
  for (int o = 0; o < octaves; ++o) {
    sum += amp * noise_octave(x * freq, y * freq, mix_seed(seed, o));
    total += amp;
    amp *= 0.5;
    freq *= 2;
  }
  return total > 0 ? sum / total : 0;
}

Vec3 Material::albedo(double u, double v) const {
  Vec3 c = base;
  switch (procedure) {
    case MaterialProcedure::kUniformColor:
      break;
    case MaterialProcedure::kTailored: {
      if (stripe_period > 0) {
        const double s = (u * std::cos(stripe_angle) + v * std::sin(stripe_angle)) / stripe_period;
        if (s - std::floor(s) < stripe_fraction) c = secondary;
      }
      for (const Logo& l : logos)
        if (u >= l.u0 && u <= l.u1 && v >= l.v0 && v <= l.v1)
          c = lerp(l.color_a, l.color_b, value_noise(u * l.noise_scale, v * l.noise_scale, l.noise_seed, 3));
      break;
    }
    case MaterialProcedure::kRandomTexture: {
      const double t = value_noise(u * noise_scale, v * noise_scale, noise_seed, noise_octaves);
      c = lerp(lerp(base, secondary, t), mix_color, mix_weight);
      break;
    }
  }
  return c;
}

Material sample_material(MaterialProcedure procedure, Rng& rng) {
  Material m;
  m.procedure = procedure;
  m.base = random_color(rng);
  switch (procedure) {
    case MaterialProcedure::kUniformColor:
      break;
    case MaterialProcedure::kTailored: {
      m.secondary = contrasting_color(m.base, rng);
      if (rng.bernoulli(0.7)) {
        m.stripe_period = rng.uniform(0.02, 0.2);
        m.stripe_fraction = rng.uniform(0.2, 0.6);
        m.stripe_angle = rng.uniform(0, kPi);
      }
      const int logos = static_cast<int>(rng.uniform_int(0, 3));
      for (int k = 0; k < logos; ++k) {
        Logo l;
        const double w = rng.uniform(0.05, 0.3), h = rng.uniform(0.05, 0.3);
        l.u0 = rng.uniform(0, 1 - w);
        l.v0 = rng.uniform(0, 1 - h);
        l.u1 = l.u0 + w;
        l.v1 = l.v0 + h;
        l.color_a = random_color(rng);
        l.color_b = random_color(rng);
        l.noise_seed = rng.next_u64();
        l.noise_scale = rng.uniform(4, 32);
        m.logos.push_back(l);
      }
      break;
    }
    case MaterialProcedure::kRandomTexture:
      m.secondary = contrasting_color(m.base, rng);
      m.noise_seed = rng.next_u64();
      m.noise_octaves = static_cast<int>(rng.uniform_int(3, 5));
      m.noise_scale = rng.uniform(2, 16);
      m.mix_color = random_color(rng);
      m.mix_weight = rng.uniform(0, 0.5);
      break;
  }
  return m;
}

const char* to_string(DistractorShape s) {
  switch (s) {
    case DistractorShape::kBox: return "box";
    case DistractorShape::kSphere: return "sphere";
    case DistractorShape::kCylinder: return "cylinder";
  }
  return "?";
}

std::vector<std::array<Vec3, 3>> Distractor::triangles() const {
  std::vector<std::array<Vec3, 3>> tris;
  const double c = std::cos(yaw), s = std::sin(yaw);
  auto place = [&](double x, double y, double z) {
    return Vec3{center_on_plane.x + c * x - s * y, center_on_plane.y + s * x + c * y, center_on_plane.z + z};
  };
  const double r = 0.5 * size;
  switch (shape) {
    case DistractorShape::kBox: {
      Vec3 p[8];
      for (int k = 0; k < 8; ++k) p[k] = place(k & 1 ? r : -r, k & 2 ? r : -r, k & 4 ? size : 0);
      const int faces[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
      for (const auto& f : faces) {
        tris.push_back({p[f[0]], p[f[1]], p[f[2]]});
        tris.push_back({p[f[0]], p[f[2]], p[f[3]]});
      }
      break;
    }
    case DistractorShape::kSphere: {
      const int rings = 12, segments = 20;
      auto at = [&](int i, int j) {
        const double th = kPi * i / rings, ph = 2 * kPi * j / segments;
        if (i == 0) return place(0, 0, 0);
        if (i == rings) return place(0, 0, size);
        return place(r * std::sin(th) * std::cos(ph), r * std::sin(th) * std::sin(ph), r - r * std::cos(th));
      };
      for (int i = 0; i < rings; ++i)
        for (int j = 0; j < segments; ++j) {
          const Vec3 a = at(i, j), b = at(i, j + 1), cc = at(i + 1, j), d = at(i + 1, j + 1);
          if (i > 0) tris.push_back({a, cc, b});
          if (i < rings - 1) tris.push_back({b, cc, d});
        }
      break;
    }
    case DistractorShape::kCylinder: {
      const int segments = 24;
      for (int j = 0; j < segments; ++j) {
        const double a0 = 2 * kPi * j / segments, a1 = 2 * kPi * (j + 1) / segments;
        const Vec3 b0 = place(r * std::cos(a0), r * std::sin(a0), 0), b1 = place(r * std::cos(a1), r * std::sin(a1), 0);
        const Vec3 t0 = place(r * std::cos(a0), r * std::sin(a0), size), t1 = place(r * std::cos(a1), r * std::sin(a1), size);
        tris.push_back({place(0, 0, 0), b1, b0});
        tris.push_back({place(0, 0, size), t0, t1});
        tris.push_back({b0, b1, t1});
        tris.push_back({b0, t1, t0});
      }
      break;
    }
  }
  return tris;
}

void SceneConfig::validate() const {
  check_range(camera.distance, "camera.distance");
  check_range(camera.elevation, "camera.elevation");
  check_range(camera.azimuth, "camera.azimuth");
  if (!(camera.distance.min > 0)) throw_invalid("camera distance must be positive");
  if (!(camera.elevation.min > 0) || camera.elevation.max > kPi / 2)
    throw_invalid("camera elevation must lie in (0, pi/2]");
  if (intrinsics.width <= 0 || intrinsics.height <= 0 || !(intrinsics.focal_px > 0))
    throw_invalid("invalid camera intrinsics");
  check_range(distractor_count, "distractor_count");
  if (distractor_count.min < 0 || std::floor(distractor_count.max) < std::ceil(distractor_count.min))
    throw_invalid("distractor_count must contain a non-negative integer");
  check_range(distractor_size, "distractor_size");
  if (!(distractor_size.min > 0)) throw_invalid("distractor size must be positive");
  if (!(distractor_margin >= 0)) throw_invalid("distractor_margin must be >= 0");
  if (!(cloth_thickness > 0)) throw_invalid("cloth_thickness must be positive");
  if (!std::isfinite(plane_height)) throw_invalid("plane_height must be finite");
  check_range(plane_size, "plane_size");
  if (!(plane_size.min > 0)) throw_invalid("plane size must be positive");
  check_range(ambient, "ambient");
  check_range(light_count, "light_count");
  if (light_count.min < 0 || std::floor(light_count.max) < std::ceil(light_count.min))
    throw_invalid("light_count must contain a non-negative integer");
  check_range(light_intensity, "light_intensity");
  check_range(light_elevation, "light_elevation");
  if (ambient.min < 0 || light_intensity.min < 0) throw_invalid("light intensities must be >= 0");
}

std::array<std::array<Vec3, 3>, 2> Scene::plane_triangles() const {
  const double h = 0.5 * plane_size;
  const Vec3 a = plane_center + Vec3{-h, -h, 0}, b = plane_center + Vec3{h, -h, 0};
  const Vec3 c = plane_center + Vec3{h, h, 0}, d = plane_center + Vec3{-h, h, 0};
  return {{{a, b, c}, {a, c, d}}};
}

std::vector<BvhObject> Scene::objects() const {
  std::vector<BvhObject> out;
  BvhObject cloth_obj{kClothId, {}};
  cloth_obj.triangles.reserve(cloth.triangles.size());
  for (const Triangle& t : cloth.triangles)
    cloth_obj.triangles.push_back({cloth.vertices[t[0]], cloth.vertices[t[1]], cloth.vertices[t[2]]});
  out.push_back(std::move(cloth_obj));
  const auto plane = plane_triangles();
  out.push_back({kPlaneId, {plane[0], plane[1]}});
  for (size_t k = 0; k < distractors.size(); ++k)
    out.push_back({static_cast<uint32_t>(kFirstDistractorId + k), distractors[k].triangles()});
  return out;
}

Scene compose_scene(const ClothMesh& cloth, MaterialProcedure procedure, const SceneConfig& cfg, Rng& rng) {
  cfg.validate();
  validate(cloth);
  Scene scene;
  scene.cloth = solidify(cloth, cfg.cloth_thickness);
  double lowest = INFINITY;
  Vec3 lo{INFINITY, INFINITY, INFINITY}, hi = -lo;
  for (const Vec3& v : scene.cloth.vertices) lowest = std::min(lowest, v.z);
  for (Vec3& v : scene.cloth.vertices) {
    v.z += cfg.plane_height - lowest;
    lo = cwise_min(lo, v);
    hi = cwise_max(hi, v);
  }
  scene.cloth_material = sample_material(procedure, rng);
  const Vec3 center = centroid(scene.cloth.vertices);

  scene.plane_size = sample(rng, cfg.plane_size);
  scene.plane_center = {center.x, center.y, cfg.plane_height};
  scene.plane_material = sample_material(MaterialProcedure::kRandomTexture, rng);

  const int count = sample_count(rng, cfg.distractor_count);
  const double half_plane = 0.5 * scene.plane_size;
  for (int k = 0; k < count; ++k) {
    Distractor d;
    d.shape = static_cast<DistractorShape>(rng.uniform_int(0, 2));
    d.size = sample(rng, cfg.distractor_size);
    auto clamp_axis = [&](double v, double c) {
      return std::clamp(v, c - half_plane + 0.5 * d.size, c + half_plane - 0.5 * d.size);
    };
    const double x = rng.uniform(lo.x - cfg.distractor_margin, hi.x + cfg.distractor_margin);
    const double y = rng.uniform(lo.y - cfg.distractor_margin, hi.y + cfg.distractor_margin);
    d.center_on_plane = {clamp_axis(x, center.x), clamp_axis(y, center.y), cfg.plane_height};
    d.yaw = rng.uniform(0, 2 * kPi);
    d.color = random_color(rng);
    scene.distractors.push_back(d);
  }

  scene.ambient = sample(rng, cfg.ambient);
  const int lights = sample_count(rng, cfg.light_count);
  for (int k = 0; k < lights; ++k) {
    const double el = sample(rng, cfg.light_elevation), az = rng.uniform(0, 2 * kPi);
    const double i = sample(rng, cfg.light_intensity);
    const Vec3 tint{rng.uniform(0.85, 1.0), rng.uniform(0.85, 1.0), rng.uniform(0.85, 1.0)};
    scene.lights.push_back(
        {{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)}, tint * i});
  }
  scene.background = random_color(rng);
  scene.camera = sample_camera(center, cfg.camera, cfg.intrinsics, rng);
  return scene;
}

}  // namespace clothforge

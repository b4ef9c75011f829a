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

#include "scene/scene_json.h"

#include <json.hpp>

#include "geometry/mesh.h"

namespace clothforge {
namespace {

using Json = nlohmann::ordered_json;

Json vec(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

Json material_json(const Material& m) {
  Json j;
  j["procedure"] = to_string(m.procedure);
  j["base"] = vec(m.base);
  j["secondary"] = vec(m.secondary);
  j["stripe_period"] = m.stripe_period;
  j["stripe_fraction"] = m.stripe_fraction;
  j["stripe_angle"] = m.stripe_angle;
  Json logos = Json::array();
  for (const Logo& l : m.logos)
    logos.push_back({{"uv_min", {l.u0, l.v0}},
                     {"uv_max", {l.u1, l.v1}},
                     {"color_a", vec(l.color_a)},
                     {"color_b", vec(l.color_b)},
                     {"noise_seed", l.noise_seed},
                     {"noise_scale", l.noise_scale}});
  j["logos"] = logos;
  j["noise_seed"] = m.noise_seed;
  j["noise_octaves"] = m.noise_octaves;
  j["noise_scale"] = m.noise_scale;
  j["mix_color"] = vec(m.mix_color);
  j["mix_weight"] = m.mix_weight;
  return j;
}

}  // namespace

std::string scene_to_json(const Scene& s) {
  Json j;
  const Intrinsics& k = s.camera.intrinsics;
  j["camera"] = {{"position", vec(s.camera.position)},
                 {"look_at", vec(s.camera.look_at)},
                 {"up", vec(s.camera.up)},
                 {"focal_px", k.focal_px},
                 {"width", k.width},
                 {"height", k.height},
                 {"cx", k.principal_x()},
                 {"cy", k.principal_y()}};
  Vec3 lo{0, 0, 0}, hi{0, 0, 0};
  if (!s.cloth.vertices.empty()) {
    lo = hi = s.cloth.vertices[0];
    for (const Vec3& v : s.cloth.vertices) {
      lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
      hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
    }
  }
  j["cloth"] = {{"category", std::string(to_string(s.cloth.category))},
                {"vertices", s.cloth.vertices.size()},
                {"triangles", s.cloth.triangles.size()},
                {"bounds_min", vec(lo)},
                {"bounds_max", vec(hi)},
                {"material", material_json(s.cloth_material)}};
  j["plane"] = {{"center", vec(s.plane_center)}, {"size", s.plane_size}, {"material", material_json(s.plane_material)}};
  Json distractors = Json::array();
  for (const Distractor& d : s.distractors)
    distractors.push_back({{"shape", to_string(d.shape)},
                           {"size", d.size},
                           {"center_on_plane", vec(d.center_on_plane)},
                           {"yaw", d.yaw},
                           {"color", vec(d.color)}});
  j["distractors"] = distractors;
  Json lights = Json::array();
  for (const DirectionalLight& l : s.lights)
    lights.push_back({{"direction", vec(l.direction)}, {"intensity", vec(l.intensity)}});
  j["ambient"] = s.ambient;
  j["lights"] = lights;
  j["background"] = vec(s.background);
  return j.dump(2) + "\n";
}

}  // namespace clothforge

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

#include "render/render.h"

#include <algorithm>
#include <cmath>
#include <thread>

#include "common/error.h"

namespace clothforge {
namespace {

// Runs fn(row) for every image row, split into contiguous bands.
template <typename Fn>
void for_each_row(int height, int threads, Fn&& fn) {
  threads = std::clamp(threads, 1, std::max(1, height));
  if (threads == 1) {
    for (int y = 0; y < height; ++y) fn(y);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    const int y0 = height * t / threads, y1 = height * (t + 1) / threads;
    pool.emplace_back([&fn, y0, y1] {
      for (int y = y0; y < y1; ++y) fn(y);
    });
  }
  for (auto& th : pool) th.join();
}

uint8_t quantize(double c) { return static_cast<uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0)); }

Vec3 shade_albedo(const Scene& scene, const Hit& hit, const Vec3& point) {
  switch (hit.object_id) {
    case Scene::kClothId: {
      const Triangle& t = scene.cloth.triangles[hit.triangle];
      if (scene.cloth.uvs.empty()) return scene.cloth_material.base;
      Vec2 uv{0, 0};
      for (int k = 0; k < 3; ++k) uv += scene.cloth.uvs[t[k]] * hit.barycentric[k];
      return scene.cloth_material.albedo(uv.x, uv.y);
    }
    case Scene::kPlaneId: {
      const double h = 0.5 * scene.plane_size;
      const double u = (point.x - (scene.plane_center.x - h)) / scene.plane_size;
      const double v = (point.y - (scene.plane_center.y - h)) / scene.plane_size;
      return scene.plane_material.albedo(u, v);
    }
    default:
      return scene.distractors[hit.object_id - Scene::kFirstDistractorId].color;
  }
}

}  // namespace

Bvh build_scene_bvh(const Scene& scene) {
  const auto objects = scene.objects();
  return build_bvh(objects);
}

Projection project(const Camera& camera, const Vec3& p) { return camera.project(p); }

std::vector<int32_t> object_ids(const Scene& scene, const Bvh& bvh, int threads) {
  const Camera& cam = scene.camera;
  const int w = cam.intrinsics.width, h = cam.intrinsics.height;
  std::vector<int32_t> ids(static_cast<size_t>(w) * h, -1);
  for_each_row(h, threads, [&](int y) {
    for (int x = 0; x < w; ++x) {
      const auto hit = bvh.raycast(cam.ray_through(x + 0.5, y + 0.5), INFINITY);
      if (hit) ids[static_cast<size_t>(y) * w + x] = static_cast<int32_t>(hit->object_id);
    }
  });
  return ids;
}

Image render(const Scene& scene, const Bvh& bvh, int threads) {
  const Camera& cam = scene.camera;
  Image image(cam.intrinsics.width, cam.intrinsics.height);
  const std::vector<BvhObject> objects = scene.objects();  // index == object id
  for_each_row(image.height, threads, [&](int y) {
    for (int x = 0; x < image.width; ++x) {
      const Ray ray = cam.ray_through(x + 0.5, y + 0.5);
      Vec3 color = scene.background;
      if (const auto hit = bvh.raycast(ray, INFINITY)) {
        const Vec3 p = ray.origin + ray.direction * hit->t;
        // Geometric normal of the hit triangle, facing the viewer.
        const auto& v = objects[hit->object_id].triangles[hit->triangle];
        Vec3 n = normalized(cross(v[1] - v[0], v[2] - v[0]));
        if (dot(n, ray.direction) > 0) n = -n;
        const Vec3 albedo = shade_albedo(scene, *hit, p);
        Vec3 light{scene.ambient, scene.ambient, scene.ambient};
        const Vec3 origin = p + n * kRayEpsilon;
        for (const DirectionalLight& l : scene.lights) {
          const double ndl = dot(n, l.direction);
          if (ndl <= 0) continue;
          if (bvh.occluded(Ray{origin, l.direction}, INFINITY)) continue;
          light += l.intensity * ndl;
        }
        color = {albedo.x * light.x, albedo.y * light.y, albedo.z * light.z};
      }
      uint8_t* px = image.at(x, y);
      px[0] = quantize(color.x);
      px[1] = quantize(color.y);
      px[2] = quantize(color.z);
    }
  });
  return image;
}

long Mask::count() const { return std::count(data.begin(), data.end(), uint8_t{1}); }

BBox tight_bbox(const Mask& mask) {
  int x0 = mask.width, y0 = mask.height, x1 = -1, y1 = -1;
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.at(x, y)) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
  BBox b;
  if (x1 < 0) return b;
  b = {x0, y0, x1 - x0 + 1, y1 - y0 + 1, false};
  return b;
}

VisibleMask mask_from_ids(const std::vector<int32_t>& ids, int width, int height, uint32_t object_id) {
  VisibleMask out;
  out.mask.width = width;
  out.mask.height = height;
  out.mask.data.resize(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) out.mask.data[i] = ids[i] == static_cast<int32_t>(object_id);
  out.bbox = tight_bbox(out.mask);
  return out;
}

VisibleMask visible_mask(const Scene& scene, const Bvh& bvh, int threads) {
  return mask_from_ids(object_ids(scene, bvh, threads), scene.camera.intrinsics.width,
                       scene.camera.intrinsics.height, Scene::kClothId);
}

bool point_visible(const Bvh& bvh, const Camera& camera, const Vec3& p) {
  if (!camera.in_image(camera.project(p))) return false;
  const Vec3 d = p - camera.position;
  const double dist = norm(d);
  if (!(dist > kRayEpsilon)) return false;
  return !bvh.occluded(Ray{camera.position, d / dist}, dist - kRayEpsilon);
}

bool keypoint_visibility(const Bvh& bvh, const Camera& camera, const ClothMesh& mesh, const std::string& name) {
  const int v = mesh.keypoint_vertex(name);
  if (point_visible(bvh, camera, mesh.vertices[v])) return true;
  for (int u : ring_neighbors(mesh, v, 2))
    if (point_visible(bvh, camera, mesh.vertices[u])) return true;
  return false;
}

}  // namespace clothforge

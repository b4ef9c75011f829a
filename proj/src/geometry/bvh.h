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
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "geometry/vec.h"

namespace clothforge {

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length

  // Normalizes the direction; throws on a zero direction.
  static Ray through(const Vec3& origin, const Vec3& direction);
};

struct Aabb {
  Vec3 lo{INFINITY, INFINITY, INFINITY};
  Vec3 hi{-INFINITY, -INFINITY, -INFINITY};

  void grow(const Vec3& p) {
    lo = cwise_min(lo, p);
    hi = cwise_max(hi, p);
  }
  void grow(const Aabb& b) {
    lo = cwise_min(lo, b.lo);
    hi = cwise_max(hi, b.hi);
  }
  bool contains(const Aabb& b) const {
    return lo.x <= b.lo.x && lo.y <= b.lo.y && lo.z <= b.lo.z && hi.x >= b.hi.x &&
           hi.y >= b.hi.y && hi.z >= b.hi.z;
  }
  double surface_area() const {
    const Vec3 d = hi - lo;
    return d.x < 0 ? 0 : 2 * (d.x * d.y + d.y * d.z + d.z * d.x);
  }
};

struct SceneTriangle {
  std::array<Vec3, 3> v;
  uint32_t object_id = 0;
  uint32_t index = 0;  // triangle index within its object
};

struct BvhObject {
  uint32_t id = 0;
  std::vector<std::array<Vec3, 3>> triangles;
};

struct Hit {
  double t = 0;
  uint32_t object_id = 0;
  uint32_t triangle = 0;
  std::array<double, 3> barycentric{};  // weights of v[0], v[1], v[2]
};

// Watertight ray/triangle test; hits with 0 < t <= t_max.
std::optional<Hit> intersect_triangle(const Ray& ray, const SceneTriangle& tri, double t_max);

// True if a should be preferred over b as the nearest hit: smaller t, ties
// broken by (object id, triangle index).
inline bool nearer(const Hit& a, const Hit& b) {
  if (a.t != b.t) return a.t < b.t;
  if (a.object_id != b.object_id) return a.object_id < b.object_id;
  return a.triangle < b.triangle;
}

class Bvh {
 public:
  struct Node {
    Aabb box;
    uint32_t first = 0;  // leaf: first triangle; internal: left child (right = first + 1)
    uint32_t count = 0;  // triangles in leaf, 0 for internal nodes
    bool is_leaf() const { return count > 0; }
  };

  static constexpr uint32_t kMaxLeafSize = 4;

  // Binned-SAH build. Throws invalid-argument on empty input.
  static Bvh build(std::vector<SceneTriangle> triangles);

  std::optional<Hit> raycast(const Ray& ray, double t_max) const;
  bool occluded(const Ray& ray, double t_max) const;

  std::span<const Node> nodes() const { return nodes_; }
  // Triangles in leaf order.
  std::span<const SceneTriangle> triangles() const { return tris_; }

 private:
  std::vector<Node> nodes_;
  std::vector<SceneTriangle> tris_;
};

Bvh build_bvh(std::span<const BvhObject> objects);

}  // namespace clothforge

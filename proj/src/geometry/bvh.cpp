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

#include "geometry/bvh.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "common/error.h"

namespace clothforge {

Ray Ray::through(const Vec3& origin, const Vec3& direction) {
  const double len = norm(direction);
  if (!(len > 0) || !std::isfinite(len)) throw_invalid("ray direction must be non-zero");
  return {origin, direction / len};
}

namespace {

int max_axis(const Vec3& d) {
  const double ax = std::fabs(d.x), ay = std::fabs(d.y), az = std::fabs(d.z);
  if (ax > ay && ax > az) return 0;
  return ay > az ? 1 : 2;
}

// Per-ray constants for the watertight test (shear to a ray-aligned frame).
struct ShearedRay {
  int kx, ky, kz;
  double sx, sy, sz;

  explicit ShearedRay(const Vec3& d) {
    kz = max_axis(d);
    kx = (kz + 1) % 3;
    ky = (kx + 1) % 3;
    if (d[kz] < 0) std::swap(kx, ky);
    sx = d[kx] / d[kz];
    sy = d[ky] / d[kz];
    sz = 1.0 / d[kz];
  }
};

std::optional<Hit> intersect_sheared(const Ray& ray, const ShearedRay& s, const SceneTriangle& tri,
                                     double t_max) {
  const Vec3 a = tri.v[0] - ray.origin;
  const Vec3 b = tri.v[1] - ray.origin;
  const Vec3 c = tri.v[2] - ray.origin;
  const double ax = a[s.kx] - s.sx * a[s.kz], ay = a[s.ky] - s.sy * a[s.kz];
  const double bx = b[s.kx] - s.sx * b[s.kz], by = b[s.ky] - s.sy * b[s.kz];
  const double cx = c[s.kx] - s.sx * c[s.kz], cy = c[s.ky] - s.sy * c[s.kz];
  const double u = cx * by - cy * bx;
  const double v = ax * cy - ay * cx;
  const double w = bx * ay - by * ax;
  if ((u < 0 || v < 0 || w < 0) && (u > 0 || v > 0 || w > 0)) return std::nullopt;
  const double det = u + v + w;
  if (det == 0) return std::nullopt;
  const double az = s.sz * a[s.kz], bz = s.sz * b[s.kz], cz = s.sz * c[s.kz];
  const double t = (u * az + v * bz + w * cz) / det;
  if (!(t > 0) || !(t <= t_max)) return std::nullopt;
  Hit hit;
  hit.t = t;
  hit.object_id = tri.object_id;
  hit.triangle = tri.index;
  hit.barycentric = {u / det, v / det, w / det};
  return hit;
}

Aabb triangle_box(const SceneTriangle& t) {
  Aabb b;
  for (const Vec3& p : t.v) b.grow(p);
  return b;
}

Vec3 triangle_centroid(const SceneTriangle& t) { return (t.v[0] + t.v[1] + t.v[2]) / 3.0; }

class Builder {
 public:
  Builder(std::vector<SceneTriangle>& tris, std::vector<Bvh::Node>& nodes)
      : tris_(tris), nodes_(nodes) {
    boxes_.reserve(tris.size());
    centroids_.reserve(tris.size());
    for (const SceneTriangle& t : tris) {
      boxes_.push_back(triangle_box(t));
      centroids_.push_back(triangle_centroid(t));
    }
    order_.resize(tris.size());
    for (uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
  }

  void run() {
    nodes_.reserve(2 * tris_.size());
    nodes_.push_back({});
    split(0, 0, static_cast<uint32_t>(tris_.size()));
    std::vector<SceneTriangle> sorted;
    sorted.reserve(tris_.size());
    for (uint32_t i : order_) sorted.push_back(tris_[i]);
    tris_.swap(sorted);
  }

 private:
  static constexpr int kBins = 16;

  void split(uint32_t node, uint32_t begin, uint32_t end) {
    Aabb box, centroid_box;
    for (uint32_t i = begin; i < end; ++i) {
      box.grow(boxes_[order_[i]]);
      centroid_box.grow(centroids_[order_[i]]);
    }
    nodes_[node].box = box;
    const uint32_t count = end - begin;
    if (count <= Bvh::kMaxLeafSize) return make_leaf(node, begin, count);

    const int axis = max_axis(centroid_box.hi - centroid_box.lo);
    const double lo = centroid_box.lo[axis], hi = centroid_box.hi[axis];
    uint32_t mid = begin;
    if (hi > lo) {
      struct Bin { Aabb box; uint32_t count = 0; };
      Bin bins[kBins];
      const double scale = kBins / (hi - lo);
      auto bin_of = [&](uint32_t i) {
        return std::min(kBins - 1, static_cast<int>((centroids_[i][axis] - lo) * scale));
      };
      for (uint32_t i = begin; i < end; ++i) {
        Bin& b = bins[bin_of(order_[i])];
        b.box.grow(boxes_[order_[i]]);
        ++b.count;
      }
      double right_area[kBins];
      uint32_t right_count[kBins];
      Aabb acc;
      uint32_t n = 0;
      for (int k = kBins - 1; k > 0; --k) {
        acc.grow(bins[k].box);
        n += bins[k].count;
        right_area[k] = acc.surface_area();
        right_count[k] = n;
      }
      double best_cost = INFINITY;
      int best_split = -1;
      acc = Aabb{};
      n = 0;
      for (int k = 1; k < kBins; ++k) {
        acc.grow(bins[k - 1].box);
        n += bins[k - 1].count;
        if (n == 0 || right_count[k] == 0) continue;
        const double cost = acc.surface_area() * n + right_area[k] * right_count[k];
        if (cost < best_cost) {
          best_cost = cost;
          best_split = k;
        }
      }
      if (best_split >= 0) {
        mid = static_cast<uint32_t>(
            std::partition(order_.begin() + begin, order_.begin() + end,
                           [&](uint32_t i) { return bin_of(i) < best_split; }) -
            order_.begin());
      }
    }
    if (mid == begin || mid == end) {
      // All centroids coincide along the axis: split by index.
      mid = begin + count / 2;
      std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                       [&](uint32_t a, uint32_t b) { return centroids_[a][axis] < centroids_[b][axis]; });
    }
    const uint32_t left = static_cast<uint32_t>(nodes_.size());
    nodes_.push_back({});
    nodes_.push_back({});
    nodes_[node].first = left;
    nodes_[node].count = 0;
    split(left, begin, mid);
    split(left + 1, mid, end);
  }

  void make_leaf(uint32_t node, uint32_t begin, uint32_t count) {
    nodes_[node].first = begin;
    nodes_[node].count = count;
  }

  std::vector<SceneTriangle>& tris_;
  std::vector<Bvh::Node>& nodes_;
  std::vector<Aabb> boxes_;
  std::vector<Vec3> centroids_;
  std::vector<uint32_t> order_;
};

struct RayBoxTest {
  Vec3 origin, inv;

  explicit RayBoxTest(const Ray& ray) : origin(ray.origin) {
    inv = {1.0 / ray.direction.x, 1.0 / ray.direction.y, 1.0 / ray.direction.z};
  }

  // Entry distance, or +inf on a miss. The far plane is padded so that
  // rounding never culls a box a triangle test would hit.
  double entry(const Aabb& b, double t_max) const {
    double t0 = 0, t1 = t_max;
    for (int a = 0; a < 3; ++a) {
      double near = (b.lo[a] - origin[a]) * inv[a];
      double far = (b.hi[a] - origin[a]) * inv[a];
      if (near > far) std::swap(near, far);
      far *= 1 + 4 * std::numeric_limits<double>::epsilon();
      if (std::isnan(near) || std::isnan(far)) continue;  // origin on slab with zero direction
      t0 = near > t0 ? near : t0;
      t1 = far < t1 ? far : t1;
      if (t0 > t1) return INFINITY;
    }
    return t0;
  }
};

}  // namespace

std::optional<Hit> intersect_triangle(const Ray& ray, const SceneTriangle& tri, double t_max) {
  return intersect_sheared(ray, ShearedRay(ray.direction), tri, t_max);
}

Bvh Bvh::build(std::vector<SceneTriangle> triangles) {
  if (triangles.empty()) throw_invalid("cannot build a BVH without triangles");
  Bvh bvh;
  bvh.tris_ = std::move(triangles);
  Builder(bvh.tris_, bvh.nodes_).run();
  return bvh;
}

std::optional<Hit> Bvh::raycast(const Ray& ray, double t_max) const {
  const ShearedRay sheared(ray.direction);
  const RayBoxTest box_test(ray);
  std::optional<Hit> best;
  double best_t = t_max;
  uint32_t stack[128];
  int sp = 0;
  if (box_test.entry(nodes_[0].box, best_t) == INFINITY) return best;
  stack[sp++] = 0;
  while (sp > 0) {
    const Node& node = nodes_[stack[--sp]];
    if (node.is_leaf()) {
      for (uint32_t i = node.first; i < node.first + node.count; ++i) {
        auto hit = intersect_sheared(ray, sheared, tris_[i], best_t);
        if (hit && (!best || nearer(*hit, *best))) {
          best = hit;
          best_t = hit->t;
        }
      }
      continue;
    }
    const uint32_t l = node.first, r = node.first + 1;
    const double tl = box_test.entry(nodes_[l].box, best_t);
    const double tr = box_test.entry(nodes_[r].box, best_t);
    // Push the far child first so the near one is visited next.
    if (tl <= tr) {
      if (tr != INFINITY) stack[sp++] = r;
      if (tl != INFINITY) stack[sp++] = l;
    } else {
      if (tl != INFINITY) stack[sp++] = l;
      if (tr != INFINITY) stack[sp++] = r;
    }
  }
  return best;
}

bool Bvh::occluded(const Ray& ray, double t_max) const {
  const ShearedRay sheared(ray.direction);
  const RayBoxTest box_test(ray);
  uint32_t stack[128];
  int sp = 0;
  stack[sp++] = 0;
  while (sp > 0) {
    const Node& node = nodes_[stack[--sp]];
    if (box_test.entry(node.box, t_max) == INFINITY) continue;
    if (node.is_leaf()) {
      for (uint32_t i = node.first; i < node.first + node.count; ++i)
        if (intersect_sheared(ray, sheared, tris_[i], t_max)) return true;
      continue;
    }
    stack[sp++] = node.first + 1;
    stack[sp++] = node.first;
  }
  return false;
}

Bvh build_bvh(std::span<const BvhObject> objects) {
  std::vector<SceneTriangle> tris;
  for (const BvhObject& obj : objects) {
    for (size_t i = 0; i < obj.triangles.size(); ++i)
      tris.push_back({obj.triangles[i], obj.id, static_cast<uint32_t>(i)});
  }
  return Bvh::build(std::move(tris));
}

}  // namespace clothforge

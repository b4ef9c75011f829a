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

#include <string>
#include <vector>

#include "geometry/bvh.h"
#include "render/image.h"
#include "scene/scene.h"

namespace clothforge {

// Offset applied to secondary rays and visibility rays, m.
inline constexpr double kRayEpsilon = 1e-5;

Bvh build_scene_bvh(const Scene& scene);

Projection project(const Camera& camera, const Vec3& p);

// Nearest-hit object id per pixel (row-major), -1 on a miss. Primary rays go
// through pixel centres.
std::vector<int32_t> object_ids(const Scene& scene, const Bvh& bvh, int threads = 1);

Image render(const Scene& scene, const Bvh& bvh, int threads = 1);

struct BBox {
  int x = 0, y = 0, w = 0, h = 0;
  bool empty = true;
};

struct Mask {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;  // row-major, 0 or 1

  uint8_t at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
  long count() const;
};

BBox tight_bbox(const Mask& mask);

struct VisibleMask {
  Mask mask;
  BBox bbox;
};

VisibleMask visible_mask(const Scene& scene, const Bvh& bvh, int threads = 1);
VisibleMask mask_from_ids(const std::vector<int32_t>& ids, int width, int height, uint32_t object_id);

// True when p projects into the image in front of the camera and the segment
// from the camera to p (shortened by kRayEpsilon) hits nothing.
bool point_visible(const Bvh& bvh, const Camera& camera, const Vec3& p);

// Visible when the keypoint vertex or any vertex of its 2-ring is visible.
bool keypoint_visibility(const Bvh& bvh, const Camera& camera, const ClothMesh& mesh, const std::string& name);

}  // namespace clothforge

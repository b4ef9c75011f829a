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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "geometry/category.h"
#include "render/render.h"

namespace clothforge {

struct Keypoint2D {
  std::string name;
  double x = 0;
  double y = 0;
  bool visible = false;
};

// Reassigns canonical names so the result does not depend on which physical
// side of a symmetric cloth faces the camera. Input must hold the full
// keypoint set of the category (positions known even when occluded); output
// follows keypoint_names(category) order.
std::vector<Keypoint2D> order_keypoints(ClothCategory category, const std::vector<Keypoint2D>& keypoints,
                                        const BBox& bbox);

// Uncompressed COCO RLE: column-major run lengths starting with a 0-run.
struct Rle {
  int height = 0;
  int width = 0;
  std::vector<uint32_t> counts;
};

Rle encode_rle(const Mask& mask);
Mask decode_rle(const Rle& rle);

struct AnnotationRecord {
  int64_t id = 0;
  int64_t image_id = 0;
  std::string file_name;
  int width = 0;
  int height = 0;
  ClothCategory category = ClothCategory::kTowel;
  BBox bbox;
  long area = 0;
  Rle segmentation;
  // Flat (x, y, v) triplets in canonical order; v is 2 (visible) or 0, and
  // hidden keypoints are written as (0, 0, 0).
  std::vector<double> keypoints;
  int num_keypoints = 0;
};

// Projects and labels the scene's cloth keypoints, orders them, and builds
// the record. Visible keypoints outside the image or outside the 1 px dilated
// bbox are exported as hidden.
AnnotationRecord annotate(const Scene& scene, const Bvh& bvh, const VisibleMask& visible, int64_t image_id,
                          const std::string& file_name);

struct CocoDataset {
  std::vector<AnnotationRecord> records;  // one annotation per image
  std::vector<ClothCategory> categories;
};

// Stable key order; records are written in the given order.
std::string export_coco(const CocoDataset& dataset);
void write_coco(const CocoDataset& dataset, const std::filesystem::path& path);
// Throws parse-error with a JSON pointer location on schema mismatch.
CocoDataset parse_coco(const std::string& text, const std::string& source = "<coco>");

}  // namespace clothforge

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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geometry/vec.h"

namespace clothforge {

// Values in [0, 1], row-major; coordinates are pixel indices.
struct Heatmap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
};

// Max-composition of unit-height Gaussians centred on the keypoints.
Heatmap encode_heatmap(const std::vector<Vec2>& keypoints, double sigma, int width, int height);

struct Detection {
  double x = 0;
  double y = 0;
  double score = 0;
};

// Strict 3x3 local maxima with value >= threshold. A plateau of equal maxima
// yields only its first pixel in row-major order. Sorted by descending score.
std::vector<Detection> decode_heatmap(const Heatmap& heatmap, double threshold = 0.01);

// Detections and visible ground truth of one keypoint type in one image.
struct ImageKeypoints {
  std::vector<Detection> detections;
  std::vector<Vec2> ground_truth;
};

struct ApResult {
  double ap = 0;
  long num_gt = 0;
  long num_detections = 0;
  long true_positives = 0;
};

// Greedy score-ordered matching (nearest unmatched ground truth within the
// pixel threshold, ties to the lower index), detections pooled over images
// and matched per image, 101-point interpolated precision. With no ground
// truth the AP is 1 without detections and 0 with any.
ApResult average_precision(const std::vector<ImageKeypoints>& images, double threshold);
double average_precision(const std::vector<Detection>& detections, const std::vector<Vec2>& ground_truth,
                         double threshold);

struct AkdResult {
  double value = 0;
  bool defined = false;  // false when no (detection, ground truth) pair exists
  long pairs = 0;
  long skipped = 0;  // visible ground truth in images without a detection of its type
};

// Mean distance from each visible ground-truth keypoint to the best-scoring
// detection of the same type in the same image.
AkdResult average_keypoint_distance(const std::vector<std::vector<ImageKeypoints>>& per_type);

inline const std::vector<double> kDefaultThresholds = {2.0, 4.0, 8.0};

struct TypeReport {
  std::map<double, ApResult> ap;  // by threshold
  bool included = false;          // has ground truth, so it counts toward mAP
};

struct EvalReport {
  std::vector<double> thresholds;
  std::map<std::string, TypeReport> types;  // "<category>.<keypoint>"
  std::optional<double> map;                // unset when no type has ground truth
  AkdResult akd;
  long images = 0;
  long gt_keypoints = 0;
  long visible_gt_keypoints = 0;
  long detections = 0;

  std::string to_json() const;
};

// Keypoint type name -> per-image data; every type must list the same images
// in the same order.
EvalReport evaluate(const std::map<std::string, std::vector<ImageKeypoints>>& data,
                    const std::vector<double>& thresholds = kDefaultThresholds);

// Reads a COCO keypoint ground-truth file and a COCO results array.
EvalReport evaluate_files(const std::string& gt_path, const std::string& pred_path,
                          const std::vector<double>& thresholds = kDefaultThresholds);

}  // namespace clothforge

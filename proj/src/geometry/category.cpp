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

#include "geometry/category.h"

#include <array>

namespace clothforge {
namespace {

constexpr std::array<std::string_view, 4> kTowelKeypoints = {
    "corner0", "corner1", "corner2", "corner3"};

constexpr std::array<std::string_view, 12> kTshirtKeypoints = {
    "neck_left",          "neck_right",          "shoulder_left",
    "shoulder_right",     "sleeve_left_top",     "sleeve_left_bottom",
    "sleeve_right_top",   "sleeve_right_bottom", "armpit_left",
    "armpit_right",       "waist_left",          "waist_right"};

constexpr std::array<std::string_view, 7> kShortsKeypoints = {
    "waist_left",      "waist_right",     "crotch",         "hem_left_outer",
    "hem_left_inner",  "hem_right_outer", "hem_right_inner"};

}  // namespace

std::string_view to_string(ClothCategory category) {
  switch (category) {
    case ClothCategory::kTowel: return "towel";
    case ClothCategory::kTshirt: return "tshirt";
    case ClothCategory::kShorts: return "shorts";
  }
  return "unknown";
}

std::optional<ClothCategory> parse_category(std::string_view name) {
  for (ClothCategory c : kAllCategories)
    if (to_string(c) == name) return c;
  return std::nullopt;
}

int coco_category_id(ClothCategory category) {
  return static_cast<int>(category) + 1;
}

std::span<const std::string_view> keypoint_names(ClothCategory category) {
  switch (category) {
    case ClothCategory::kTowel: return kTowelKeypoints;
    case ClothCategory::kTshirt: return kTshirtKeypoints;
    case ClothCategory::kShorts: return kShortsKeypoints;
  }
  return {};
}

std::string mirror_keypoint_name(std::string_view name) {
  std::string out(name);
  if (auto pos = out.find("left"); pos != std::string::npos) {
    out.replace(pos, 4, "right");
  } else if (pos = out.find("right"); pos != std::string::npos) {
    out.replace(pos, 5, "left");
  }
  return out;
}

}  // namespace clothforge

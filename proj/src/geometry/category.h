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

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace clothforge {

enum class ClothCategory { kTowel, kTshirt, kShorts };

inline constexpr ClothCategory kAllCategories[] = {
    ClothCategory::kTowel, ClothCategory::kTshirt, ClothCategory::kShorts};

std::string_view to_string(ClothCategory category);
std::optional<ClothCategory> parse_category(std::string_view name);

// COCO category id: towel=1, tshirt=2, shorts=3.
int coco_category_id(ClothCategory category);

// Canonical keypoint names in export order. The order also encodes the
// boundary order of the corresponding template outline (towel corners are
// listed counter-clockwise, so consecutive corners are physically adjacent).
std::span<const std::string_view> keypoint_names(ClothCategory category);

// Swaps "left" and "right" in a keypoint name; other names are unchanged.
std::string mirror_keypoint_name(std::string_view name);

}  // namespace clothforge

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

#include <vector>

#include "geometry/vec.h"

namespace clothforge {

// n points of the quadratic bezier with control point `control`, at
// uniformly spaced parameters. The first and last points are exactly p0, p2.
std::vector<Vec2> sample_bezier(const Vec2& p0, const Vec2& control, const Vec2& p2, int n);

struct CornerArc {
  Vec2 center;
  Vec2 tangent_in;   // on segment corner -> prev
  Vec2 tangent_out;  // on segment corner -> next
  double radius = 0;
};

// Circle tangent to both segments meeting at `corner`. Throws if the
// tangent points do not lie strictly inside both segments.
CornerArc corner_arc(const Vec2& prev, const Vec2& corner, const Vec2& next, double radius);

// n points of the rounding arc from tangent_in to tangent_out (inclusive).
// A zero radius, or a straight corner, yields just the corner.
std::vector<Vec2> round_corner(const Vec2& prev, const Vec2& corner, const Vec2& next,
                               double radius, int n);

}  // namespace clothforge

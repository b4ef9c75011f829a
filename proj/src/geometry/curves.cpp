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

#include "geometry/curves.h"

#include <cmath>
#include <numbers>

#include "common/error.h"

namespace clothforge {

std::vector<Vec2> sample_bezier(const Vec2& p0, const Vec2& control, const Vec2& p2, int n) {
  if (n < 2) throw_invalid("sample_bezier needs at least 2 points");
  std::vector<Vec2> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      out.push_back(p0);
      continue;
    }
    if (i == n - 1) {
      out.push_back(p2);
      continue;
    }
    const double t = static_cast<double>(i) / (n - 1);
    const double s = 1.0 - t;
    out.push_back(s * s * p0 + 2.0 * s * t * control + t * t * p2);
  }
  return out;
}

namespace {

// Interior angle at the corner, in (0, pi].
double corner_angle(const Vec2& a, const Vec2& b) {
  return std::atan2(std::fabs(cross(a, b)), dot(a, b));
}

bool is_straight(double angle) { return angle > std::numbers::pi - 1e-12; }

}  // namespace

CornerArc corner_arc(const Vec2& prev, const Vec2& corner, const Vec2& next, double radius) {
  if (!(radius > 0)) throw_invalid("corner radius must be positive");
  const double len_in = norm(prev - corner), len_out = norm(next - corner);
  if (len_in == 0 || len_out == 0) throw_invalid("corner has zero-length segment");
  const Vec2 a = (prev - corner) / len_in;
  const Vec2 b = (next - corner) / len_out;
  const double angle = corner_angle(a, b);
  if (angle < 1e-9) throw_invalid("corner segments are antiparallel");
  const double tangent_dist = radius / std::tan(0.5 * angle);
  if (!(tangent_dist < len_in) || !(tangent_dist < len_out))
    throw_invalid("corner radius too large for the incident segments");
  const Vec2 bisector = normalized(a + b);
  CornerArc arc;
  arc.radius = radius;
  arc.tangent_in = corner + a * tangent_dist;
  arc.tangent_out = corner + b * tangent_dist;
  arc.center = corner + bisector * (radius / std::sin(0.5 * angle));
  return arc;
}

std::vector<Vec2> round_corner(const Vec2& prev, const Vec2& corner, const Vec2& next,
                               double radius, int n) {
  if (radius < 0) throw_invalid("corner radius must be non-negative");
  if (radius == 0) return {corner};
  if (is_straight(corner_angle(normalized(prev - corner), normalized(next - corner))))
    return {corner};
  if (n < 2) throw_invalid("round_corner needs at least 2 points");
  const CornerArc arc = corner_arc(prev, corner, next, radius);
  const Vec2 d0 = arc.tangent_in - arc.center;
  const Vec2 d1 = arc.tangent_out - arc.center;
  const double start = std::atan2(d0.y, d0.x);
  // Signed sweep along the short way; always below pi for a proper corner.
  const double sweep = std::atan2(cross(d0, d1), dot(d0, d1));
  std::vector<Vec2> out;
  out.reserve(n);
  out.push_back(arc.tangent_in);
  for (int i = 1; i + 1 < n; ++i) {
    const double phi = start + sweep * static_cast<double>(i) / (n - 1);
    out.push_back(arc.center + Vec2{std::cos(phi), std::sin(phi)} * radius);
  }
  out.push_back(arc.tangent_out);
  return out;
}

}  // namespace clothforge

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

#include "templates/templates.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "common/error.h"
#include "geometry/curves.h"
#include "geometry/triangulate.h"

namespace clothforge {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr int kMaxAttempts = 100;

// Skeleton corner -> keypoint name, in outline order.
const std::vector<std::string>& corner_names(ClothCategory category) {
  static const std::vector<std::string> towel = {"corner0", "corner1", "corner2", "corner3"};
  static const std::vector<std::string> tshirt = {
      "waist_left",       "waist_right",      "armpit_right",       "sleeve_right_bottom",
      "sleeve_right_top", "shoulder_right",   "neck_right",         "neck_left",
      "shoulder_left",    "sleeve_left_top",  "sleeve_left_bottom", "armpit_left"};
  static const std::vector<std::string> shorts = {
      "waist_left",      "hem_left_outer",  "hem_left_inner", "crotch",
      "hem_right_inner", "hem_right_outer", "waist_right"};
  switch (category) {
    case ClothCategory::kTowel: return towel;
    case ClothCategory::kTshirt: return tshirt;
    case ClothCategory::kShorts: return shorts;
  }
  return towel;
}

class ParamLookup {
 public:
  explicit ParamLookup(const TemplateParams& params) {
    for (const auto& [k, v] : params) values_[k] = v;
  }
  double operator()(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw_invalid("missing template parameter '" + name + "'");
    return it->second;
  }

 private:
  std::map<std::string, double> values_;
};

std::vector<Vec2> towel_skeleton(const ParamLookup& p) {
  const double w = p("width"), h = p("width") * p("aspect");
  return {{0, 0}, {w, 0}, {w, h}, {0, h}};
}

struct Sleeve {
  Vec2 top, bottom;
};

// Right-side sleeve; the left one is its mirror image.
Sleeve right_sleeve(const Vec2& shoulder, double length, double width, double angle) {
  const Vec2 dir{std::cos(angle), -std::sin(angle)};
  const Vec2 down{-std::sin(angle), -std::cos(angle)};
  const Vec2 top = shoulder + dir * length;
  return {top, top + down * width};
}

std::optional<std::vector<Vec2>> tshirt_skeleton(const ParamLookup& p) {
  const double waist = p("waist_width"), height = p("torso_height");
  const double shoulder_x = 0.5 * p("shoulder_width"), shoulder_y = height - p("shoulder_drop");
  const double neck_x = 0.5 * p("neck_width");
  const double armpit_y = height - p("armpit_depth");
  if (!(neck_x < shoulder_x) || !(armpit_y > 0)) return std::nullopt;
  const Vec2 shoulder_r{shoulder_x, shoulder_y};
  const Vec2 armpit_r{shoulder_x, armpit_y};
  const Sleeve right = right_sleeve(shoulder_r, p("sleeve_length_right"), p("sleeve_width_right"),
                                    p("sleeve_angle_right"));
  Sleeve left = right_sleeve(shoulder_r, p("sleeve_length_left"), p("sleeve_width_left"),
                             p("sleeve_angle_left"));
  left.top.x = -left.top.x;
  left.bottom.x = -left.bottom.x;
  // The under-arm seam has to run outward along the sleeve.
  auto outward = [&](const Sleeve& s, double angle) {
    return dot(s.bottom - armpit_r, Vec2{std::cos(angle), -std::sin(angle)}) > 0;
  };
  Sleeve left_mirror = left;
  left_mirror.top.x = -left.top.x;
  left_mirror.bottom.x = -left.bottom.x;
  if (!outward(right, p("sleeve_angle_right")) || !outward(left_mirror, p("sleeve_angle_left")))
    return std::nullopt;
  return std::vector<Vec2>{{-0.5 * waist, 0},
                           {0.5 * waist, 0},
                           armpit_r,
                           right.bottom,
                           right.top,
                           shoulder_r,
                           {neck_x, height},
                           {-neck_x, height},
                           {-shoulder_x, shoulder_y},
                           left.top,
                           left.bottom,
                           {-shoulder_x, armpit_y}};
}

std::vector<Vec2> shorts_skeleton(const ParamLookup& p) {
  const double waist = p("waist_width"), leg = p("leg_length");
  const double top = leg + p("crotch_depth");
  const double inner = leg * std::tan(p("inseam_angle"));
  const double outer = inner + p("leg_width");
  return {{-0.5 * waist, top}, {-outer, 0}, {-inner, 0}, {0, leg},
          {inner, 0},          {outer, 0},  {0.5 * waist, top}};
}

// Names of the draws a category makes, in draw order: (range name, key).
std::vector<std::pair<std::string, std::string>> draw_plan(ClothCategory category) {
  std::vector<std::pair<std::string, std::string>> plan;
  auto one = [&](const std::string& n) { plan.emplace_back(n, n); };
  auto sides = [&](const std::string& n) {
    plan.emplace_back(n, n + "_left");
    plan.emplace_back(n, n + "_right");
  };
  auto each = [&](const std::string& n, size_t count) {
    for (size_t i = 0; i < count; ++i) plan.emplace_back(n, n + "_" + std::to_string(i));
  };
  const size_t corners = corner_names(category).size();
  switch (category) {
    case ClothCategory::kTowel:
      one("width");
      one("aspect");
      break;
    case ClothCategory::kTshirt:
      for (const char* n : {"waist_width", "torso_height", "shoulder_width", "shoulder_drop",
                            "neck_width", "neck_depth", "armpit_depth"})
        one(n);
      sides("sleeve_length");
      sides("sleeve_width");
      sides("sleeve_angle");
      break;
    case ClothCategory::kShorts:
      for (const char* n : {"waist_width", "crotch_depth", "leg_length", "leg_width", "inseam_angle"})
        one(n);
      break;
  }
  each("bulge", corners);
  each("corner_radius", corners);
  return plan;
}

}  // namespace

const Range& ParamRanges::at(const std::string& name) const {
  auto it = ranges.find(name);
  if (it == ranges.end()) throw_invalid("no range for parameter '" + name + "'");
  return it->second;
}

std::vector<std::string> ParamRanges::parameter_names(ClothCategory category) {
  std::vector<std::string> names;
  for (const auto& [range, key] : draw_plan(category))
    if (std::find(names.begin(), names.end(), range) == names.end()) names.push_back(range);
  return names;
}

void ParamRanges::validate() const {
  const auto names = parameter_names(category);
  for (const auto& [name, r] : ranges) {
    if (std::find(names.begin(), names.end(), name) == names.end())
      throw_invalid("unknown parameter '" + name + "' for " + std::string(to_string(category)));
    if (!std::isfinite(r.min) || !std::isfinite(r.max) || r.min > r.max)
      throw_invalid("invalid range for '" + name + "'");
    const bool may_be_zero = name == "bulge" || name == "corner_radius" || name == "sleeve_angle" ||
                             name == "shoulder_drop";
    if (may_be_zero ? r.min < 0 : r.min <= 0)
      throw_invalid("range for '" + name + "' must be " + (may_be_zero ? "non-negative" : "positive"));
  }
  for (const std::string& name : names)
    if (!ranges.count(name)) throw_invalid("missing range for '" + name + "'");
}

ParamRanges ParamRanges::defaults(ClothCategory category) {
  ParamRanges r;
  r.category = category;
  switch (category) {
    case ClothCategory::kTowel:
      r.ranges = {{"width", {0.3, 0.9}}, {"aspect", {1.0, 2.0}}};
      break;
    case ClothCategory::kTshirt:
      r.ranges = {{"waist_width", {0.4, 0.6}},   {"torso_height", {0.5, 0.8}},
                  {"shoulder_width", {0.4, 0.56}}, {"shoulder_drop", {0.02, 0.05}},
                  {"neck_width", {0.14, 0.22}},  {"neck_depth", {0.04, 0.1}},
                  {"armpit_depth", {0.16, 0.24}}, {"sleeve_length", {0.15, 0.3}},
                  {"sleeve_width", {0.12, 0.18}}, {"sleeve_angle", {0.0, 45 * kDeg}}};
      break;
    case ClothCategory::kShorts:
      r.ranges = {{"waist_width", {0.3, 0.5}},  {"crotch_depth", {0.2, 0.3}},
                  {"leg_length", {0.2, 0.45}},  {"leg_width", {0.16, 0.28}},
                  {"inseam_angle", {15 * kDeg, 30 * kDeg}}};
      break;
  }
  r.ranges["bulge"] = {0.0, 0.02};
  r.ranges["corner_radius"] = {0.0, 0.02};
  return r;
}

Vec2 ClothTemplate::anchor_position(const std::string& name) const {
  auto it = keypoint_anchors.find(name);
  if (it == keypoint_anchors.end()) throw_invalid("unknown keypoint '" + name + "'");
  return boundary[it->second];
}

double ClothTemplate::param(const std::string& name) const {
  for (const auto& [k, v] : params)
    if (k == name) return v;
  throw_invalid("unknown template parameter '" + name + "'");
}

std::optional<Outline> expand_outline(const std::vector<Vec2>& corners,
                                      const std::vector<double>& bulge,
                                      const std::vector<double>& radius, double resolution) {
  const size_t n = corners.size();
  if (bulge.size() != n || radius.size() != n) throw_invalid("outline parameter size mismatch");
  std::vector<std::vector<Vec2>> arcs(n);
  for (size_t i = 0; i < n; ++i) {
    const Vec2& prev = corners[(i + n - 1) % n];
    const Vec2& next = corners[(i + 1) % n];
    try {
      int samples = 1;
      if (radius[i] > 0) {
        const CornerArc arc = corner_arc(prev, corners[i], next, radius[i]);
        const double sweep = std::fabs(std::atan2(cross(arc.tangent_in - arc.center, arc.tangent_out - arc.center),
                                                  dot(arc.tangent_in - arc.center, arc.tangent_out - arc.center)));
        const int half = std::max(1, static_cast<int>(std::ceil(sweep * radius[i] / (2 * 0.6 * resolution))));
        samples = 2 * half + 1;
      }
      arcs[i] = round_corner(prev, corners[i], next, radius[i], samples);
    } catch (const Error&) {
      return std::nullopt;
    }
  }
  Outline out;
  for (size_t i = 0; i < n; ++i) {
    const std::vector<Vec2>& arc = arcs[i];
    out.corner_anchor.push_back(static_cast<int>(out.points.size() + arc.size() / 2));
    out.points.insert(out.points.end(), arc.begin(), arc.end());
    const Vec2 start = arc.back();
    const Vec2 end = arcs[(i + 1) % n].front();
    const Vec2 edge = end - start;
    const double len = norm(edge);
    // Adjacent roundings must leave a positive stretch of straight edge.
    const Vec2 skeleton_edge = corners[(i + 1) % n] - corners[i];
    if (!(len > 0) || dot(edge, skeleton_edge) <= 0) return std::nullopt;
    const Vec2 outward{edge.y / len, -edge.x / len};
    const Vec2 control = 0.5 * (start + end) + outward * bulge[i];
    const int samples = std::max(2, static_cast<int>(std::ceil(len / resolution)) + 1);
    const std::vector<Vec2> curve = sample_bezier(start, control, end, samples);
    out.points.insert(out.points.end(), curve.begin() + 1, curve.end() - 1);
  }
  return out;
}

std::optional<ClothTemplate> build_template(ClothCategory category, const TemplateParams& params) {
  const ParamLookup p(params);
  std::optional<std::vector<Vec2>> skeleton;
  switch (category) {
    case ClothCategory::kTowel: skeleton = towel_skeleton(p); break;
    case ClothCategory::kTshirt: skeleton = tshirt_skeleton(p); break;
    case ClothCategory::kShorts: skeleton = shorts_skeleton(p); break;
  }
  if (!skeleton || !is_simple_polygon(*skeleton) || signed_area(*skeleton) <= 0) return std::nullopt;

  const std::vector<std::string>& names = corner_names(category);
  const size_t n = names.size();
  std::vector<double> bulge(n), radius(n);
  for (size_t i = 0; i < n; ++i) {
    bulge[i] = p("bulge_" + std::to_string(i));
    radius[i] = p("corner_radius_" + std::to_string(i));
  }
  if (category == ClothCategory::kTshirt) {
    // The neck edge (neck_right -> neck_left) dips by neck_depth at its
    // midpoint; a quadratic bezier reaches half its control offset there.
    const size_t neck_edge = 6;
    bulge[neck_edge] = -2.0 * p("neck_depth");
  }
  std::optional<Outline> outline = expand_outline(*skeleton, bulge, radius);
  if (!outline || !is_simple_polygon(outline->points) || signed_area(outline->points) <= 0)
    return std::nullopt;

  ClothTemplate tmpl;
  tmpl.category = category;
  tmpl.params = params;
  tmpl.skeleton = std::move(*skeleton);
  tmpl.boundary = std::move(outline->points);
  for (size_t i = 0; i < n; ++i) tmpl.keypoint_anchors[names[i]] = outline->corner_anchor[i];
  return tmpl;
}

ClothTemplate sample_template(ClothCategory category, const ParamRanges& ranges, Rng& rng) {
  if (ranges.category != category) throw_invalid("parameter ranges are for another category");
  ranges.validate();
  const auto plan = draw_plan(category);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    TemplateParams params;
    params.reserve(plan.size());
    for (const auto& [range_name, key] : plan) {
      const Range& r = ranges.at(range_name);
      params.emplace_back(key, rng.uniform(r.min, r.max));
    }
    if (auto tmpl = build_template(category, params)) return std::move(*tmpl);
  }
  throw Error(ErrorCode::kGenerationFailure,
              "no valid " + std::string(to_string(category)) + " template in " +
                  std::to_string(kMaxAttempts) + " attempts; check the parameter ranges");
}

ClothMesh template_to_mesh(const ClothTemplate& tmpl, double max_edge) {
  ClothMesh mesh = triangulate(tmpl.boundary, max_edge);
  mesh.category = tmpl.category;
  for (const auto& [name, index] : tmpl.keypoint_anchors) mesh.keypoint_vertex_map[name] = index;
  return mesh;
}

}  // namespace clothforge

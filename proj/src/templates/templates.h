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
#include <utility>
#include <vector>

#include "common/rng.h"
#include "geometry/mesh.h"

namespace clothforge {

struct Range {
  double min = 0;
  double max = 0;
  friend bool operator==(const Range&, const Range&) = default;
};

// Uniform sampling ranges for one category's template parameters, keyed by
// parameter name. Lengths are in meters, angles in radians.
//
//   towel:  width, aspect (height = width * aspect), bulge, corner_radius
//   tshirt: waist_width, torso_height, shoulder_width, shoulder_drop,
//           neck_width, neck_depth, armpit_depth, sleeve_length,
//           sleeve_width, sleeve_angle, bulge, corner_radius
//   shorts: waist_width, crotch_depth, leg_length, leg_width,
//           inseam_angle, bulge, corner_radius
//
// Sleeve parameters are drawn independently per side; bulge per edge and
// corner_radius per corner.
struct ParamRanges {
  ClothCategory category = ClothCategory::kTowel;
  std::map<std::string, Range> ranges;

  const Range& at(const std::string& name) const;
  // Throws invalid-argument on a missing/unknown name or an invalid range.
  void validate() const;

  static ParamRanges defaults(ClothCategory category);
  static std::vector<std::string> parameter_names(ClothCategory category);
};

// Sampled parameter values in draw order (per-side values carry a _left /
// _right suffix, per-edge/per-corner ones an _<index> suffix).
using TemplateParams = std::vector<std::pair<std::string, double>>;

struct ClothTemplate {
  ClothCategory category = ClothCategory::kTowel;
  TemplateParams params;
  // Skeleton corners before curving and rounding.
  std::vector<Vec2> skeleton;
  // Final simple CCW outline (bezier edges and rounded corners applied).
  std::vector<Vec2> boundary;
  // Keypoint name -> index into boundary. For a rounded corner the anchor
  // is the arc midpoint.
  std::map<std::string, int> keypoint_anchors;

  Vec2 anchor_position(const std::string& name) const;
  double param(const std::string& name) const;
};

// Outline expansion shared by all categories. Corner i joins edge i-1 and
// edge i; edge i runs from corner i to corner i+1. Rounded corners are cut
// on the straight skeleton, then each edge becomes a quadratic bezier between
// the neighbouring tangent points whose control point is offset by bulge[i]
// along the outward edge normal. Returns nullopt when radii overlap.
struct Outline {
  std::vector<Vec2> points;
  std::vector<int> corner_anchor;  // per skeleton corner, index into points
};
std::optional<Outline> expand_outline(const std::vector<Vec2>& corners,
                                      const std::vector<double>& bulge,
                                      const std::vector<double>& radius,
                                      double resolution = 0.005);

// Draws templates until one is a simple polygon that passes the category's
// shape checks. Throws generation-failure after 100 consecutive rejects.
ClothTemplate sample_template(ClothCategory category, const ParamRanges& ranges, Rng& rng);

// Builds the template for fixed parameter values (used by sample_template).
// Returns nullopt when the values do not produce a valid outline.
std::optional<ClothTemplate> build_template(ClothCategory category, const TemplateParams& params);

ClothMesh template_to_mesh(const ClothTemplate& tmpl, double max_edge);

}  // namespace clothforge

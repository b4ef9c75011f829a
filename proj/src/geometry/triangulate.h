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

#include "geometry/mesh.h"

namespace clothforge {

double signed_area(const std::vector<Vec2>& polygon);

// True if no two non-adjacent edges of the closed polygon intersect and no
// adjacent edges overlap.
bool is_simple_polygon(const std::vector<Vec2>& polygon);

// Triangulates a simple counter-clockwise polygon into a planar (z = 0)
// mesh whose edges are all at most max_edge long. The polygon vertices keep
// their indices: boundary[i] becomes mesh vertex i. UVs are the planar
// coordinates scaled uniformly into [0,1]^2.
//
// Method: the boundary is subdivided, interior Steiner points are placed on
// a triangular lattice, everything is Delaunay-triangulated with boundary
// segments recovered by midpoint insertion until each is a mesh edge, the
// outside is discarded, and any remaining edge longer than max_edge is
// bisected longest-first.
ClothMesh triangulate(const std::vector<Vec2>& boundary, double max_edge);

}  // namespace clothforge

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

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "geometry/category.h"
#include "geometry/vec.h"

namespace clothforge {

using Triangle = std::array<int, 3>;

struct ClothMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::vector<Vec2> uvs;
  // Ordered by name so iteration (and export) is deterministic.
  std::map<std::string, int> keypoint_vertex_map;
  ClothCategory category = ClothCategory::kTowel;

  int keypoint_vertex(const std::string& name) const;
};

// Throws invalid-argument if any ClothMesh invariant is violated: index
// range, degenerate triangles, more than two triangles per edge, keypoint
// indices, or UV count.
void validate(const ClothMesh& mesh, double min_area = 0.0);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
double total_area(const ClothMesh& mesh);

struct Edge {
  int a, b;  // a < b
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Unique undirected edges, sorted.
std::vector<Edge> unique_edges(const std::vector<Triangle>& triangles);

// Number of triangles incident to every undirected edge.
std::map<Edge, int> edge_valence(const std::vector<Triangle>& triangles);

// Compressed vertex-vertex adjacency (sorted neighbor lists).
class VertexAdjacency {
 public:
  VertexAdjacency(size_t vertex_count, const std::vector<Triangle>& triangles);

  size_t vertex_count() const { return offsets_.size() - 1; }
  std::span<const int> neighbors(int v) const {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }

  // Vertices at graph distance 1..k (k in {1, 2}) from v, sorted, v excluded.
  std::vector<int> ring(int v, int k) const;

 private:
  std::vector<int> offsets_;
  std::vector<int> neighbors_;
};

std::vector<int> ring_neighbors(const ClothMesh& mesh, int vertex, int k);

// Directed boundary edges (a -> b following the owning triangle's winding).
std::vector<std::pair<int, int>> boundary_edges(const std::vector<Triangle>& triangles);

// Area-weighted vertex normals; vertices without incident area get +z.
std::vector<Vec3> vertex_normals(const std::vector<Vec3>& vertices,
                                 const std::vector<Triangle>& triangles);

Vec3 centroid(const std::vector<Vec3>& points);

}  // namespace clothforge

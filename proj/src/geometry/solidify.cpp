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

#include "geometry/solidify.h"

#include "common/error.h"

namespace clothforge {

ClothMesh solidify(const ClothMesh& mesh, double thickness) {
  if (!(thickness > 0)) throw_invalid("solidify thickness must be positive");
  for (const auto& [edge, count] : edge_valence(mesh.triangles))
    if (count > 2) throw_invalid("solidify requires a manifold mesh");

  const int n = static_cast<int>(mesh.vertices.size());
  const std::vector<Vec3> normals = vertex_normals(mesh.vertices, mesh.triangles);
  const double half = 0.5 * thickness;

  ClothMesh out;
  out.category = mesh.category;
  out.keypoint_vertex_map = mesh.keypoint_vertex_map;
  out.vertices.reserve(2 * n);
  for (int i = 0; i < n; ++i) out.vertices.push_back(mesh.vertices[i] + normals[i] * half);
  for (int i = 0; i < n; ++i) out.vertices.push_back(mesh.vertices[i] - normals[i] * half);
  if (!mesh.uvs.empty()) {
    out.uvs = mesh.uvs;
    out.uvs.insert(out.uvs.end(), mesh.uvs.begin(), mesh.uvs.end());
  }

  const auto rim = boundary_edges(mesh.triangles);
  out.triangles.reserve(2 * mesh.triangles.size() + 2 * rim.size());
  for (const Triangle& t : mesh.triangles) out.triangles.push_back(t);
  for (const Triangle& t : mesh.triangles) out.triangles.push_back({t[0] + n, t[2] + n, t[1] + n});
  for (const auto& [a, b] : rim) {
    out.triangles.push_back({a, a + n, b + n});
    out.triangles.push_back({a, b + n, b});
  }
  return out;
}

double signed_volume(const ClothMesh& mesh) {
  double volume = 0;
  for (const Triangle& t : mesh.triangles)
    volume += dot(mesh.vertices[t[0]], cross(mesh.vertices[t[1]], mesh.vertices[t[2]]));
  return volume / 6.0;
}

}  // namespace clothforge

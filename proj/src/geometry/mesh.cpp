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

#include "geometry/mesh.h"

#include <algorithm>
#include <cmath>

#include "common/error.h"

namespace clothforge {

int ClothMesh::keypoint_vertex(const std::string& name) const {
  auto it = keypoint_vertex_map.find(name);
  if (it == keypoint_vertex_map.end()) throw_invalid("unknown keypoint '" + name + "'");
  return it->second;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * norm(cross(b - a, c - a));
}

double total_area(const ClothMesh& mesh) {
  double area = 0;
  for (const Triangle& t : mesh.triangles)
    area += triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
  return area;
}

std::vector<Edge> unique_edges(const std::vector<Triangle>& triangles) {
  std::vector<Edge> edges;
  edges.reserve(triangles.size() * 3);
  for (const Triangle& t : triangles) {
    for (int i = 0; i < 3; ++i) {
      int a = t[i], b = t[(i + 1) % 3];
      edges.push_back({std::min(a, b), std::max(a, b)});
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::map<Edge, int> edge_valence(const std::vector<Triangle>& triangles) {
  std::map<Edge, int> valence;
  for (const Triangle& t : triangles) {
    for (int i = 0; i < 3; ++i) {
      int a = t[i], b = t[(i + 1) % 3];
      ++valence[{std::min(a, b), std::max(a, b)}];
    }
  }
  return valence;
}

void validate(const ClothMesh& mesh, double min_area) {
  const int n = static_cast<int>(mesh.vertices.size());
  for (const Vec3& v : mesh.vertices)
    if (!is_finite(v)) throw_invalid("mesh has non-finite vertex");
  if (!mesh.uvs.empty() && mesh.uvs.size() != mesh.vertices.size())
    throw_invalid("uv count does not match vertex count");
  for (const Triangle& t : mesh.triangles) {
    for (int i : t)
      if (i < 0 || i >= n) throw_invalid("triangle index out of range");
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw_invalid("triangle with repeated vertex");
    if (triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]) <= min_area)
      throw_invalid("degenerate triangle");
  }
  for (const auto& [edge, count] : edge_valence(mesh.triangles))
    if (count > 2) throw_invalid("non-manifold edge");
  for (const auto& [name, index] : mesh.keypoint_vertex_map)
    if (index < 0 || index >= n) throw_invalid("keypoint '" + name + "' has invalid vertex");
}

VertexAdjacency::VertexAdjacency(size_t vertex_count, const std::vector<Triangle>& triangles) {
  std::vector<Edge> edges = unique_edges(triangles);
  offsets_.assign(vertex_count + 1, 0);
  for (const Edge& e : edges) {
    ++offsets_[e.a + 1];
    ++offsets_[e.b + 1];
  }
  for (size_t i = 0; i < vertex_count; ++i) offsets_[i + 1] += offsets_[i];
  neighbors_.resize(offsets_.back());
  std::vector<int> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& e : edges) {
    neighbors_[cursor[e.a]++] = e.b;
    neighbors_[cursor[e.b]++] = e.a;
  }
  for (size_t i = 0; i < vertex_count; ++i)
    std::sort(neighbors_.begin() + offsets_[i], neighbors_.begin() + offsets_[i + 1]);
}

std::vector<int> VertexAdjacency::ring(int v, int k) const {
  if (v < 0 || static_cast<size_t>(v) >= vertex_count()) throw_invalid("vertex index out of range");
  if (k != 1 && k != 2) throw_invalid("ring order must be 1 or 2");
  std::vector<int> out(neighbors(v).begin(), neighbors(v).end());
  if (k == 2) {
    for (int n : neighbors(v))
      for (int m : neighbors(n))
        if (m != v) out.push_back(m);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  return out;
}

std::vector<int> ring_neighbors(const ClothMesh& mesh, int vertex, int k) {
  return VertexAdjacency(mesh.vertices.size(), mesh.triangles).ring(vertex, k);
}

std::vector<std::pair<int, int>> boundary_edges(const std::vector<Triangle>& triangles) {
  std::map<Edge, int> valence = edge_valence(triangles);
  std::vector<std::pair<int, int>> out;
  for (const Triangle& t : triangles) {
    for (int i = 0; i < 3; ++i) {
      int a = t[i], b = t[(i + 1) % 3];
      if (valence[{std::min(a, b), std::max(a, b)}] == 1) out.emplace_back(a, b);
    }
  }
  return out;
}

std::vector<Vec3> vertex_normals(const std::vector<Vec3>& vertices,
                                 const std::vector<Triangle>& triangles) {
  std::vector<Vec3> normals(vertices.size());
  for (const Triangle& t : triangles) {
    // Unnormalized cross product is twice the area times the face normal.
    Vec3 n = cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]);
    for (int i : t) normals[i] += n;
  }
  for (Vec3& n : normals) {
    double len = norm(n);
    n = len > 0 ? n / len : Vec3{0, 0, 1};
  }
  return normals;
}

Vec3 centroid(const std::vector<Vec3>& points) {
  Vec3 c;
  for (const Vec3& p : points) c += p;
  return points.empty() ? c : c / static_cast<double>(points.size());
}

}  // namespace clothforge

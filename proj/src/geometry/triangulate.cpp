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

#include "geometry/triangulate.h"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "common/error.h"

namespace clothforge {

double signed_area(const std::vector<Vec2>& polygon) {
  double area = 0;
  for (size_t i = 0, n = polygon.size(); i < n; ++i)
    area += cross(polygon[i], polygon[(i + 1) % n]);
  return 0.5 * area;
}

namespace {

double orient(const Vec2& a, const Vec2& b, const Vec2& c) { return cross(b - a, c - a); }

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0)))
    return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
}

// Incremental Delaunay triangulation with Lawson flips. Vertices 0..2 form
// an enclosing super triangle.
class Delaunay {
 public:
  struct Tri {
    int v[3];
    int n[3];  // n[i] is the neighbor across the edge opposite v[i]
  };

  explicit Delaunay(const Vec2& lo, const Vec2& hi) {
    const Vec2 c = 0.5 * (lo + hi);
    const double r = std::max(hi.x - lo.x, hi.y - lo.y) * 20 + 1.0;
    pts_.push_back({c.x - 2 * r, c.y - r});
    pts_.push_back({c.x + 2 * r, c.y - r});
    pts_.push_back({c.x, c.y + 2 * r});
    tris_.push_back({{0, 1, 2}, {-1, -1, -1}});
  }

  const std::vector<Vec2>& points() const { return pts_; }
  const std::vector<Tri>& tris() const { return tris_; }

  int insert(const Vec2& p) {
    int t = locate(p);
    const int idx = static_cast<int>(pts_.size());
    pts_.push_back(p);
    Tri& tri = tris_[t];
    for (int k = 0; k < 3; ++k) {
      if (pts_[tri.v[k]] == p) {
        pts_.pop_back();
        return tri.v[k];
      }
    }
    for (int e = 0; e < 3; ++e) {
      const Vec2& b = pts_[tri.v[(e + 1) % 3]];
      const Vec2& c = pts_[tri.v[(e + 2) % 3]];
      const double len2 = dot(c - b, c - b);
      if (std::fabs(orient(b, c, p)) <= 1e-11 * len2) {
        split_edge(t, e, idx);
        return idx;
      }
    }
    split_triangle(t, idx);
    return idx;
  }

 private:
  int locate(const Vec2& p) {
    int t = last_;
    int rot = 0;
    for (size_t guard = 0; guard < tris_.size() * 4 + 16; ++guard) {
      const Tri& tri = tris_[t];
      bool moved = false;
      for (int k = 0; k < 3; ++k) {
        const int e = (k + rot) % 3;
        const Vec2& b = pts_[tri.v[(e + 1) % 3]];
        const Vec2& c = pts_[tri.v[(e + 2) % 3]];
        if (orient(b, c, p) < 0 && tri.n[e] >= 0) {
          t = tri.n[e];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
      rot = (rot + 1) % 3;
    }
    throw std::logic_error("triangulation point location did not terminate");
  }

  void relink(int tri, int from, int to) {
    if (tri < 0) return;
    for (int& n : tris_[tri].n)
      if (n == from) {
        n = to;
        return;
      }
  }

  void split_triangle(int t, int p) {
    const Tri old = tris_[t];
    const int a = old.v[0], b = old.v[1], c = old.v[2];
    const int t1 = static_cast<int>(tris_.size()), t2 = t1 + 1;
    tris_[t] = {{p, b, c}, {old.n[0], t1, t2}};
    tris_.push_back({{a, p, c}, {t, old.n[1], t2}});
    tris_.push_back({{a, b, p}, {t, t1, old.n[2]}});
    relink(old.n[1], t, t1);
    relink(old.n[2], t, t2);
    last_ = t;
    legalize(t, 0);
    legalize(t1, 1);
    legalize(t2, 2);
  }

  void split_edge(int t, int e, int p) {
    const Tri old_t = tris_[t];
    const int a = old_t.v[e], b = old_t.v[(e + 1) % 3], c = old_t.v[(e + 2) % 3];
    const int n_ab = old_t.n[(e + 2) % 3], n_ca = old_t.n[(e + 1) % 3];
    const int u = old_t.n[e];
    const int t2 = static_cast<int>(tris_.size());
    if (u < 0) {
      tris_[t] = {{a, b, p}, {-1, t2, n_ab}};
      tris_.push_back({{a, p, c}, {-1, n_ca, t}});
      relink(n_ca, t, t2);
      last_ = t;
      legalize(t, 2);
      legalize(t2, 1);
      return;
    }
    const Tri old_u = tris_[u];
    int j = 0;
    while (old_u.n[j] != t) ++j;
    const int d = old_u.v[j];
    const int n_dc = old_u.n[(j + 2) % 3], n_bd = old_u.n[(j + 1) % 3];
    const int u2 = t2 + 1;
    tris_[t] = {{a, b, p}, {u2, t2, n_ab}};
    tris_.push_back({{a, p, c}, {u, n_ca, t}});
    tris_[u] = {{d, c, p}, {t2, u2, n_dc}};
    tris_.push_back({{d, p, b}, {t, n_bd, u}});
    relink(n_ca, t, t2);
    relink(n_bd, u, u2);
    last_ = t;
    legalize(t, 2);
    legalize(t2, 1);
    legalize(u, 2);
    legalize(u2, 1);
  }

  // Positive when d lies inside the circumcircle of CCW triangle (a, b, c).
  static long double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const long double adx = a.x - d.x, ady = a.y - d.y;
    const long double bdx = b.x - d.x, bdy = b.y - d.y;
    const long double cdx = c.x - d.x, cdy = c.y - d.y;
    const long double alift = adx * adx + ady * ady;
    const long double blift = bdx * bdx + bdy * bdy;
    const long double clift = cdx * cdx + cdy * cdy;
    return alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
           clift * (adx * bdy - bdx * ady);
  }

  // Restores the Delaunay property across the edge opposite vertex i of t,
  // where v[i] is the newly inserted point.
  void legalize(int t, int i) {
    struct Item { int t, i; };
    std::vector<Item> stack{{t, i}};
    while (!stack.empty()) {
      auto [tt, ii] = stack.back();
      stack.pop_back();
      const Tri tri = tris_[tt];
      const int u = tri.n[ii];
      if (u < 0) continue;
      const Tri ut = tris_[u];
      int j = 0;
      while (j < 3 && ut.n[j] != tt) ++j;
      if (j == 3) continue;
      const int p = tri.v[ii], q = tri.v[(ii + 1) % 3], r = tri.v[(ii + 2) % 3];
      const int d = ut.v[j];
      if (incircle(pts_[p], pts_[q], pts_[r], pts_[d]) <= 0) continue;
      // Only flip strictly convex quads; guards against rounding.
      if (orient(pts_[p], pts_[q], pts_[d]) <= 0 || orient(pts_[p], pts_[d], pts_[r]) <= 0)
        continue;
      const int A = tri.n[(ii + 2) % 3], B = tri.n[(ii + 1) % 3];
      const int C = ut.n[(j + 1) % 3], D = ut.n[(j + 2) % 3];
      tris_[tt] = {{p, q, d}, {C, u, A}};
      tris_[u] = {{p, d, r}, {D, B, tt}};
      relink(C, u, tt);
      relink(B, tt, u);
      stack.push_back({tt, 0});
      stack.push_back({u, 0});
    }
  }

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  int last_ = 0;
};

// Uniform grid over boundary segments for nearest-distance queries.
class SegmentGrid {
 public:
  SegmentGrid(const std::vector<Vec2>& poly, double cell) : poly_(poly), cell_(cell) {
    lo_ = hi_ = poly[0];
    for (const Vec2& p : poly) {
      lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y)};
      hi_ = {std::max(hi_.x, p.x), std::max(hi_.y, p.y)};
    }
    nx_ = static_cast<int>((hi_.x - lo_.x) / cell_) + 1;
    ny_ = static_cast<int>((hi_.y - lo_.y) / cell_) + 1;
    cells_.resize(static_cast<size_t>(nx_) * ny_);
    for (size_t i = 0; i < poly.size(); ++i) {
      const Vec2& a = poly[i];
      const Vec2& b = poly[(i + 1) % poly.size()];
      const int x0 = cx(std::min(a.x, b.x)), x1 = cx(std::max(a.x, b.x));
      const int y0 = cy(std::min(a.y, b.y)), y1 = cy(std::max(a.y, b.y));
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) cells_[static_cast<size_t>(y) * nx_ + x].push_back(i);
    }
  }

  // Distance to the nearest segment, or +inf when none lies in the 3x3 cells.
  double near_distance(const Vec2& p) const {
    double best = INFINITY;
    const int x = cx(p.x), y = cy(p.y);
    for (int yy = y - 1; yy <= y + 1; ++yy) {
      if (yy < 0 || yy >= ny_) continue;
      for (int xx = x - 1; xx <= x + 1; ++xx) {
        if (xx < 0 || xx >= nx_) continue;
        for (size_t i : cells_[static_cast<size_t>(yy) * nx_ + xx]) {
          const Vec2& a = poly_[i];
          const Vec2& b = poly_[(i + 1) % poly_.size()];
          const Vec2 ab = b - a;
          double t = dot(p - a, ab) / dot(ab, ab);
          t = std::clamp(t, 0.0, 1.0);
          best = std::min(best, norm(p - (a + ab * t)));
        }
      }
    }
    return best;
  }

 private:
  int cx(double x) const { return std::clamp(static_cast<int>((x - lo_.x) / cell_), 0, nx_ - 1); }
  int cy(double y) const { return std::clamp(static_cast<int>((y - lo_.y) / cell_), 0, ny_ - 1); }

  const std::vector<Vec2>& poly_;
  double cell_;
  Vec2 lo_, hi_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<size_t>> cells_;
};

// Splits every edge longer than max_edge, longest first. Splitting the
// globally longest edge never creates an edge longer than it, so this
// terminates.
void bisect_long_edges(std::vector<Vec2>& pts, std::vector<Triangle>& tris, double max_edge) {
  std::unordered_map<uint64_t, std::vector<int>> edge_tris;
  edge_tris.reserve(tris.size() * 2);
  for (size_t t = 0; t < tris.size(); ++t)
    for (int i = 0; i < 3; ++i)
      edge_tris[edge_key(tris[t][i], tris[t][(i + 1) % 3])].push_back(static_cast<int>(t));

  struct Item {
    double len;
    int a, b;
    bool operator<(const Item& o) const {
      if (len != o.len) return len < o.len;
      if (a != o.a) return a > o.a;
      return b > o.b;
    }
  };
  std::priority_queue<Item> queue;
  auto push_if_long = [&](int a, int b) {
    const double len = norm(pts[a] - pts[b]);
    if (len > max_edge) queue.push({len, std::min(a, b), std::max(a, b)});
  };
  for (const auto& [key, owners] : edge_tris)
    push_if_long(static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffu));

  while (!queue.empty()) {
    const Item item = queue.top();
    queue.pop();
    auto it = edge_tris.find(edge_key(item.a, item.b));
    if (it == edge_tris.end()) continue;
    const std::vector<int> owners = it->second;
    edge_tris.erase(it);
    const int m = static_cast<int>(pts.size());
    pts.push_back(0.5 * (pts[item.a] + pts[item.b]));
    for (int t : owners) {
      Triangle tri = tris[t];
      int k = 0;
      while (!((tri[k] == item.a && tri[(k + 1) % 3] == item.b) ||
               (tri[k] == item.b && tri[(k + 1) % 3] == item.a)))
        ++k;
      const int a = tri[k], b = tri[(k + 1) % 3], c = tri[(k + 2) % 3];
      const int t_new = static_cast<int>(tris.size());
      tris[t] = {a, m, c};
      tris.push_back({m, b, c});
      auto& bc = edge_tris[edge_key(b, c)];
      std::replace(bc.begin(), bc.end(), t, t_new);
      edge_tris[edge_key(a, m)].push_back(t);
      edge_tris[edge_key(m, b)].push_back(t_new);
      auto& mc = edge_tris[edge_key(m, c)];
      mc.push_back(t);
      mc.push_back(t_new);
      push_if_long(a, m);
      push_if_long(m, b);
      push_if_long(m, c);
    }
  }
}

}  // namespace

bool is_simple_polygon(const std::vector<Vec2>& polygon) {
  const size_t n = polygon.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i)
    if (polygon[i] == polygon[(i + 1) % n]) return false;
  // Bounding-box prefilter sorted by min x keeps this near-linear in practice.
  struct Seg { double x0, x1, y0, y1; size_t i; };
  std::vector<Seg> segs(n);
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % n];
    segs[i] = {std::min(a.x, b.x), std::max(a.x, b.x), std::min(a.y, b.y), std::max(a.y, b.y), i};
  }
  std::sort(segs.begin(), segs.end(), [](const Seg& l, const Seg& r) { return l.x0 < r.x0; });
  for (size_t s = 0; s < n; ++s) {
    for (size_t r = s + 1; r < n && segs[r].x0 <= segs[s].x1; ++r) {
      if (segs[r].y0 > segs[s].y1 || segs[r].y1 < segs[s].y0) continue;
      const size_t i = segs[s].i, j = segs[r].i;
      const Vec2& a = polygon[i];
      const Vec2& b = polygon[(i + 1) % n];
      const Vec2& c = polygon[j];
      const Vec2& d = polygon[(j + 1) % n];
      const bool adjacent = (j == (i + 1) % n) || (i == (j + 1) % n);
      if (adjacent) {
        // Adjacent edges share one vertex; they must not fold back onto each other.
        const Vec2 shared = (j == (i + 1) % n) ? b : a;
        const Vec2 other_i = (j == (i + 1) % n) ? a : b;
        const Vec2 other_j = (j == (i + 1) % n) ? d : c;
        if (orient(shared, other_i, other_j) == 0 && dot(other_i - shared, other_j - shared) > 0)
          return false;
        continue;
      }
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

ClothMesh triangulate(const std::vector<Vec2>& boundary, double max_edge) {
  if (!(max_edge > 0)) throw_invalid("max_edge must be positive");
  if (boundary.size() < 3) throw_invalid("boundary needs at least 3 vertices");
  if (!is_simple_polygon(boundary)) throw_invalid("boundary is not a simple polygon");
  if (signed_area(boundary) <= 0) throw_invalid("boundary must be counter-clockwise");

  const size_t n_input = boundary.size();
  const double spacing = 0.95 * max_edge;

  // Boundary: input vertices first (stable indices), then subdivisions.
  std::vector<Vec2> pts(boundary.begin(), boundary.end());
  std::vector<std::vector<int>> segment_points(n_input);
  for (size_t i = 0; i < n_input; ++i) {
    const Vec2& a = boundary[i];
    const Vec2& b = boundary[(i + 1) % n_input];
    const int parts = std::max(1, static_cast<int>(std::ceil(norm(b - a) / spacing)));
    segment_points[i].push_back(static_cast<int>(i));
    for (int k = 1; k < parts; ++k) {
      segment_points[i].push_back(static_cast<int>(pts.size()));
      pts.push_back(a + (b - a) * (static_cast<double>(k) / parts));
    }
  }
  std::vector<int> ring;  // boundary loop in order
  for (size_t i = 0; i < n_input; ++i)
    ring.insert(ring.end(), segment_points[i].begin(), segment_points[i].end());
  const size_t n_boundary = pts.size();

  // Interior lattice points, kept away from the boundary.
  Vec2 lo = boundary[0], hi = boundary[0];
  for (const Vec2& p : boundary) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  const SegmentGrid grid(boundary, spacing);
  const double margin = 0.6 * spacing;
  const double row_step = spacing * std::sqrt(3.0) / 2.0;
  const int rows = static_cast<int>((hi.y - lo.y) / row_step) + 1;
  for (int r = 0; r <= rows; ++r) {
    const double y = lo.y + (r + 0.5) * row_step;
    std::vector<double> xs;
    for (size_t i = 0; i < n_input; ++i) {
      const Vec2& a = boundary[i];
      const Vec2& b = boundary[(i + 1) % n_input];
      if ((a.y <= y && b.y > y) || (b.y <= y && a.y > y))
        xs.push_back(a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x));
    }
    std::sort(xs.begin(), xs.end());
    const double offset = (r % 2) * 0.5 * spacing;
    for (size_t k = 0; k + 1 < xs.size(); k += 2) {
      const double start = lo.x + offset + std::ceil((xs[k] - lo.x - offset) / spacing) * spacing;
      for (double x = start; x < xs[k + 1]; x += spacing) {
        const Vec2 p{x, y};
        if (grid.near_distance(p) >= margin) pts.push_back(p);
      }
    }
  }

  Delaunay dt(lo, hi);
  std::vector<int> dt_index(pts.size());
  for (int i : ring) dt_index[i] = dt.insert(pts[i]);
  for (size_t i = n_boundary; i < pts.size(); ++i) dt_index[i] = dt.insert(pts[i]);

  // Recover boundary segments by midpoint insertion.
  std::vector<int> loop;  // Delaunay vertex ids around the boundary
  loop.reserve(ring.size());
  for (int i : ring) loop.push_back(dt_index[i]);
  for (int round = 0;; ++round) {
    std::unordered_set<uint64_t> edges;
    edges.reserve(dt.tris().size() * 2);
    for (const auto& t : dt.tris())
      for (int i = 0; i < 3; ++i) edges.insert(edge_key(t.v[i], t.v[(i + 1) % 3]));
    std::vector<int> next_loop;
    next_loop.reserve(loop.size());
    bool missing = false;
    for (size_t i = 0; i < loop.size(); ++i) {
      const int a = loop[i], b = loop[(i + 1) % loop.size()];
      next_loop.push_back(a);
      if (!edges.count(edge_key(a, b))) {
        missing = true;
        next_loop.push_back(dt.insert(0.5 * (dt.points()[a] + dt.points()[b])));
      }
    }
    loop.swap(next_loop);
    if (!missing) break;
    if (round > 40) throw Error(ErrorCode::kGenerationFailure, "boundary recovery did not converge");
  }

  // Flood the outside from super-triangle-incident triangles without
  // crossing boundary segments.
  std::unordered_set<uint64_t> constrained;
  for (size_t i = 0; i < loop.size(); ++i)
    constrained.insert(edge_key(loop[i], loop[(i + 1) % loop.size()]));
  const auto& tris = dt.tris();
  std::vector<char> outside(tris.size(), 0);
  std::vector<int> stack;
  for (size_t t = 0; t < tris.size(); ++t) {
    if (tris[t].v[0] < 3 || tris[t].v[1] < 3 || tris[t].v[2] < 3) {
      outside[t] = 1;
      stack.push_back(static_cast<int>(t));
    }
  }
  while (!stack.empty()) {
    const int t = stack.back();
    stack.pop_back();
    for (int e = 0; e < 3; ++e) {
      const int u = tris[t].n[e];
      if (u < 0 || outside[u]) continue;
      if (constrained.count(edge_key(tris[t].v[(e + 1) % 3], tris[t].v[(e + 2) % 3]))) continue;
      outside[u] = 1;
      stack.push_back(u);
    }
  }

  // Compact: our point order for input/boundary/lattice, then recovery midpoints.
  const auto& dpts = dt.points();
  std::vector<int> remap(dpts.size(), -1);
  std::vector<Vec2> out_pts;
  out_pts.reserve(dpts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    if (remap[dt_index[i]] >= 0) continue;
    remap[dt_index[i]] = static_cast<int>(out_pts.size());
    out_pts.push_back(pts[i]);
  }
  for (size_t i = 3; i < dpts.size(); ++i) {
    if (remap[i] >= 0) continue;
    remap[i] = static_cast<int>(out_pts.size());
    out_pts.push_back(dpts[i]);
  }
  std::vector<Triangle> out_tris;
  for (size_t t = 0; t < tris.size(); ++t) {
    if (outside[t]) continue;
    out_tris.push_back({remap[tris[t].v[0]], remap[tris[t].v[1]], remap[tris[t].v[2]]});
  }

  bisect_long_edges(out_pts, out_tris, max_edge);

  // Drop vertices not referenced by any triangle (lattice points are always
  // inside, so this only matters for pathological inputs).
  std::vector<int> used(out_pts.size(), 0);
  for (const Triangle& t : out_tris)
    for (int v : t) used[v] = 1;
  for (size_t i = 0; i < n_input; ++i)
    if (!used[i]) throw Error(ErrorCode::kGenerationFailure, "boundary vertex lost in triangulation");
  std::vector<int> compact(out_pts.size(), -1);
  ClothMesh mesh;
  for (size_t i = 0; i < out_pts.size(); ++i) {
    if (!used[i]) continue;
    compact[i] = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back({out_pts[i].x, out_pts[i].y, 0.0});
  }
  mesh.triangles.reserve(out_tris.size());
  for (const Triangle& t : out_tris) mesh.triangles.push_back({compact[t[0]], compact[t[1]], compact[t[2]]});

  const double scale = std::max(hi.x - lo.x, hi.y - lo.y);
  mesh.uvs.reserve(mesh.vertices.size());
  for (const Vec3& v : mesh.vertices) mesh.uvs.push_back({(v.x - lo.x) / scale, (v.y - lo.y) / scale});
  return mesh;
}

}  // namespace clothforge

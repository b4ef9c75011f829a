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

#include "sim/simulator.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "common/error.h"

namespace clothforge {
namespace {

bool in_unit_interval(double k) { return k > 0 && k <= 1; }

void check_range(const Range& r, const char* name, double lo = 0) {
  if (!std::isfinite(r.min) || !std::isfinite(r.max) || r.min > r.max || r.min < lo)
    throw_invalid(std::string("invalid range for ") + name);
}

double sample(Rng& rng, const Range& r) { return rng.uniform(r.min, r.max); }

// Spatial hash over predicted positions; cells sorted by key so iteration
// order only depends on the positions.
class ParticleGrid {
 public:
  void build(const std::vector<Vec3>& p, double cell) {
    cell_ = cell;
    const size_t n = p.size();
    size_t table = 1;
    while (table < 2 * n) table <<= 1;
    mask_ = table - 1;
    start_.assign(table + 1, 0);
    keys_.resize(n);
    cells_.resize(n);
    for (size_t i = 0; i < n; ++i) {
      cells_[i] = cell_of(p[i]);
      keys_[i] = slot(cells_[i]);
      ++start_[keys_[i] + 1];
    }
    for (size_t s = 0; s < table; ++s) start_[s + 1] += start_[s];
    order_.resize(n);
    std::vector<uint32_t> fill(start_.begin(), start_.end() - 1);
    for (size_t i = 0; i < n; ++i) order_[fill[keys_[i]]++] = static_cast<int>(i);
  }

  template <typename Fn>
  void for_each_near(const Vec3& q, Fn&& fn) const {
    const auto c = cell_of(q);
    // Distinct cells may share a slot; keep only particles of the probed cell.
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          const Cell probe{c[0] + dx, c[1] + dy, c[2] + dz};
          const size_t s = slot(probe);
          for (uint32_t k = start_[s]; k < start_[s + 1]; ++k) {
            const int j = order_[k];
            if (cells_[j] == probe) fn(j);
          }
        }
  }

 private:
  using Cell = std::array<int64_t, 3>;
  Cell cell_of(const Vec3& p) const {
    return {static_cast<int64_t>(std::floor(p.x / cell_)), static_cast<int64_t>(std::floor(p.y / cell_)),
            static_cast<int64_t>(std::floor(p.z / cell_))};
  }
  size_t slot(const Cell& c) const {
    const uint64_t h = static_cast<uint64_t>(c[0]) * 73856093ULL ^ static_cast<uint64_t>(c[1]) * 19349663ULL ^
                       static_cast<uint64_t>(c[2]) * 83492791ULL;
    return static_cast<size_t>(splitmix64(h) & mask_);
  }

  double cell_ = 1;
  size_t mask_ = 0;
  std::vector<uint32_t> start_;
  std::vector<size_t> keys_;
  std::vector<Cell> cells_;
  std::vector<int> order_;
};

void self_collide(SimState& s, std::vector<Vec3>& pred, double distance) {
  ParticleGrid grid;
  grid.build(pred, distance);
  const double d2 = distance * distance;
  const int n = static_cast<int>(pred.size());
  for (int i = 0; i < n; ++i) {
    const double wi = s.inverse_masses[i];
    grid.for_each_near(pred[i], [&](int j) {
      if (j <= i) return;
      const Vec3 delta = pred[j] - pred[i];
      const double len2 = dot(delta, delta);
      if (len2 >= d2 || len2 == 0) return;
      const Vec3 rest = s.rest_positions[j] - s.rest_positions[i];
      if (dot(rest, rest) < d2) return;
      const double wj = s.inverse_masses[j];
      const double w = wi + wj;
      if (w == 0) return;
      const double len = std::sqrt(len2);
      const Vec3 corr = delta * ((distance - len) / (len * w));
      pred[i] -= corr * wi;
      pred[j] += corr * wj;
    });
  }
}

Vec3 centroid_of(const std::vector<Vec3>& p) { return centroid(p); }

}  // namespace

void SimParams::validate() const {
  if (!(dt > 0) || !std::isfinite(dt)) throw_invalid("dt must be positive");
  if (substeps < 1) throw_invalid("substeps must be >= 1");
  if (solver_iterations < 1) throw_invalid("solver_iterations must be >= 1");
  if (!in_unit_interval(stretch_stiffness)) throw_invalid("stretch_stiffness must be in (0,1]");
  if (!in_unit_interval(bend_stiffness)) throw_invalid("bend_stiffness must be in (0,1]");
  if (!(friction_coeff >= 0)) throw_invalid("friction_coeff must be >= 0");
  if (!(drag_coeff >= 0) || drag_coeff * dt / substeps >= 1) throw_invalid("drag_coeff out of range");
  if (!std::isfinite(plane_height)) throw_invalid("plane_height must be finite");
  if (!(contact_offset >= 0)) throw_invalid("contact_offset must be >= 0");
  if (!(self_collision_distance >= 0)) throw_invalid("self_collision_distance must be >= 0");
  if (!(areal_density > 0)) throw_invalid("areal_density must be positive");
  if (!(grasp_speed > 0)) throw_invalid("grasp_speed must be positive");
  if (!is_finite(gravity)) throw_invalid("gravity must be finite");
}

void DeformConfig::validate() const {
  check_range(drop_height, "drop_height");
  check_range(fold_radius, "fold_radius");
  check_range(fold_angle, "fold_angle");
  if (fold_angle.max > std::numbers::pi) throw_invalid("fold_angle must not exceed pi");
  if (fold_radius.min <= 0) throw_invalid("fold_radius must be positive");
  check_range(ranges.stretch_stiffness, "stretch_stiffness");
  check_range(ranges.bend_stiffness, "bend_stiffness");
  check_range(ranges.friction_coeff, "friction_coeff");
  check_range(ranges.drag_coeff, "drag_coeff");
  for (double p : {fold_probability, flip_probability, grasp_boundary_probability})
    if (!(p >= 0 && p <= 1)) throw_invalid("probabilities must be in [0,1]");
  if (!(max_tilt >= 0 && max_tilt <= std::numbers::pi / 2)) throw_invalid("max_tilt must be in [0, pi/2]");
  if (!(settle.max_kinetic_energy >= 0) || settle.max_steps < 1) throw_invalid("invalid settle criterion");
  SimParams probe = base;
  probe.stretch_stiffness = ranges.stretch_stiffness.min;
  probe.bend_stiffness = ranges.bend_stiffness.min;
  probe.friction_coeff = ranges.friction_coeff.min;
  probe.drag_coeff = ranges.drag_coeff.max;
  probe.validate();
  if (ranges.stretch_stiffness.max > 1 || ranges.bend_stiffness.max > 1)
    throw_invalid("stiffness ranges must lie in (0,1]");
}

std::vector<Constraint> build_constraints(const ClothMesh& mesh, double stretch_stiffness,
                                          double bend_stiffness) {
  const VertexAdjacency adj(mesh.vertices.size(), mesh.triangles);
  std::vector<Constraint> stretch, bend;
  const int n = static_cast<int>(mesh.vertices.size());
  std::vector<int> mark(n, -1);
  for (int v = 0; v < n; ++v) {
    for (int u : adj.neighbors(v)) mark[u] = v;
    mark[v] = v;
    for (int u : adj.neighbors(v))
      if (u > v)
        stretch.push_back({Constraint::Kind::kStretch, v, u, norm(mesh.vertices[u] - mesh.vertices[v]),
                           stretch_stiffness});
    std::vector<int> second;
    for (int u : adj.neighbors(v))
      for (int w : adj.neighbors(u))
        if (mark[w] != v && w > v) {
          mark[w] = v;
          second.push_back(w);
        }
    std::sort(second.begin(), second.end());
    for (int w : second)
      bend.push_back({Constraint::Kind::kBend, v, w, norm(mesh.vertices[w] - mesh.vertices[v]), bend_stiffness});
  }
  stretch.insert(stretch.end(), bend.begin(), bend.end());
  return stretch;
}

namespace {

// Stable reorder within each kind by greedy edge colouring, so consecutive
// projections touch disjoint particles and do not wait on each other.
void order_for_solver(std::vector<Constraint>& constraints, size_t vertex_count) {
  std::vector<Constraint> out;
  out.reserve(constraints.size());
  for (Constraint::Kind kind : {Constraint::Kind::kStretch, Constraint::Kind::kBend}) {
    std::vector<std::vector<bool>> used(vertex_count);
    std::vector<std::vector<Constraint>> colors;
    for (const Constraint& c : constraints) {
      if (c.kind != kind) continue;
      auto& ui = used[c.i];
      auto& uj = used[c.j];
      size_t color = 0;
      while ((color < ui.size() && ui[color]) || (color < uj.size() && uj[color])) ++color;
      if (ui.size() <= color) ui.resize(color + 1);
      if (uj.size() <= color) uj.resize(color + 1);
      ui[color] = uj[color] = true;
      if (colors.size() <= color) colors.resize(color + 1);
      colors[color].push_back(c);
    }
    for (const auto& group : colors) out.insert(out.end(), group.begin(), group.end());
  }
  constraints = std::move(out);
}

}  // namespace

SimState make_state(const ClothMesh& mesh, const SimParams& params) {
  params.validate();
  SimState s;
  s.positions = mesh.vertices;
  s.rest_positions = mesh.vertices;
  s.velocities.assign(mesh.vertices.size(), Vec3{});
  std::vector<double> area(mesh.vertices.size(), 0.0);
  for (const Triangle& t : mesh.triangles) {
    const double a = triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]) / 3;
    for (int k : t) area[k] += a;
  }
  s.inverse_masses.resize(area.size());
  for (size_t i = 0; i < area.size(); ++i) {
    if (!(area[i] > 0)) throw_invalid("vertex " + std::to_string(i) + " is not part of any triangle");
    s.inverse_masses[i] = 1.0 / (area[i] * params.areal_density);
  }
  s.constraints = build_constraints(mesh, params.stretch_stiffness, params.bend_stiffness);
  order_for_solver(s.constraints, mesh.vertices.size());
  return s;
}

void set_stiffness(SimState& state, const SimParams& params) {
  for (Constraint& c : state.constraints)
    c.stiffness = c.kind == Constraint::Kind::kStretch ? params.stretch_stiffness : params.bend_stiffness;
}

namespace {

struct Pin {
  int vertex = -1;
  Vec3 target;
};

void substep(SimState& s, const SimParams& p, double h, const Pin* pin, std::vector<Vec3>& pred) {
  const size_t n = s.positions.size();
  const double damp = 1.0 - p.drag_coeff * h;
  const double plane = p.plane_height;
  for (size_t i = 0; i < n; ++i) {
    if (s.inverse_masses[i] > 0) s.velocities[i] = s.velocities[i] * damp + p.gravity * h;
    pred[i] = s.positions[i] + s.velocities[i] * h;
  }
  if (pin) pred[pin->vertex] = pin->target;

  // Coulomb friction on the inertial step of particles pressed into the
  // plane; the normal impulse is the penetration the step would cause.
  // Applying it before projection keeps it from cancelling elastic
  // relaxation.
  Vec3* x = pred.data();
  const double* w = s.inverse_masses.data();
  for (size_t i = 0; i < n; ++i) {
    if (w[i] == 0 || s.positions[i].z > plane + p.contact_offset) continue;
    const double normal = plane - x[i].z;
    if (!(normal > 0)) continue;
    const double limit = p.friction_coeff * normal;
    const double tx = x[i].x - s.positions[i].x, ty = x[i].y - s.positions[i].y;
    const double slide = std::hypot(tx, ty);
    if (slide == 0) continue;
    const double keep = slide <= limit ? 0.0 : 1.0 - limit / slide;
    x[i].x = s.positions[i].x + tx * keep;
    x[i].y = s.positions[i].y + ty * keep;
  }

  // Separation first so the distance constraints have the last word.
  if (p.self_collision_distance > 0) self_collide(s, pred, p.self_collision_distance);

  double last_k = -1, k_iter = 0;
  for (int it = 0; it < p.solver_iterations; ++it) {
    for (const Constraint& c : s.constraints) {
      if (c.stiffness != last_k) {
        last_k = c.stiffness;
        k_iter = 1.0 - std::pow(1.0 - c.stiffness, 1.0 / p.solver_iterations);
      }
      const double wsum = w[c.i] + w[c.j];
      if (wsum == 0) continue;
      const Vec3 d = x[c.j] - x[c.i];
      const double len = norm(d);
      if (len == 0) continue;
      const double scale = k_iter * (len - c.rest_length) / (wsum * len);
      x[c.i] += d * (scale * w[c.i]);
      x[c.j] -= d * (scale * w[c.j]);
    }
    for (size_t i = 0; i < n; ++i)
      if (x[i].z < plane && w[i] > 0) x[i].z = plane;
  }

  for (size_t i = 0; i < n; ++i) {
    s.velocities[i] = (pred[i] - s.positions[i]) / h;
    s.positions[i] = pred[i];
  }
}

void step_impl(SimState& s, const SimParams& p, const Pin* pins, std::vector<Vec3>* trace) {
  const double h = p.dt / p.substeps;
  std::vector<Vec3> pred(s.positions.size());
  for (int k = 0; k < p.substeps; ++k) {
    const Pin* pin = pins ? &pins[k] : nullptr;
    substep(s, p, h, pin, pred);
    if (trace && pin) trace->push_back(s.positions[pin->vertex]);
  }
  for (size_t i = 0; i < s.positions.size(); ++i)
    if (!is_finite(s.positions[i]) || !is_finite(s.velocities[i]))
      throw Error(ErrorCode::kSimulationDiverged,
                  "non-finite particle state at vertex " + std::to_string(i) + " after step " +
                      std::to_string(s.steps_taken + 1));
  ++s.steps_taken;
}

}  // namespace

void step(SimState& state, const SimParams& params) { step_impl(state, params, nullptr, nullptr); }

double kinetic_energy(const SimState& state) {
  double e = 0;
  for (size_t i = 0; i < state.velocities.size(); ++i)
    if (state.inverse_masses[i] > 0)
      e += 0.5 * dot(state.velocities[i], state.velocities[i]) / state.inverse_masses[i];
  return e;
}

void settle(SimState& state, const SimParams& params, const SettleCriterion& criterion) {
  for (int k = 0; k < criterion.max_steps; ++k) {
    step(state, params);
    if (kinetic_energy(state) < criterion.max_kinetic_energy) {
      state.settled = true;
      return;
    }
  }
  state.settled = false;
}

void drop(SimState& state, const Mat3& orientation, double drop_height, const SimParams& params,
          const SettleCriterion& criterion) {
  if (!(drop_height >= 0)) throw_invalid("drop height must be >= 0");
  const Vec3 c = centroid_of(state.positions);
  double lowest = INFINITY;
  for (Vec3& p : state.positions) {
    p = c + orientation * (p - c);
    lowest = std::min(lowest, p.z);
  }
  const double lift = params.plane_height + drop_height - lowest;
  for (Vec3& p : state.positions) p.z += lift;
  std::fill(state.velocities.begin(), state.velocities.end(), Vec3{});
  settle(state, params, criterion);
}

Vec3 fold_arc_point(const Vec3& start, const Vec3& toward, double radius, double theta, double lift) {
  const Vec3 center = start + toward * radius;
  const double z = radius * std::sin(theta) + lift * 0.5 * (1 - std::cos(theta));
  return center - toward * (radius * std::cos(theta)) + Vec3{0, 0, z};
}

double fold_lift(const SimParams& params) { return params.self_collision_distance + params.contact_offset; }

void fold(SimState& state, int grasp_vertex, double arc_radius, double arc_angle, const SimParams& params,
          const SettleCriterion& criterion, std::vector<Vec3>* trace) {
  if (grasp_vertex < 0 || static_cast<size_t>(grasp_vertex) >= state.positions.size())
    throw_invalid("grasp vertex out of range");
  if (!(arc_radius > 0) || !(arc_angle >= 0) || arc_angle > std::numbers::pi)
    throw_invalid("fold arc needs radius > 0 and angle in [0, pi]");
  if (arc_angle == 0) return;
  const Vec3 start = state.positions[grasp_vertex];
  const Vec3 c = centroid_of(state.positions);
  Vec3 toward{c.x - start.x, c.y - start.y, 0};
  toward = norm(toward) > 0 ? normalized(toward) : Vec3{1, 0, 0};

  const double length = arc_radius * arc_angle;
  const long frames = std::max<long>(1, std::lround(std::ceil(length / (params.grasp_speed * params.dt))));
  const long total = frames * params.substeps;
  const double lift = fold_lift(params);
  const double saved_w = state.inverse_masses[grasp_vertex];
  state.inverse_masses[grasp_vertex] = 0;
  state.velocities[grasp_vertex] = Vec3{};
  std::vector<Pin> pins(params.substeps);
  for (long f = 0; f < frames; ++f) {
    for (int k = 0; k < params.substeps; ++k) {
      const double theta = arc_angle * static_cast<double>(f * params.substeps + k + 1) / total;
      pins[k] = {grasp_vertex, fold_arc_point(start, toward, arc_radius, theta, lift)};
    }
    step_impl(state, params, pins.data(), trace);
  }
  state.inverse_masses[grasp_vertex] = saved_w;
  state.velocities[grasp_vertex] = Vec3{};
  settle(state, params, criterion);
}

void flip_rigid(SimState& state, double drop_height, const SimParams& params) {
  const Vec3 c = centroid_of(state.positions);
  const Mat3 r = Mat3::rotation({1, 0, 0}, std::numbers::pi);
  double lowest = INFINITY;
  for (Vec3& p : state.positions) {
    p = c + r * (p - c);
    lowest = std::min(lowest, p.z);
  }
  const double lift = params.plane_height + drop_height - lowest;
  for (Vec3& p : state.positions) p.z += lift;
  std::fill(state.velocities.begin(), state.velocities.end(), Vec3{});
}

void flip(SimState& state, double drop_height, const SimParams& params, const SettleCriterion& criterion) {
  flip_rigid(state, drop_height, params);
  settle(state, params, criterion);
}

DeformResult deform_procedure(const ClothMesh& mesh, const DeformConfig& cfg, Rng& rng) {
  cfg.validate();
  DeformResult out;
  out.mesh = mesh;
  out.params = cfg.base;
  if (cfg.undeformed) return out;

  SimParams& p = out.params;
  p.stretch_stiffness = sample(rng, cfg.ranges.stretch_stiffness);
  p.bend_stiffness = sample(rng, cfg.ranges.bend_stiffness);
  p.friction_coeff = sample(rng, cfg.ranges.friction_coeff);
  p.drag_coeff = sample(rng, cfg.ranges.drag_coeff);

  // Simulate in a frame centred on the flat cloth so the result does not
  // depend on where the template was placed.
  ClothMesh local = mesh;
  const Vec3 c = centroid(mesh.vertices);
  const Vec3 offset{c.x, c.y, 0};
  // Snapping to a ~1 nm lattice hides the rounding of the recentring, so a
  // translated copy feeds the solver the same numbers.
  constexpr double kLattice = 0x1p30;
  for (Vec3& v : local.vertices) {
    v -= offset;
    v = {std::nearbyint(v.x * kLattice) / kLattice, std::nearbyint(v.y * kLattice) / kLattice,
         std::nearbyint(v.z * kLattice) / kLattice};
  }
  SimState s = make_state(local, p);

  const double yaw = rng.uniform(0, 2 * std::numbers::pi);
  const double tilt_axis = rng.uniform(0, 2 * std::numbers::pi);
  const double tilt = rng.uniform(0, cfg.max_tilt);
  const Mat3 orientation = Mat3::rotation({std::cos(tilt_axis), std::sin(tilt_axis), 0}, tilt) *
                           Mat3::rotation({0, 0, 1}, yaw);
  drop(s, orientation, sample(rng, cfg.drop_height), p, cfg.settle);
  bool settled = s.settled;

  if (rng.bernoulli(cfg.fold_probability)) {
    const auto boundary = boundary_edges(mesh.triangles);
    int grasp;
    if (!boundary.empty() && rng.bernoulli(cfg.grasp_boundary_probability)) {
      grasp = boundary[rng.uniform_int(0, static_cast<int64_t>(boundary.size()) - 1)].first;
    } else {
      grasp = static_cast<int>(rng.uniform_int(0, static_cast<int64_t>(mesh.vertices.size()) - 1));
    }
    const double radius = sample(rng, cfg.fold_radius);
    const double angle = sample(rng, cfg.fold_angle);
    fold(s, grasp, radius, angle, p, cfg.settle);
    settled = s.settled;
    out.folded = true;
  }
  if (rng.bernoulli(cfg.flip_probability)) {
    flip(s, sample(rng, cfg.drop_height), p, cfg.settle);
    settled = s.settled;
    out.flipped = true;
  }
  out.settled = settled;
  for (size_t i = 0; i < s.positions.size(); ++i) out.mesh.vertices[i] = s.positions[i] + offset;
  return out;
}

}  // namespace clothforge

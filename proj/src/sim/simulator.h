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

#include <optional>
#include <vector>

#include "common/rng.h"
#include "geometry/mesh.h"
#include "templates/templates.h"

namespace clothforge {

struct SimParams {
  Vec3 gravity{0, 0, -9.81};
  double dt = 1.0 / 60.0;
  int substeps = 4;
  int solver_iterations = 20;
  double stretch_stiffness = 0.95;
  double bend_stiffness = 0.1;
  double friction_coeff = 0.5;
  double drag_coeff = 1.0;  // 1/s
  double plane_height = 0.0;
  double contact_offset = 0.002;
  // Particle-particle separation; 0 disables self collision.
  double self_collision_distance = 0.006;
  double areal_density = 0.2;  // kg/m^2, lumped onto vertices
  double grasp_speed = 0.5;    // m/s along the fold arc

  // Throws invalid-argument when a field is out of its domain.
  void validate() const;
};

struct Constraint {
  enum class Kind { kStretch, kBend };
  Kind kind = Kind::kStretch;
  int i = 0;
  int j = 0;
  double rest_length = 0;
  double stiffness = 1;
};

struct SimState {
  std::vector<Vec3> positions;
  std::vector<Vec3> velocities;
  std::vector<double> inverse_masses;
  // Solver order: stretch then bend, each grouped by a greedy colouring.
  std::vector<Constraint> constraints;
  // Flat positions the constraints were built from. Self collision ignores
  // pairs that already started closer than the collision distance.
  std::vector<Vec3> rest_positions;
  bool settled = true;
  long steps_taken = 0;
};

struct SettleCriterion {
  double max_kinetic_energy = 1e-5;  // J
  int max_steps = 600;
};

// Stretch constraints for 1-ring pairs and bend constraints for pairs at graph
// distance exactly two, in ascending (i, j) order, stretch first.
std::vector<Constraint> build_constraints(const ClothMesh& mesh, double stretch_stiffness = 1.0,
                                          double bend_stiffness = 1.0);

// Particles at the mesh vertices with lumped masses, zero velocity.
SimState make_state(const ClothMesh& mesh, const SimParams& params);

// Re-applies params stiffness to every constraint of the matching kind.
void set_stiffness(SimState& state, const SimParams& params);

// Advances one frame (params.substeps substeps). Throws simulation-diverged on
// non-finite state.
void step(SimState& state, const SimParams& params);

double kinetic_energy(const SimState& state);

// Steps until kinetic energy drops below the threshold (checked after each
// step) or max_steps is reached; sets state.settled accordingly.
void settle(SimState& state, const SimParams& params, const SettleCriterion& criterion);

// Rotates the particles about their centroid, lifts them so the lowest one
// sits drop_height above the plane, zeroes velocities and settles.
void drop(SimState& state, const Mat3& orientation, double drop_height, const SimParams& params,
          const SettleCriterion& criterion);

// Pins grasp_vertex and moves it along a vertical circular arc toward the
// cloth centroid, then releases and settles. The optional trace receives the
// pinned position after every substep.
void fold(SimState& state, int grasp_vertex, double arc_radius, double arc_angle,
          const SimParams& params, const SettleCriterion& criterion,
          std::vector<Vec3>* trace = nullptr);

// Analytic position on the fold arc after sweeping angle theta. The end of
// a half-turn is raised by `lift` so the flap lands on top of the cloth.
Vec3 fold_arc_point(const Vec3& start, const Vec3& toward, double radius, double theta, double lift = 0);

// Layer separation used as the fold arc lift.
double fold_lift(const SimParams& params);

// Rigid part of a flip: lifts by drop_height above the plane and rotates by pi
// about the x axis through the centroid. Velocities are zeroed.
void flip_rigid(SimState& state, double drop_height, const SimParams& params);
void flip(SimState& state, double drop_height, const SimParams& params,
          const SettleCriterion& criterion);

struct SimRanges {
  Range stretch_stiffness{0.8, 1.0};
  Range bend_stiffness{0.02, 0.3};
  Range friction_coeff{0.3, 0.9};
  Range drag_coeff{0.5, 2.0};
};

struct DeformConfig {
  bool undeformed = false;
  Range drop_height{0.02, 0.08};
  double max_tilt = 0.3;  // rad, tilt of the initial orientation off horizontal
  double fold_probability = 0.6;
  Range fold_radius{0.03, 0.15};
  Range fold_angle{1.5707963267948966, 3.141592653589793};
  double grasp_boundary_probability = 0.7;
  double flip_probability = 0.2;
  SettleCriterion settle;
  SimParams base;  // non-randomized physics fields
  SimRanges ranges;

  void validate() const;
};

struct DeformResult {
  ClothMesh mesh;
  SimParams params;
  bool settled = true;
  bool folded = false;
  bool flipped = false;
};

// Samples physics parameters, drops the mesh with a random orientation, then
// folds and flips with the configured probabilities. Undeformed mode returns
// the input unchanged. The result keeps topology, UVs and keypoints.
DeformResult deform_procedure(const ClothMesh& mesh, const DeformConfig& cfg, Rng& rng);

}  // namespace clothforge

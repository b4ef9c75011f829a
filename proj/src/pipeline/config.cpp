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

#include "pipeline/config.h"

#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <set>

#include "common/error.h"
#include "common/rng.h"
#include "geometry/obj_io.h"

namespace clothforge {
namespace {

using Json = nlohmann::ordered_json;

std::string escape_pointer_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

// A JSON value together with its pointer, for located config errors.
class Node {
 public:
  Node(const Json& value, std::string pointer, const std::string& source)
      : value_(value), pointer_(std::move(pointer)), source_(source) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorCode::kConfig, message, source_ + "#" + pointer_);
  }

  const Json& value() const { return value_; }
  const std::string& pointer() const { return pointer_; }

  void expect_object(const std::vector<std::string>& allowed) const {
    if (!value_.is_object()) fail("expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (auto it = value_.begin(); it != value_.end(); ++it)
      if (!keys.count(it.key())) child_unchecked(it.key()).fail("unknown key '" + it.key() + "'");
  }

  bool has(const std::string& key) const { return value_.contains(key); }

  Node child(const std::string& key) const { return child_unchecked(key); }

  Node element(size_t i) const { return Node(value_[i], pointer_ + "/" + std::to_string(i), source_); }

  double number() const {
    if (!value_.is_number()) fail("expected a number");
    const double v = value_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  int64_t integer() const {
    if (!value_.is_number_integer()) fail("expected an integer");
    return value_.get<int64_t>();
  }

  int int32() const {
    const int64_t v = integer();
    if (v < INT32_MIN || v > INT32_MAX) fail("integer out of range");
    return static_cast<int>(v);
  }

  bool boolean() const {
    if (!value_.is_boolean()) fail("expected true or false");
    return value_.get<bool>();
  }

  std::string string() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }

  Range range() const {
    if (!value_.is_array() || value_.size() != 2) fail("expected [min, max]");
    const Range r{element(0).number(), element(1).number()};
    if (r.min > r.max) fail("range min exceeds max");
    return r;
  }

  Vec3 vec3() const {
    if (!value_.is_array() || value_.size() != 3) fail("expected [x, y, z]");
    return {element(0).number(), element(1).number(), element(2).number()};
  }

  uint64_t seed() const {
    if (value_.is_number_unsigned()) return value_.get<uint64_t>();
    if (value_.is_number_integer()) {
      if (value_.get<int64_t>() < 0) fail("seed must be non-negative");
      return static_cast<uint64_t>(value_.get<int64_t>());
    }
    if (value_.is_string()) {
      const std::string s = value_.get<std::string>();
      uint64_t v = 0;
      if (parse_u64(s, v)) return v;
    }
    fail("expected a non-negative integer or a \"0x\" hex string");
  }

  static bool parse_u64(const std::string& s, uint64_t& out) {
    const bool hex = s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X');
    const std::string digits = hex ? s.substr(2) : s;
    if (digits.empty() || digits.size() > (hex ? 16u : 20u)) return false;
    uint64_t v = 0;
    for (char c : digits) {
      int d;
      if (c >= '0' && c <= '9')
        d = c - '0';
      else if (hex && c >= 'a' && c <= 'f')
        d = c - 'a' + 10;
      else if (hex && c >= 'A' && c <= 'F')
        d = c - 'A' + 10;
      else
        return false;
      const uint64_t base = hex ? 16 : 10;
      if (v > (UINT64_MAX - d) / base) return false;
      v = v * base + d;
    }
    out = v;
    return true;
  }

 private:
  Node child_unchecked(const std::string& key) const {
    return Node(value_[key], pointer_ + "/" + escape_pointer_token(key), source_);
  }

  const Json& value_;
  std::string pointer_;
  const std::string& source_;
};

template <typename F>
void maybe(const Node& n, const char* key, F&& read) {
  if (n.has(key)) read(n.child(key));
}

void read_number(const Node& n, const char* key, double& out) {
  maybe(n, key, [&](const Node& c) { out = c.number(); });
}
void read_int(const Node& n, const char* key, int& out) {
  maybe(n, key, [&](const Node& c) { out = c.int32(); });
}
void read_range(const Node& n, const char* key, Range& out) {
  maybe(n, key, [&](const Node& c) { out = c.range(); });
}

Json range_json(const Range& r) { return Json::array({r.min, r.max}); }
Json vec3_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

// Runs a validator and re-throws its failure as a config error at pointer.
template <typename F>
void check(const std::string& source, const std::string& pointer, F&& validate) {
  try {
    validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    throw Error(ErrorCode::kConfig, e.what(), source + "#" + pointer);
  }
}

}  // namespace

std::string hex64(uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

PipelineConfig::PipelineConfig() {
  for (ClothCategory c : kAllCategories) {
    counts[c] = 10;
    templates[c] = ParamRanges::defaults(c);
  }
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  return parse(read_file(path), path);
}

PipelineConfig PipelineConfig::parse(const std::string& text, const std::string& source) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfig, std::string("malformed JSON: ") + e.what(),
                source + ":byte " + std::to_string(e.byte));
  }
  PipelineConfig cfg;
  const Node n(root, "", source);
  n.expect_object({"version", "master_seed", "output_dir", "workers", "render_threads", "counts", "mesh", "templates",
                   "deform", "materials", "scene", "metrics", "bench", "debug"});
  maybe(n, "version", [](const Node& c) {
    if (c.integer() != kVersion) c.fail("unsupported config version");
  });
  maybe(n, "master_seed", [&](const Node& c) { cfg.master_seed = c.seed(); });
  maybe(n, "output_dir", [&](const Node& c) { cfg.output_dir = c.string(); });
  read_int(n, "workers", cfg.workers);
  read_int(n, "render_threads", cfg.render_threads);

  maybe(n, "counts", [&](const Node& c) {
    c.expect_object({"towel", "tshirt", "shorts"});
    for (ClothCategory cat : kAllCategories) read_int(c, std::string(to_string(cat)).c_str(), cfg.counts[cat]);
  });
  maybe(n, "mesh", [&](const Node& c) {
    c.expect_object({"max_edge"});
    read_number(c, "max_edge", cfg.max_edge);
  });
  maybe(n, "templates", [&](const Node& c) {
    c.expect_object({"towel", "tshirt", "shorts"});
    for (ClothCategory cat : kAllCategories) {
      maybe(c, std::string(to_string(cat)).c_str(), [&](const Node& t) {
        t.expect_object(ParamRanges::parameter_names(cat));
        for (auto& [name, range] : cfg.templates[cat].ranges) read_range(t, name.c_str(), range);
      });
    }
  });

  maybe(n, "deform", [&](const Node& c) {
    DeformConfig& d = cfg.deform;
    c.expect_object({"undeformed", "drop_height", "max_tilt", "fold_probability", "fold_radius", "fold_angle",
                     "grasp_boundary_probability", "flip_probability", "settle", "physics", "ranges"});
    maybe(c, "undeformed", [&](const Node& x) { d.undeformed = x.boolean(); });
    read_range(c, "drop_height", d.drop_height);
    read_number(c, "max_tilt", d.max_tilt);
    read_number(c, "fold_probability", d.fold_probability);
    read_range(c, "fold_radius", d.fold_radius);
    read_range(c, "fold_angle", d.fold_angle);
    read_number(c, "grasp_boundary_probability", d.grasp_boundary_probability);
    read_number(c, "flip_probability", d.flip_probability);
    maybe(c, "settle", [&](const Node& s) {
      s.expect_object({"max_kinetic_energy", "max_steps"});
      read_number(s, "max_kinetic_energy", d.settle.max_kinetic_energy);
      read_int(s, "max_steps", d.settle.max_steps);
    });
    maybe(c, "physics", [&](const Node& p) {
      SimParams& b = d.base;
      p.expect_object({"gravity", "dt", "substeps", "solver_iterations", "plane_height", "contact_offset",
                       "self_collision_distance", "areal_density", "grasp_speed"});
      maybe(p, "gravity", [&](const Node& g) { b.gravity = g.vec3(); });
      read_number(p, "dt", b.dt);
      read_int(p, "substeps", b.substeps);
      read_int(p, "solver_iterations", b.solver_iterations);
      read_number(p, "plane_height", b.plane_height);
      read_number(p, "contact_offset", b.contact_offset);
      read_number(p, "self_collision_distance", b.self_collision_distance);
      read_number(p, "areal_density", b.areal_density);
      read_number(p, "grasp_speed", b.grasp_speed);
    });
    maybe(c, "ranges", [&](const Node& r) {
      r.expect_object({"stretch_stiffness", "bend_stiffness", "friction_coeff", "drag_coeff"});
      read_range(r, "stretch_stiffness", d.ranges.stretch_stiffness);
      read_range(r, "bend_stiffness", d.ranges.bend_stiffness);
      read_range(r, "friction_coeff", d.ranges.friction_coeff);
      read_range(r, "drag_coeff", d.ranges.drag_coeff);
    });
  });

  maybe(n, "materials", [&](const Node& c) {
    c.expect_object({"uniform", "tailored", "random_texture"});
    // Listing any weight replaces the whole distribution.
    cfg.materials = {0, 0, 0};
    read_number(c, "uniform", cfg.materials.uniform);
    read_number(c, "tailored", cfg.materials.tailored);
    read_number(c, "random_texture", cfg.materials.random_texture);
  });

  maybe(n, "scene", [&](const Node& c) {
    SceneConfig& s = cfg.scene;
    c.expect_object({"camera", "intrinsics", "distractor_count", "distractor_size", "distractor_margin",
                     "cloth_thickness", "plane_height", "plane_size", "ambient", "light_count", "light_intensity",
                     "light_elevation", "max_attempts"});
    maybe(c, "camera", [&](const Node& k) {
      k.expect_object({"distance", "elevation", "azimuth"});
      read_range(k, "distance", s.camera.distance);
      read_range(k, "elevation", s.camera.elevation);
      read_range(k, "azimuth", s.camera.azimuth);
    });
    maybe(c, "intrinsics", [&](const Node& k) {
      k.expect_object({"focal_px", "width", "height", "cx", "cy"});
      read_number(k, "focal_px", s.intrinsics.focal_px);
      read_int(k, "width", s.intrinsics.width);
      read_int(k, "height", s.intrinsics.height);
      read_number(k, "cx", s.intrinsics.cx);
      read_number(k, "cy", s.intrinsics.cy);
    });
    read_range(c, "distractor_count", s.distractor_count);
    read_range(c, "distractor_size", s.distractor_size);
    read_number(c, "distractor_margin", s.distractor_margin);
    read_number(c, "cloth_thickness", s.cloth_thickness);
    read_number(c, "plane_height", s.plane_height);
    read_range(c, "plane_size", s.plane_size);
    read_range(c, "ambient", s.ambient);
    read_range(c, "light_count", s.light_count);
    read_range(c, "light_intensity", s.light_intensity);
    read_range(c, "light_elevation", s.light_elevation);
    read_int(c, "max_attempts", cfg.max_scene_attempts);
  });

  maybe(n, "metrics", [&](const Node& c) {
    c.expect_object({"sigma", "thresholds", "decode_threshold"});
    read_number(c, "sigma", cfg.metrics.sigma);
    read_number(c, "decode_threshold", cfg.metrics.decode_threshold);
    maybe(c, "thresholds", [&](const Node& t) {
      if (!t.value().is_array()) t.fail("expected an array of pixel thresholds");
      cfg.metrics.thresholds.clear();
      for (size_t i = 0; i < t.value().size(); ++i) cfg.metrics.thresholds.push_back(t.element(i).number());
    });
  });

  maybe(n, "bench", [&](const Node& c) {
    c.expect_object({"samples", "parallel_samples", "parallel_workers"});
    read_int(c, "samples", cfg.bench.samples);
    read_int(c, "parallel_samples", cfg.bench.parallel_samples);
    read_int(c, "parallel_workers", cfg.bench.parallel_workers);
  });

  maybe(n, "debug", [&](const Node& c) {
    c.expect_object({"scene_json"});
    maybe(c, "scene_json", [&](const Node& x) { cfg.write_scene_json = x.boolean(); });
  });

  cfg.validate(source);
  return cfg;
}

void PipelineConfig::validate(const std::string& source) const {
  auto fail = [&](const std::string& pointer, const std::string& message) {
    throw Error(ErrorCode::kConfig, message, source + "#" + pointer);
  };
  if (output_dir.empty()) fail("/output_dir", "output directory must not be empty");
  if (workers < 1) fail("/workers", "workers must be at least 1");
  if (render_threads < 1) fail("/render_threads", "render_threads must be at least 1");
  for (ClothCategory c : kAllCategories) {
    const std::string name(to_string(c));
    auto it = counts.find(c);
    if (it == counts.end() || it->second < 0) fail("/counts/" + name, "counts must be non-negative");
    if (it->second > 999999) fail("/counts/" + name, "at most 999999 samples per category");
    check(source, "/templates/" + name, [&] { templates.at(c).validate(); });
  }
  if (!(max_edge > 0)) fail("/mesh/max_edge", "max_edge must be positive");
  check(source, "/deform", [&] { deform.validate(); });
  const double w[3] = {materials.uniform, materials.tailored, materials.random_texture};
  const char* wname[3] = {"uniform", "tailored", "random_texture"};
  for (int i = 0; i < 3; ++i)
    if (w[i] < 0) fail(std::string("/materials/") + wname[i], "weights must be non-negative");
  if (std::abs(w[0] + w[1] + w[2] - 1.0) > 1e-9) fail("/materials", "material weights must sum to 1");
  check(source, "/scene", [&] { scene.validate(); });
  if (max_scene_attempts < 1) fail("/scene/max_attempts", "max_attempts must be at least 1");
  if (!(metrics.sigma > 0)) fail("/metrics/sigma", "sigma must be positive");
  if (!(metrics.decode_threshold > 0 && metrics.decode_threshold <= 1))
    fail("/metrics/decode_threshold", "decode_threshold must be in (0, 1]");
  if (metrics.thresholds.empty()) fail("/metrics/thresholds", "at least one threshold is required");
  for (size_t i = 0; i < metrics.thresholds.size(); ++i)
    if (!(metrics.thresholds[i] > 0)) fail("/metrics/thresholds/" + std::to_string(i), "thresholds must be positive");
  if (bench.samples < 1) fail("/bench/samples", "samples must be at least 1");
  if (bench.parallel_samples < 1) fail("/bench/parallel_samples", "parallel_samples must be at least 1");
  if (bench.parallel_workers < 1) fail("/bench/parallel_workers", "parallel_workers must be at least 1");
}

std::string PipelineConfig::to_json(bool canonical) const {
  Json j;
  j["version"] = kVersion;
  j["master_seed"] = hex64(master_seed);
  if (!canonical) {
    j["output_dir"] = output_dir;
    j["workers"] = workers;
    j["render_threads"] = render_threads;
  }
  Json c = Json::object();
  for (ClothCategory cat : kAllCategories) c[std::string(to_string(cat))] = counts.at(cat);
  j["counts"] = c;
  j["mesh"] = {{"max_edge", max_edge}};
  Json t = Json::object();
  for (ClothCategory cat : kAllCategories) {
    Json r = Json::object();
    for (const auto& [name, range] : templates.at(cat).ranges) r[name] = range_json(range);
    t[std::string(to_string(cat))] = r;
  }
  j["templates"] = t;
  const DeformConfig& d = deform;
  const SimParams& b = d.base;
  j["deform"] = {
      {"undeformed", d.undeformed},
      {"drop_height", range_json(d.drop_height)},
      {"max_tilt", d.max_tilt},
      {"fold_probability", d.fold_probability},
      {"fold_radius", range_json(d.fold_radius)},
      {"fold_angle", range_json(d.fold_angle)},
      {"grasp_boundary_probability", d.grasp_boundary_probability},
      {"flip_probability", d.flip_probability},
      {"settle", {{"max_kinetic_energy", d.settle.max_kinetic_energy}, {"max_steps", d.settle.max_steps}}},
      {"physics",
       {{"gravity", vec3_json(b.gravity)},
        {"dt", b.dt},
        {"substeps", b.substeps},
        {"solver_iterations", b.solver_iterations},
        {"plane_height", b.plane_height},
        {"contact_offset", b.contact_offset},
        {"self_collision_distance", b.self_collision_distance},
        {"areal_density", b.areal_density},
        {"grasp_speed", b.grasp_speed}}},
      {"ranges",
       {{"stretch_stiffness", range_json(d.ranges.stretch_stiffness)},
        {"bend_stiffness", range_json(d.ranges.bend_stiffness)},
        {"friction_coeff", range_json(d.ranges.friction_coeff)},
        {"drag_coeff", range_json(d.ranges.drag_coeff)}}}};
  j["materials"] = {{"uniform", materials.uniform},
                    {"tailored", materials.tailored},
                    {"random_texture", materials.random_texture}};
  const SceneConfig& s = scene;
  j["scene"] = {{"camera",
                 {{"distance", range_json(s.camera.distance)},
                  {"elevation", range_json(s.camera.elevation)},
                  {"azimuth", range_json(s.camera.azimuth)}}},
                {"intrinsics",
                 {{"focal_px", s.intrinsics.focal_px},
                  {"width", s.intrinsics.width},
                  {"height", s.intrinsics.height},
                  {"cx", s.intrinsics.cx},
                  {"cy", s.intrinsics.cy}}},
                {"distractor_count", range_json(s.distractor_count)},
                {"distractor_size", range_json(s.distractor_size)},
                {"distractor_margin", s.distractor_margin},
                {"cloth_thickness", s.cloth_thickness},
                {"plane_height", s.plane_height},
                {"plane_size", range_json(s.plane_size)},
                {"ambient", range_json(s.ambient)},
                {"light_count", range_json(s.light_count)},
                {"light_intensity", range_json(s.light_intensity)},
                {"light_elevation", range_json(s.light_elevation)},
                {"max_attempts", max_scene_attempts}};
  j["metrics"] = {{"sigma", metrics.sigma},
                  {"thresholds", metrics.thresholds},
                  {"decode_threshold", metrics.decode_threshold}};
  if (!canonical)
    j["bench"] = {{"samples", bench.samples},
                  {"parallel_samples", bench.parallel_samples},
                  {"parallel_workers", bench.parallel_workers}};
  j["debug"] = {{"scene_json", write_scene_json}};
  return j.dump(2) + "\n";
}

uint64_t PipelineConfig::hash() const { return fnv1a64(to_json(true)); }

}  // namespace clothforge

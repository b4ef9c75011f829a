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

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "clothforge/clothforge.h"
#include "common/error.h"
#include "common/rng.h"
#include "geometry/obj_io.h"
#include "metrics/metrics.h"
#include "pipeline/config.h"
#include "pipeline/pipeline.h"
#include "templates/templates.h"

struct cf_config {
  clothforge::PipelineConfig value;
};

struct cf_mesh {
  clothforge::ClothMesh value;
};

namespace {

using clothforge::Error;
using clothforge::ErrorCode;

thread_local std::string t_message;
thread_local std::string t_location;

cf_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return CF_ERR_INVALID_ARGUMENT;
    case ErrorCode::kGenerationFailure:
      return CF_ERR_GENERATION_FAILURE;
    case ErrorCode::kSimulationDiverged:
      return CF_ERR_SIMULATION_DIVERGED;
    case ErrorCode::kConfig:
      return CF_ERR_CONFIG;
    case ErrorCode::kStageOrder:
      return CF_ERR_STAGE_ORDER;
    case ErrorCode::kIo:
      return CF_ERR_IO;
    case ErrorCode::kParse:
      return CF_ERR_PARSE;
    case ErrorCode::kCancelled:
      return CF_ERR_CANCELLED;
  }
  return CF_ERR_INTERNAL;
}

cf_status fail(cf_status status, std::string message, std::string location = {}) {
  t_message = std::move(message);
  t_location = std::move(location);
  return status;
}

// Runs body and converts exceptions into status codes.
template <typename F>
cf_status guarded(F&& body) {
  t_message.clear();
  t_location.clear();
  try {
    body();
    return CF_OK;
  } catch (const Error& e) {
    return fail(to_status(e.code()), e.what(), e.location());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(CF_ERR_IO, e.what(), e.path1().string());
  } catch (const std::bad_alloc&) {
    return fail(CF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CF_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

clothforge::Stage to_stage(cf_stage s) {
  switch (s) {
    case CF_STAGE_MESHES:
      return clothforge::Stage::kMeshes;
    case CF_STAGE_DEFORM:
      return clothforge::Stage::kDeform;
    case CF_STAGE_RENDER:
      return clothforge::Stage::kRender;
    case CF_STAGE_ALL:
      return clothforge::Stage::kAll;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown stage");
}

}  // namespace

extern "C" {

const char* cf_version(void) { return CF_VERSION_STRING; }

const char* cf_status_string(cf_status status) {
  switch (status) {
    case CF_OK:
      return "ok";
    case CF_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case CF_ERR_CONFIG:
      return "config error";
    case CF_ERR_STAGE_ORDER:
      return "stage order error";
    case CF_ERR_IO:
      return "i/o error";
    case CF_ERR_PARSE:
      return "parse error";
    case CF_ERR_GENERATION_FAILURE:
      return "generation failure";
    case CF_ERR_SIMULATION_DIVERGED:
      return "simulation diverged";
    case CF_ERR_CANCELLED:
      return "cancelled";
    case CF_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* cf_last_error(void) { return t_message.c_str(); }
const char* cf_last_error_location(void) { return t_location.c_str(); }

void cf_string_free(char* s) { std::free(s); }

cf_status cf_config_default(cf_config** out) {
  return guarded([&] {
    require(out, "out must not be null");
    *out = new cf_config{};
  });
}

cf_status cf_config_load(const char* path, cf_config** out) {
  return guarded([&] {
    require(path && out, "path and out must not be null");
    *out = nullptr;
    auto cfg = std::make_unique<cf_config>(cf_config{clothforge::PipelineConfig::load(path)});
    *out = cfg.release();
  });
}

cf_status cf_config_parse(const char* json, cf_config** out) {
  return guarded([&] {
    require(json && out, "json and out must not be null");
    *out = nullptr;
    auto cfg = std::make_unique<cf_config>(cf_config{clothforge::PipelineConfig::parse(json)});
    *out = cfg.release();
  });
}

void cf_config_free(cf_config* config) { delete config; }

cf_status cf_config_set_master_seed(cf_config* config, uint64_t seed) {
  return guarded([&] {
    require(config, "config must not be null");
    config->value.master_seed = seed;
  });
}

cf_status cf_config_get_master_seed(const cf_config* config, uint64_t* seed) {
  return guarded([&] {
    require(config && seed, "config and seed must not be null");
    *seed = config->value.master_seed;
  });
}

cf_status cf_config_set_workers(cf_config* config, int workers) {
  return guarded([&] {
    require(config, "config must not be null");
    require(workers >= 1, "workers must be at least 1");
    config->value.workers = workers;
  });
}

cf_status cf_config_set_output_dir(cf_config* config, const char* dir) {
  return guarded([&] {
    require(config && dir && *dir, "config and a non-empty dir are required");
    config->value.output_dir = dir;
  });
}

cf_status cf_config_to_json(const cf_config* config, char** json) {
  return guarded([&] {
    require(config && json, "config and json must not be null");
    *json = dup_string(config->value.to_json());
  });
}

cf_status cf_config_hash(const cf_config* config, uint64_t* hash) {
  return guarded([&] {
    require(config && hash, "config and hash must not be null");
    *hash = config->value.hash();
  });
}

cf_status cf_stage_parse(const char* name, cf_stage* stage) {
  return guarded([&] {
    require(name && stage, "name and stage must not be null");
    const auto s = clothforge::parse_stage(name);
    if (!s) throw Error(ErrorCode::kInvalidArgument, std::string("unknown stage '") + name + "'");
    *stage = static_cast<cf_stage>(*s);
  });
}

cf_status cf_generate(const cf_config* config, cf_stage stage, cf_progress_fn progress, void* user) {
  return guarded([&] {
    require(config, "config must not be null");
    clothforge::ProgressCallback cb;
    if (progress) cb = [progress, user](long done, long total) { progress(done, total, user); };
    clothforge::generate(config->value, to_stage(stage), cb);
  });
}

cf_status cf_bench(const cf_config* config, char** report_json) {
  return guarded([&] {
    require(config && report_json, "config and report_json must not be null");
    *report_json = dup_string(clothforge::bench(config->value));
  });
}

cf_status cf_evaluate(const char* gt_path, const char* pred_path, const char* report_path, char** report_json) {
  return guarded([&] {
    require(gt_path && pred_path, "gt_path and pred_path must not be null");
    const std::string report = clothforge::evaluate_files(gt_path, pred_path).to_json();
    if (report_path) clothforge::write_file_atomic(report_path, report);
    if (report_json) *report_json = dup_string(report);
  });
}

void cf_request_cancel(void) { clothforge::request_cancel(); }
void cf_reset_cancel(void) { clothforge::reset_cancel(); }

cf_status cf_mesh_from_template(const char* category, uint64_t seed, double max_edge, cf_mesh** out) {
  return guarded([&] {
    require(category && out, "category and out must not be null");
    require(max_edge > 0, "max_edge must be positive");
    const auto cat = clothforge::parse_category(category);
    if (!cat) throw Error(ErrorCode::kInvalidArgument, std::string("unknown category '") + category + "'");
    clothforge::Rng rng(seed);
    const auto tmpl = clothforge::sample_template(*cat, clothforge::ParamRanges::defaults(*cat), rng);
    *out = new cf_mesh{clothforge::template_to_mesh(tmpl, max_edge)};
  });
}

cf_status cf_mesh_read_obj(const char* path, cf_mesh** out) {
  return guarded([&] {
    require(path && out, "path and out must not be null");
    *out = new cf_mesh{clothforge::load_obj(path)};
  });
}

cf_status cf_mesh_write_obj(const cf_mesh* mesh, const char* path) {
  return guarded([&] {
    require(mesh && path, "mesh and path must not be null");
    clothforge::save_obj(mesh->value, path);
  });
}

size_t cf_mesh_vertex_count(const cf_mesh* mesh) { return mesh ? mesh->value.vertices.size() : 0; }
size_t cf_mesh_triangle_count(const cf_mesh* mesh) { return mesh ? mesh->value.triangles.size() : 0; }

cf_status cf_mesh_vertex(const cf_mesh* mesh, size_t i, double xyz[3]) {
  return guarded([&] {
    require(mesh && xyz, "mesh and xyz must not be null");
    require(i < mesh->value.vertices.size(), "vertex index out of range");
    const auto& v = mesh->value.vertices[i];
    xyz[0] = v.x;
    xyz[1] = v.y;
    xyz[2] = v.z;
  });
}

cf_status cf_mesh_keypoint_vertex(const cf_mesh* mesh, const char* name, size_t* index) {
  return guarded([&] {
    require(mesh && name && index, "mesh, name and index must not be null");
    auto it = mesh->value.keypoint_vertex_map.find(name);
    if (it == mesh->value.keypoint_vertex_map.end())
      throw Error(ErrorCode::kInvalidArgument, std::string("no keypoint named '") + name + "'");
    *index = static_cast<size_t>(it->second);
  });
}

void cf_mesh_free(cf_mesh* mesh) { delete mesh; }

}  // extern "C"

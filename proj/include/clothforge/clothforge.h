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

#ifndef CLOTHFORGE_CLOTHFORGE_H_
#define CLOTHFORGE_CLOTHFORGE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CF_API __declspec(dllexport)
#else
#define CF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define CF_VERSION_STRING "0.1.0"

typedef enum cf_status {
  CF_OK = 0,
  CF_ERR_INVALID_ARGUMENT = 1,
  CF_ERR_CONFIG = 2,
  CF_ERR_STAGE_ORDER = 3,
  CF_ERR_IO = 4,
  CF_ERR_PARSE = 5,
  CF_ERR_GENERATION_FAILURE = 6,
  CF_ERR_SIMULATION_DIVERGED = 7,
  CF_ERR_CANCELLED = 8,
  CF_ERR_INTERNAL = 9
} cf_status;

typedef enum cf_stage {
  CF_STAGE_MESHES = 0,
  CF_STAGE_DEFORM = 1,
  CF_STAGE_RENDER = 2,
  CF_STAGE_ALL = 3
} cf_stage;

typedef struct cf_config cf_config;
typedef struct cf_mesh cf_mesh;

typedef void (*cf_progress_fn)(long done, long total, void* user);

CF_API const char* cf_version(void);
CF_API const char* cf_status_string(cf_status status);

/* Message and location ("file#/json/pointer", "file:line", ...) of the last
   failed call on this thread; empty strings after a successful call. */
CF_API const char* cf_last_error(void);
CF_API const char* cf_last_error_location(void);

/* Strings returned through char** out-parameters are released with this. */
CF_API void cf_string_free(char* s);

CF_API cf_status cf_config_default(cf_config** out);
CF_API cf_status cf_config_load(const char* path, cf_config** out);
CF_API cf_status cf_config_parse(const char* json, cf_config** out);
CF_API void cf_config_free(cf_config* config);
CF_API cf_status cf_config_set_master_seed(cf_config* config, uint64_t seed);
CF_API cf_status cf_config_get_master_seed(const cf_config* config, uint64_t* seed);
CF_API cf_status cf_config_set_workers(cf_config* config, int workers);
CF_API cf_status cf_config_set_output_dir(cf_config* config, const char* dir);
CF_API cf_status cf_config_to_json(const cf_config* config, char** json);
CF_API cf_status cf_config_hash(const cf_config* config, uint64_t* hash);

CF_API cf_status cf_stage_parse(const char* name, cf_stage* stage);

/* Runs a pipeline stage. progress may be NULL. */
CF_API cf_status cf_generate(const cf_config* config, cf_stage stage, cf_progress_fn progress, void* user);

/* Timing report as JSON. */
CF_API cf_status cf_bench(const cf_config* config, char** report_json);

/* Scores a COCO results array against COCO ground truth. report_path and
   report_json may each be NULL. */
CF_API cf_status cf_evaluate(const char* gt_path, const char* pred_path, const char* report_path,
                             char** report_json);

/* Thread-safe; running generate/bench calls stop after in-flight samples. */
CF_API void cf_request_cancel(void);
CF_API void cf_reset_cancel(void);

/* Flat template mesh sampled with default ranges. category is "towel",
   "tshirt" or "shorts". */
CF_API cf_status cf_mesh_from_template(const char* category, uint64_t seed, double max_edge, cf_mesh** out);
CF_API cf_status cf_mesh_read_obj(const char* path, cf_mesh** out);
CF_API cf_status cf_mesh_write_obj(const cf_mesh* mesh, const char* path);
CF_API size_t cf_mesh_vertex_count(const cf_mesh* mesh);
CF_API size_t cf_mesh_triangle_count(const cf_mesh* mesh);
/* Copies vertex i into xyz[3]. */
CF_API cf_status cf_mesh_vertex(const cf_mesh* mesh, size_t i, double xyz[3]);
/* Vertex index of a named keypoint. */
CF_API cf_status cf_mesh_keypoint_vertex(const cf_mesh* mesh, const char* name, size_t* index);
CF_API void cf_mesh_free(cf_mesh* mesh);

#ifdef __cplusplus
}
#endif

#endif  // CLOTHFORGE_CLOTHFORGE_H_

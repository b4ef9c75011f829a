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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pipeline/config.h"
#include "render/annotate.h"
#include "render/image.h"

namespace clothforge {

enum class Stage { kMeshes, kDeform, kRender, kAll };
std::optional<Stage> parse_stage(std::string_view name);
const char* to_string(Stage stage);

// Depends only on (master seed, category, id), so counts never shift seeds.
uint64_t sample_seed(uint64_t master_seed, ClothCategory category, int64_t id);

struct SampleRef {
  ClothCategory category = ClothCategory::kTowel;
  int64_t id = 0;
  uint64_t seed = 0;
};

// Categories in fixed order, ids ascending.
std::vector<SampleRef> enumerate_samples(const PipelineConfig& cfg);

struct SamplePaths {
  std::filesystem::path mesh;      // <out>/meshes/<category>/<id>.obj
  std::filesystem::path deformed;  // <out>/deformed/<category>/<id>.obj
  std::filesystem::path image;     // <out>/<category>/images/<id>.png
  std::filesystem::path scene;     // <out>/<category>/scenes/<id>.json
  std::string image_file_name;     // image path relative to the annotations file
};
SamplePaths sample_paths(const std::filesystem::path& out, const SampleRef& s);

// Per-sample stage bodies. Each draws from its own stream derived from the
// sample seed, so running stages separately or together gives the same bytes.
ClothMesh make_sample_mesh(const PipelineConfig& cfg, const SampleRef& s);
DeformResult deform_sample(const PipelineConfig& cfg, const SampleRef& s, const ClothMesh& mesh);

struct RenderedSample {
  Image image;
  AnnotationRecord record;
  Scene scene;
  int attempts = 0;
};
// Re-samples the scene until the cloth is visible; throws generation-failure
// after cfg.max_scene_attempts empty masks.
RenderedSample render_sample(const PipelineConfig& cfg, const SampleRef& s, const ClothMesh& deformed,
                             int render_threads);

// Reduces a mesh to what its OBJ encoding preserves.
ClothMesh obj_round_trip(const ClothMesh& mesh);

// Cooperative cancellation checked between samples.
void request_cancel();
void reset_cancel();
bool cancel_requested();

struct GenerateSummary {
  long samples_total = 0;
  long samples_done = 0;
  bool cancelled = false;
};

using ProgressCallback = std::function<void(long done, long total)>;

// Runs the stage over every sample with cfg.workers threads. Missing staged
// inputs raise stage-order errors before any work starts. Cancellation
// writes outputs for completed samples, then throws kCancelled.
GenerateSummary generate(const PipelineConfig& cfg, Stage stage, const ProgressCallback& progress = {});

// Timing report as JSON (not byte-deterministic).
std::string bench(const PipelineConfig& cfg);

}  // namespace clothforge

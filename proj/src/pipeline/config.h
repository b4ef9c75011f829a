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
#include <map>
#include <string>
#include <vector>

#include "geometry/category.h"
#include "scene/scene.h"
#include "sim/simulator.h"
#include "templates/templates.h"

namespace clothforge {

struct MaterialWeights {
  double uniform = 1.0 / 3;
  double tailored = 1.0 / 3;
  double random_texture = 1.0 / 3;
};

struct MetricConfig {
  double sigma = 4.0;  // px
  std::vector<double> thresholds = {2.0, 4.0, 8.0};
  double decode_threshold = 0.01;
};

struct BenchConfig {
  int samples = 5;             // per stage, single-threaded
  int parallel_samples = 20;   // end-to-end samples for the speedup run
  int parallel_workers = 4;
};

struct PipelineConfig {
  static constexpr int kVersion = 1;

  uint64_t master_seed = 0;
  std::string output_dir = "out";
  int workers = 1;
  int render_threads = 1;  // per sample
  std::map<ClothCategory, int> counts;
  double max_edge = 0.01;  // m
  std::map<ClothCategory, ParamRanges> templates;
  DeformConfig deform;
  MaterialWeights materials;
  SceneConfig scene;
  int max_scene_attempts = 10;  // re-sample scenes whose cloth mask is empty
  MetricConfig metrics;
  BenchConfig bench;
  bool write_scene_json = false;

  PipelineConfig();

  // Throws config errors; the location is "<source>#<json pointer>".
  static PipelineConfig parse(const std::string& text, const std::string& source = "<config>");
  static PipelineConfig load(const std::string& path);

  void validate(const std::string& source = "<config>") const;

  // Every field, stable key order. Execution-only fields (output_dir,
  // workers, render_threads, bench) are omitted when canonical is set.
  std::string to_json(bool canonical = false) const;
  // FNV-1a over the canonical JSON.
  uint64_t hash() const;
};

std::string hex64(uint64_t v);

}  // namespace clothforge

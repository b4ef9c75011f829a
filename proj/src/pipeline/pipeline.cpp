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

#include "pipeline/pipeline.h"

#include <sys/utsname.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <thread>

#include "common/error.h"
#include "common/rng.h"
#include "geometry/obj_io.h"
#include "render/render.h"
#include "scene/scene_json.h"

namespace clothforge {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::atomic<bool> g_cancel{false};

std::string padded_id(int64_t id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06lld", static_cast<long long>(id));
  return buf;
}

std::string sample_label(const SampleRef& s) { return std::string(to_string(s.category)) + "/" + padded_id(s.id); }

Rng stage_rng(const SampleRef& s, std::string_view stage) { return Rng(mix_seed(s.seed, fnv1a64(stage))); }

MaterialProcedure pick_material(const MaterialWeights& w, Rng& rng) {
  const double u = rng.uniform();
  if (u < w.uniform) return MaterialProcedure::kUniformColor;
  if (u < w.uniform + w.tailored) return MaterialProcedure::kTailored;
  // Guard against rounding when the last weight is zero.
  if (w.random_texture == 0) return w.tailored > 0 ? MaterialProcedure::kTailored : MaterialProcedure::kUniformColor;
  return MaterialProcedure::kRandomTexture;
}

// Runs task(i) for i in [0, n) on up to `workers` threads. Returns the first
// failure in index order, if any; later tasks are skipped after a failure.
std::exception_ptr run_pool(size_t n, int workers, const std::function<void(size_t)>& task) {
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed.store(true);
      }
    }
  };
  const int threads = static_cast<int>(std::min<size_t>(n, static_cast<size_t>(std::max(workers, 1))));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) return e;
  return nullptr;
}

template <typename F>
auto with_location(const SampleRef& s, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    if (!e.location().empty()) throw;
    throw Error(e.code(), e.what(), sample_label(s));
  }
}

void write_manifest(const PipelineConfig& cfg, Stage stage, const std::vector<SampleRef>& samples,
                    const std::vector<char>& done, const std::vector<int>& attempts, bool complete) {
  Json j;
  j["format"] = "clothforge-manifest";
  j["version"] = 1;
  j["config_hash"] = hex64(cfg.hash());
  j["master_seed"] = hex64(cfg.master_seed);
  j["stage"] = to_string(stage);
  j["complete"] = complete;
  Json counts = Json::object();
  for (ClothCategory c : kAllCategories) counts[std::string(to_string(c))] = cfg.counts.at(c);
  j["counts"] = counts;
  Json list = Json::array();
  const fs::path out = cfg.output_dir;
  for (size_t i = 0; i < samples.size(); ++i) {
    if (!done[i]) continue;
    const SampleRef& s = samples[i];
    const SamplePaths p = sample_paths(out, s);
    Json files = Json::array();
    auto rel = [&](const fs::path& f) { return fs::relative(f, out).generic_string(); };
    if (stage == Stage::kMeshes || stage == Stage::kAll) files.push_back(rel(p.mesh));
    if (stage == Stage::kDeform || stage == Stage::kAll) files.push_back(rel(p.deformed));
    if (stage == Stage::kRender || stage == Stage::kAll) {
      files.push_back(rel(p.image));
      if (cfg.write_scene_json) files.push_back(rel(p.scene));
    }
    Json e = {{"category", std::string(to_string(s.category))}, {"id", s.id}, {"seed", hex64(s.seed)}};
    if (stage == Stage::kRender || stage == Stage::kAll) e["scene_attempts"] = attempts[i];
    e["files"] = files;
    list.push_back(e);
  }
  j["samples"] = list;
  write_file_atomic(out / "manifest.json", j.dump(2) + "\n");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string cpu_model() {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) return line.substr(line.find_first_not_of(' ', colon + 1));
    }
  return "unknown";
}

}  // namespace

std::optional<Stage> parse_stage(std::string_view name) {
  if (name == "meshes") return Stage::kMeshes;
  if (name == "deform") return Stage::kDeform;
  if (name == "render") return Stage::kRender;
  if (name == "all") return Stage::kAll;
  return std::nullopt;
}

const char* to_string(Stage stage) {
  switch (stage) {
    case Stage::kMeshes:
      return "meshes";
    case Stage::kDeform:
      return "deform";
    case Stage::kRender:
      return "render";
    case Stage::kAll:
      return "all";
  }
  return "?";
}

uint64_t sample_seed(uint64_t master_seed, ClothCategory category, int64_t id) {
  return mix_seed(mix_seed(master_seed, fnv1a64(to_string(category))), static_cast<uint64_t>(id));
}

std::vector<SampleRef> enumerate_samples(const PipelineConfig& cfg) {
  std::vector<SampleRef> out;
  for (ClothCategory c : kAllCategories)
    for (int64_t id = 0; id < cfg.counts.at(c); ++id) out.push_back({c, id, sample_seed(cfg.master_seed, c, id)});
  return out;
}

SamplePaths sample_paths(const fs::path& out, const SampleRef& s) {
  const std::string cat(to_string(s.category));
  const std::string id = padded_id(s.id);
  SamplePaths p;
  p.mesh = out / "meshes" / cat / (id + ".obj");
  p.deformed = out / "deformed" / cat / (id + ".obj");
  p.image = out / cat / "images" / (id + ".png");
  p.scene = out / cat / "scenes" / (id + ".json");
  p.image_file_name = "images/" + id + ".png";
  return p;
}

ClothMesh obj_round_trip(const ClothMesh& mesh) { return parse_obj(write_obj(mesh)); }

ClothMesh make_sample_mesh(const PipelineConfig& cfg, const SampleRef& s) {
  Rng rng = stage_rng(s, "meshes");
  const ClothTemplate tmpl = sample_template(s.category, cfg.templates.at(s.category), rng);
  return template_to_mesh(tmpl, cfg.max_edge);
}

DeformResult deform_sample(const PipelineConfig& cfg, const SampleRef& s, const ClothMesh& mesh) {
  Rng rng = stage_rng(s, "deform");
  return deform_procedure(mesh, cfg.deform, rng);
}

RenderedSample render_sample(const PipelineConfig& cfg, const SampleRef& s, const ClothMesh& deformed,
                             int render_threads) {
  Rng rng = stage_rng(s, "render");
  const MaterialProcedure procedure = pick_material(cfg.materials, rng);
  for (int attempt = 1; attempt <= cfg.max_scene_attempts; ++attempt) {
    Scene scene = compose_scene(deformed, procedure, cfg.scene, rng);
    const Bvh bvh = build_scene_bvh(scene);
    const VisibleMask visible = visible_mask(scene, bvh, render_threads);
    if (visible.bbox.empty) continue;
    RenderedSample r;
    r.image = render(scene, bvh, render_threads);
    r.record = annotate(scene, bvh, visible, s.id + 1, sample_paths("", s).image_file_name);
    r.scene = std::move(scene);
    r.attempts = attempt;
    return r;
  }
  throw Error(ErrorCode::kGenerationFailure,
              "cloth not visible after " + std::to_string(cfg.max_scene_attempts) + " scene attempts",
              sample_label(s));
}

void request_cancel() { g_cancel.store(true); }
void reset_cancel() { g_cancel.store(false); }
bool cancel_requested() { return g_cancel.load(); }

GenerateSummary generate(const PipelineConfig& cfg, Stage stage, const ProgressCallback& progress) {
  cfg.validate();
  const fs::path out = cfg.output_dir;
  const std::vector<SampleRef> samples = enumerate_samples(cfg);

  for (const SampleRef& s : samples) {
    const SamplePaths p = sample_paths(out, s);
    if (stage == Stage::kDeform && !fs::exists(p.mesh))
      throw Error(ErrorCode::kStageOrder, "staged mesh missing; run the meshes stage first", p.mesh.string());
    if (stage == Stage::kRender && !fs::exists(p.deformed))
      throw Error(ErrorCode::kStageOrder, "deformed mesh missing; run the deform stage first", p.deformed.string());
  }
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create output directory: " + ec.message(), out.string());
  fs::remove(out / "manifest.json", ec);

  const bool renders = stage == Stage::kRender || stage == Stage::kAll;
  std::vector<char> done(samples.size(), 0);
  std::vector<int> attempts(samples.size(), 0);
  std::vector<AnnotationRecord> records(samples.size());
  std::atomic<long> finished{0};
  std::mutex progress_mutex;

  auto task = [&](size_t i) {
    if (cancel_requested()) return;
    const SampleRef& s = samples[i];
    const SamplePaths p = sample_paths(out, s);
    with_location(s, [&] {
      ClothMesh mesh;
      if (stage == Stage::kMeshes || stage == Stage::kAll) {
        const std::string text = write_obj(make_sample_mesh(cfg, s));
        write_file_atomic(p.mesh, text);
        mesh = parse_obj(text, p.mesh.string());
      }
      if (stage == Stage::kDeform) mesh = load_obj(p.mesh);
      if (stage == Stage::kDeform || stage == Stage::kAll) {
        const std::string text = write_obj(deform_sample(cfg, s, mesh).mesh);
        write_file_atomic(p.deformed, text);
        mesh = parse_obj(text, p.deformed.string());
      }
      if (stage == Stage::kRender) mesh = load_obj(p.deformed);
      if (renders) {
        RenderedSample r = render_sample(cfg, s, mesh, cfg.render_threads);
        write_png(r.image, p.image);
        if (cfg.write_scene_json) write_file_atomic(p.scene, scene_to_json(r.scene));
        records[i] = std::move(r.record);
        attempts[i] = r.attempts;
      }
      return 0;
    });
    done[i] = 1;
    const long n = ++finished;
    if (progress) {
      std::lock_guard<std::mutex> lock(progress_mutex);
      progress(n, static_cast<long>(samples.size()));
    }
  };
  if (std::exception_ptr e = run_pool(samples.size(), cfg.workers, task)) std::rethrow_exception(e);

  GenerateSummary summary;
  summary.samples_total = static_cast<long>(samples.size());
  summary.samples_done = finished.load();
  summary.cancelled = summary.samples_done < summary.samples_total;

  if (renders) {
    for (ClothCategory c : kAllCategories) {
      if (cfg.counts.at(c) == 0) continue;
      CocoDataset ds;
      ds.categories = {c};
      for (size_t i = 0; i < samples.size(); ++i)
        if (done[i] && samples[i].category == c) ds.records.push_back(records[i]);
      write_coco(ds, out / std::string(to_string(c)) / "annotations.json");
    }
  }
  write_manifest(cfg, stage, samples, done, attempts, !summary.cancelled);
  if (summary.cancelled)
    throw Error(ErrorCode::kCancelled,
                "cancelled after " + std::to_string(summary.samples_done) + " of " +
                    std::to_string(summary.samples_total) + " samples; completed outputs were written",
                out.string());
  return summary;
}

std::string bench(const PipelineConfig& cfg) {
  cfg.validate();
  const int n = cfg.bench.samples;
  std::vector<SampleRef> refs;
  for (int i = 0; i < std::max(n, cfg.bench.parallel_samples); ++i) {
    const ClothCategory c = kAllCategories[static_cast<size_t>(i) % std::size(kAllCategories)];
    refs.push_back({c, i / 3, sample_seed(cfg.master_seed, c, i / 3)});
  }

  std::vector<double> t_mesh, t_deform, t_render;
  for (int i = 0; i < n; ++i) {
    if (cancel_requested()) throw Error(ErrorCode::kCancelled, "bench cancelled");
    auto t0 = std::chrono::steady_clock::now();
    const ClothMesh mesh = obj_round_trip(make_sample_mesh(cfg, refs[i]));
    t_mesh.push_back(seconds_since(t0));
    t0 = std::chrono::steady_clock::now();
    const ClothMesh deformed = obj_round_trip(deform_sample(cfg, refs[i], mesh).mesh);
    t_deform.push_back(seconds_since(t0));
    t0 = std::chrono::steady_clock::now();
    const RenderedSample r = render_sample(cfg, refs[i], deformed, 1);
    (void)encode_png(r.image);
    t_render.push_back(seconds_since(t0));
  }

  auto end_to_end = [&](int workers) {
    const auto t0 = std::chrono::steady_clock::now();
    auto task = [&](size_t i) {
      if (cancel_requested()) return;
      const ClothMesh mesh = obj_round_trip(make_sample_mesh(cfg, refs[i]));
      const ClothMesh deformed = obj_round_trip(deform_sample(cfg, refs[i], mesh).mesh);
      (void)encode_png(render_sample(cfg, refs[i], deformed, 1).image);
    };
    if (auto e = run_pool(static_cast<size_t>(cfg.bench.parallel_samples), workers, task)) std::rethrow_exception(e);
    if (cancel_requested()) throw Error(ErrorCode::kCancelled, "bench cancelled");
    return seconds_since(t0);
  };
  const double serial = end_to_end(1);
  const double parallel = end_to_end(cfg.bench.parallel_workers);

  utsname u{};
  uname(&u);
  Json j;
  j["machine"] = {{"cpu", cpu_model()},
                  {"hardware_threads", std::thread::hardware_concurrency()},
                  {"os", std::string(u.sysname) + " " + u.release},
                  {"arch", u.machine},
                  {"compiler", __VERSION__}};
  j["image"] = {{"width", cfg.scene.intrinsics.width}, {"height", cfg.scene.intrinsics.height}};
  auto stage_json = [](const std::vector<double>& t) { return Json{{"median_s", median(t)}, {"samples_s", t}}; };
  j["single_thread"] = {{"samples", n},
                        {"meshes", stage_json(t_mesh)},
                        {"deform", stage_json(t_deform)},
                        {"render", stage_json(t_render)}};
  j["parallel"] = {{"samples", cfg.bench.parallel_samples},
                   {"workers", cfg.bench.parallel_workers},
                   {"serial_wall_s", serial},
                   {"parallel_wall_s", parallel},
                   {"speedup", serial / parallel}};
  return j.dump(2) + "\n";
}

}  // namespace clothforge

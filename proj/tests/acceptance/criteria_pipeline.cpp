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

#include <rapidjson/document.h>
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "criteria.h"
#include "geometry/obj_io.h"
#include "oracles.h"
#include "pipeline/pipeline.h"
#include "render/render.h"

namespace clothforge::acceptance {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[1024];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const Context& ctx, const std::string& args, std::string* output = nullptr) {
  const std::string cmd = ctx.cli + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return -1;
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), p)) > 0) out.append(buf, n);
  const int status = pclose(p);
  if (output) *output = out;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const fs::path& dir, const std::string& name, int towel, int tshirt, int shorts) {
  fs::create_directories(dir);
  const fs::path p = dir / (name + ".json");
  std::ofstream(p) << R"({"master_seed": "0x5eed", "output_dir": ")" << (dir / name).string()
                   << R"(", "counts": {"towel": )" << towel << R"(, "tshirt": )" << tshirt << R"(, "shorts": )"
                   << shorts << "}}\n";
  return p;
}

const char* kCategoryNames[] = {"towel", "tshirt", "shorts"};

// Per-sample files relative to the output root.
std::vector<std::string> sample_files(const std::string& cat, int id) {
  char name[32];
  std::snprintf(name, sizeof(name), "%06d", id);
  return {cat + "/images/" + name + ".png", "meshes/" + cat + "/" + name + ".obj",
          "deformed/" + cat + "/" + name + ".obj"};
}

bool parse_json(const fs::path& p, rapidjson::Document& doc) {
  const std::string text = slurp(p);
  doc.Parse(text.c_str(), text.size());
  return !doc.HasParseError();
}

}  // namespace

// Two identical runs give identical indexes; growing one count keeps every
// earlier sample byte-identical.
Outcome determinism(const Context& ctx) {
  const fs::path dir = ctx.work / "determinism";
  fs::remove_all(dir);
  const fs::path a = write_config(dir, "a", 2, 2, 2), b = write_config(dir, "b", 2, 2, 2),
                 c = write_config(dir, "c", 3, 2, 2);
  for (const fs::path& cfg : {a, b, c}) {
    std::string out;
    const int code = run_cli(ctx, "generate --stage all --config " + cfg.string(), &out);
    if (code != 0) return {false, fmt("generate %s exited %d: %s", cfg.filename().c_str(), code, out.c_str())};
  }
  long compared = 0, differ = 0;
  std::string first_diff;
  auto same = [&](const fs::path& x, const fs::path& y, const std::string& label) {
    ++compared;
    if (!fs::exists(x) || !fs::exists(y) || slurp(x) != slurp(y)) {
      ++differ;
      if (first_diff.empty()) first_diff = label;
    }
  };
  same(dir / "a/manifest.json", dir / "b/manifest.json", "manifest.json");
  for (const char* cat : kCategoryNames) {
    const std::string f = std::string(cat) + "/annotations.json";
    same(dir / "a" / f, dir / "b" / f, f);
    for (int id = 0; id < 2; ++id)
      for (const std::string& s : sample_files(cat, id)) same(dir / "a" / s, dir / "c" / s, s + " (count change)");
  }
  // Earlier records in the grown category are unchanged.
  long records = 0;
  rapidjson::Document ja, jc;
  if (!parse_json(dir / "a/towel/annotations.json", ja) || !parse_json(dir / "c/towel/annotations.json", jc))
    return {false, "annotations.json failed to parse"};
  for (const char* key : {"images", "annotations"}) {
    const auto& xa = ja[key];
    const auto& xc = jc[key];
    if (xc.Size() != 3 || xa.Size() != 2) {
      ++differ;
      first_diff = "record count";
      continue;
    }
    for (rapidjson::SizeType i = 0; i < xa.Size(); ++i) {
      ++records;
      if (xa[i] != xc[i]) {
        ++differ;
        if (first_diff.empty()) first_diff = std::string("towel ") + key;
      }
    }
  }
  for (const char* cat : {"tshirt", "shorts"}) {
    const std::string f = std::string(cat) + "/annotations.json";
    same(dir / "a" / f, dir / "c" / f, f + " (count change)");
  }
  fs::remove_all(dir);
  return {differ == 0, fmt("%ld file comparisons and %ld towel records, %ld differ%s%s", compared, records, differ,
                           first_diff.empty() ? "" : ", first: ", first_diff.c_str())};
}

// Single-threaded medians and 4-worker speedup from the bench command.
Outcome throughput(const Context& ctx) {
  constexpr double kDeformMedian = 10, kRenderMedian = 10, kSpeedup = 2;
  const fs::path dir = ctx.work / "throughput";
  fs::remove_all(dir);
  const fs::path cfg = write_config(dir, "bench", 10, 10, 10);
  const fs::path report = dir / "bench.json";
  std::string out;
  const int code = run_cli(ctx, "bench --config " + cfg.string() + " --out " + report.string(), &out);
  if (code != 0) return {false, fmt("bench exited %d: %s", code, out.c_str())};
  rapidjson::Document doc;
  if (!parse_json(report, doc) || !doc.IsObject()) return {false, "bench report failed to parse"};
  const auto& st = doc["single_thread"];
  const auto& par = doc["parallel"];
  const double deform = st["deform"]["median_s"].GetDouble();
  const double render = st["render"]["median_s"].GetDouble();
  const double speedup = par["speedup"].GetDouble();
  const int workers = par["workers"].GetInt();
  const unsigned hw = doc["machine"]["hardware_threads"].GetUint();
  const bool pass = deform <= kDeformMedian && render <= kRenderMedian && workers == 4 && speedup >= kSpeedup;
  fs::remove_all(dir);
  return {pass, fmt("deform median %.2f s (limit %.0f), render median %.2f s (limit %.0f), speedup %.2fx with %d "
                    "workers (need >= %.0fx) on %u hardware threads",
                    deform, kDeformMedian, render, kRenderMedian, speedup, workers, kSpeedup, hw)};
}

namespace {

struct SmokeStats {
  long images = 0, annotations = 0, keypoints_visible = 0, keypoints_hidden = 0, demoted = 0;
  long failures = 0;
  std::string first;
  void fail(const std::string& what) {
    if (failures++ == 0) first = what;
  }
};

bool png_size(const fs::path& p, uint32_t& w, uint32_t& h) {
  const std::string d = slurp(p);
  static const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (d.size() < 24 || d.compare(0, 8, reinterpret_cast<const char*>(sig), 8) != 0 || d.compare(12, 4, "IHDR") != 0)
    return false;
  auto be = [&](size_t o) {
    return (uint32_t(uint8_t(d[o])) << 24) | (uint32_t(uint8_t(d[o + 1])) << 16) |
           (uint32_t(uint8_t(d[o + 2])) << 8) | uint32_t(uint8_t(d[o + 3]));
  };
  w = be(16);
  h = be(20);
  return true;
}

// Structure and record invariants of one category's annotations.json.
void check_coco(const fs::path& root, ClothCategory cat, int count, SmokeStats& st,
                std::vector<std::vector<double>>& keypoints) {
  const std::string cname = kCategoryNames[static_cast<int>(cat)];
  rapidjson::Document doc;
  if (!parse_json(root / cname / "annotations.json", doc) || !doc.IsObject()) return st.fail(cname + ": parse");
  for (const char* key : {"images", "annotations", "categories"})
    if (!doc.HasMember(key) || !doc[key].IsArray()) return st.fail(cname + ": missing " + key);
  const auto& images = doc["images"];
  const auto& anns = doc["annotations"];
  const auto& cats = doc["categories"];
  const size_t nk = keypoint_names(cat).size();
  if (images.Size() != static_cast<unsigned>(count) || anns.Size() != images.Size())
    return st.fail(cname + ": record count");
  if (cats.Size() != 1 || !cats[0]["id"].IsInt() || cats[0]["id"].GetInt() != coco_category_id(cat) ||
      !cats[0]["keypoints"].IsArray() || cats[0]["keypoints"].Size() != nk || !cats[0]["skeleton"].IsArray())
    return st.fail(cname + ": categories");
  for (rapidjson::SizeType k = 0; k < nk; ++k)
    if (std::string(cats[0]["keypoints"][k].GetString()) != keypoint_names(cat)[k])
      return st.fail(cname + ": keypoint names");

  for (rapidjson::SizeType i = 0; i < images.Size(); ++i) {
    const auto& im = images[i];
    const auto& an = anns[i];
    const std::string where = cname + " record " + std::to_string(i);
    ++st.images;
    ++st.annotations;
    if (!im["id"].IsInt64() || im["id"].GetInt64() != static_cast<int64_t>(i) + 1 || !im["file_name"].IsString() ||
        !im["width"].IsInt() || !im["height"].IsInt()) {
      st.fail(where + ": image fields");
      continue;
    }
    const int w = im["width"].GetInt(), h = im["height"].GetInt();
    uint32_t pw = 0, ph = 0;
    if (!png_size(root / cname / im["file_name"].GetString(), pw, ph) || pw != uint32_t(w) || ph != uint32_t(h))
      st.fail(where + ": png header");
    if (!an["image_id"].IsInt64() || an["image_id"].GetInt64() != im["id"].GetInt64() ||
        an["category_id"].GetInt() != coco_category_id(cat) || an["iscrowd"].GetInt() != 0) {
      st.fail(where + ": annotation ids");
      continue;
    }
    const auto& seg = an["segmentation"];
    if (!seg.IsObject() || !seg["size"].IsArray() || seg["size"].Size() != 2 || seg["size"][0].GetInt() != h ||
        seg["size"][1].GetInt() != w || !seg["counts"].IsArray()) {
      st.fail(where + ": segmentation");
      continue;
    }
    std::vector<uint32_t> counts;
    for (const auto& v : seg["counts"].GetArray()) counts.push_back(v.GetUint());
    bool ok = false;
    const std::vector<uint8_t> mask = oracle::decode_rle(counts, w, h, ok);
    if (!ok) {
      st.fail(where + ": rle");
      continue;
    }
    long area = 0;
    int x0 = w, y0 = h, x1 = -1, y1 = -1;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (mask[static_cast<size_t>(y) * w + x]) {
          ++area;
          x0 = std::min(x0, x);
          y0 = std::min(y0, y);
          x1 = std::max(x1, x);
          y1 = std::max(y1, y);
        }
    const auto& bb = an["bbox"];
    if (area == 0) st.fail(where + ": empty mask");
    if (an["area"].GetInt64() != area) st.fail(where + ": area");
    if (bb.Size() != 4 || bb[0].GetDouble() != x0 || bb[1].GetDouble() != y0 || bb[2].GetDouble() != x1 - x0 + 1 ||
        bb[3].GetDouble() != y1 - y0 + 1)
      st.fail(where + ": bbox not tight");
    const auto& kps = an["keypoints"];
    if (!kps.IsArray() || kps.Size() != 3 * nk) {
      st.fail(where + ": keypoint length");
      continue;
    }
    std::vector<double> flat;
    int visible = 0;
    for (rapidjson::SizeType k = 0; k < nk; ++k) {
      const double x = kps[3 * k].GetDouble(), y = kps[3 * k + 1].GetDouble();
      const int v = kps[3 * k + 2].GetInt();
      flat.insert(flat.end(), {x, y, static_cast<double>(v)});
      if (v == 2) {
        ++visible;
        ++st.keypoints_visible;
        if (!(x >= 0 && y >= 0 && x < w && y < h)) st.fail(where + ": keypoint outside image");
        if (!(x >= x0 - 1 && x <= x1 + 2 && y >= y0 - 1 && y <= y1 + 2)) st.fail(where + ": keypoint outside bbox");
      } else if (v == 0) {
        ++st.keypoints_hidden;
        if (x != 0 || y != 0) st.fail(where + ": hidden keypoint with coordinates");
      } else {
        st.fail(where + ": visibility flag");
      }
    }
    if (an["num_keypoints"].GetInt() != visible) st.fail(where + ": num_keypoints");
    keypoints.push_back(std::move(flat));
  }
}

}  // namespace

// 50 samples per category through the CLI, checked with an independent JSON
// reader, PNG header parsing and a brute-force visibility raycast.
Outcome end_to_end_smoke(const Context& ctx) {
  constexpr int kCount = 50;
  const auto t0 = Clock::now();
  const fs::path dir = ctx.work / "smoke";
  fs::remove_all(dir);
  const fs::path cfg_path = write_config(dir, "out", kCount, kCount, kCount);
  std::string out;
  const int code = run_cli(ctx, "generate --stage all --config " + cfg_path.string(), &out);
  if (code != 0) return {false, fmt("generate exited %d: %s", code, out.c_str())};
  const double gen_s = since(t0);
  const fs::path root = dir / "out";

  SmokeStats st;
  std::map<ClothCategory, std::vector<std::vector<double>>> kps;
  for (ClothCategory c : kAllCategories) check_coco(root, c, kCount, st, kps[c]);

  // Rebuild every scene from the staged mesh and check visible keypoints
  // against an all-triangle 2-ring oracle.
  const PipelineConfig cfg = PipelineConfig::load(cfg_path.string());
  long raycast_checked = 0;
  for (const SampleRef& s : enumerate_samples(cfg)) {
    const auto& recs = kps[s.category];
    if (static_cast<size_t>(s.id) >= recs.size()) continue;
    const std::vector<double>& flat = recs[s.id];
    const std::string where =
        std::string(kCategoryNames[static_cast<int>(s.category)]) + " sample " + std::to_string(s.id);
    const RenderedSample rs = render_sample(cfg, s, load_obj(sample_paths(root, s).deformed), 1);
    const Scene& scene = rs.scene;
    std::vector<oracle::Tri> tris;
    for (const BvhObject& o : scene.objects())
      for (size_t i = 0; i < o.triangles.size(); ++i) tris.push_back({o.triangles[i], o.id, static_cast<uint32_t>(i)});
    const Camera& cam = scene.camera;
    const oracle::PinholeView view =
        oracle::make_view(cam.position, cam.look_at, cam.up, cam.intrinsics.focal_px, cam.intrinsics.principal_x(),
                          cam.intrinsics.principal_y(), cam.intrinsics.width, cam.intrinsics.height);
    std::vector<std::array<int, 3>> mesh_tris;
    for (const Triangle& t : scene.cloth.triangles) mesh_tris.push_back({t[0], t[1], t[2]});

    struct Phys {
      double x, y;
      bool visible;
      bool used = false;
    };
    std::vector<Phys> phys;
    for (const auto& [name, vi] : scene.cloth.keypoint_vertex_map) {
      const Projection p = cam.project(scene.cloth.vertices[vi]);
      phys.push_back({p.x, p.y, oracle::two_ring_visible(tris, view, scene.cloth.vertices, mesh_tris, vi, kRayEpsilon)});
    }
    const BBox& b = rs.record.bbox;
    for (size_t k = 0; k + 2 < flat.size(); k += 3) {
      if (flat[k + 2] != 2) continue;
      ++raycast_checked;
      Phys* match = nullptr;
      for (Phys& p : phys)
        if (!p.used && std::abs(p.x - flat[k]) < 1e-6 && std::abs(p.y - flat[k + 1]) < 1e-6) match = &p;
      if (!match) {
        st.fail(where + ": visible keypoint matches no projected keypoint");
        continue;
      }
      match->used = true;
      if (!match->visible) st.fail(where + ": visible keypoint occluded by the oracle");
    }
    for (const Phys& p : phys) {
      if (p.used || !p.visible) continue;
      const bool inside = p.x >= 0 && p.y >= 0 && p.x < cam.intrinsics.width && p.y < cam.intrinsics.height &&
                          p.x >= b.x - 1 && p.x <= b.x + b.w + 1 && p.y >= b.y - 1 && p.y <= b.y + b.h + 1;
      if (inside)
        st.fail(where + ": oracle-visible keypoint exported as hidden");
      else
        ++st.demoted;
    }
  }
  fs::remove_all(dir);
  const double s = since(t0);
  return {st.failures == 0 && st.images == 3 * kCount,
          fmt("%ld images, %ld annotations, %ld visible / %ld hidden keypoints (%ld demoted at the frame or bbox), "
              "%ld raycast-checked, %ld violations%s%s; generate %.0f s, total %.0f s",
              st.images, st.annotations, st.keypoints_visible, st.keypoints_hidden, st.demoted, raycast_checked,
              st.failures, st.failures ? ", first: " : "", st.first.c_str(), gen_s, s)};
}

}  // namespace clothforge::acceptance

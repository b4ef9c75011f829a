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

#include "metrics/metrics.h"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>

#include "common/error.h"
#include "geometry/category.h"
#include "geometry/obj_io.h"

namespace clothforge {
namespace {

using Json = nlohmann::ordered_json;

struct Scored {
  double score;
  size_t image;
  size_t index;
  const Detection* det;
};

double interpolated_ap(const std::vector<bool>& tp, long num_gt) {
  const size_t n = tp.size();
  std::vector<double> precision(n);
  std::vector<long> hits(n);
  long count = 0;
  for (size_t k = 0; k < n; ++k) {
    count += tp[k];
    hits[k] = count;
    precision[k] = static_cast<double>(count) / static_cast<double>(k + 1);
  }
  // Precision envelope from the right.
  for (size_t k = n; k-- > 1;) precision[k - 1] = std::max(precision[k - 1], precision[k]);
  double sum = 0;
  size_t k = 0;
  for (int i = 0; i <= 100; ++i) {
    // First rank whose recall reaches i/100; compared in integers.
    while (k < n && 100 * hits[k] < static_cast<long>(i) * num_gt) ++k;
    if (k == n) break;
    sum += precision[k];
  }
  return sum / 101.0;
}

}  // namespace

Heatmap encode_heatmap(const std::vector<Vec2>& keypoints, double sigma, int width, int height) {
  if (!(sigma > 0)) throw_invalid("heatmap sigma must be positive");
  if (width <= 0 || height <= 0) throw_invalid("heatmap size must be positive");
  Heatmap h{width, height, std::vector<double>(static_cast<size_t>(width) * height, 0.0)};
  const double inv = 1.0 / (2 * sigma * sigma);
  for (const Vec2& k : keypoints)
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const double v = std::exp(-((x - k.x) * (x - k.x) + (y - k.y) * (y - k.y)) * inv);
        double& cell = h.values[static_cast<size_t>(y) * width + x];
        cell = std::max(cell, v);
      }
  return h;
}

std::vector<Detection> decode_heatmap(const Heatmap& h, double threshold) {
  const int w = h.width, ht = h.height;
  auto idx = [w](int x, int y) { return static_cast<size_t>(y) * w + x; };
  // 0 = unvisited, 1 = candidate, 2 = rejected/emitted
  std::vector<uint8_t> state(h.values.size(), 0);
  std::vector<std::pair<size_t, Detection>> found;
  std::vector<size_t> stack, plateau;
  for (int y = 0; y < ht; ++y)
    for (int x = 0; x < w; ++x) {
      const size_t i = idx(x, y);
      const double v = h.values[i];
      if (state[i] != 0 || v < threshold) continue;
      // Collect the 8-connected plateau of equal values containing this pixel.
      plateau.clear();
      stack.assign(1, i);
      state[i] = 1;
      bool is_max = true;
      while (!stack.empty()) {
        const size_t p = stack.back();
        stack.pop_back();
        plateau.push_back(p);
        const int px = static_cast<int>(p % w), py = static_cast<int>(p / w);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int qx = px + dx, qy = py + dy;
            if ((dx == 0 && dy == 0) || qx < 0 || qy < 0 || qx >= w || qy >= ht) continue;
            const size_t q = idx(qx, qy);
            const double u = h.values[q];
            if (u > v) is_max = false;
            if (u == v && state[q] == 0) {
              state[q] = 1;
              stack.push_back(q);
            }
          }
      }
      for (size_t p : plateau) state[p] = 2;
      if (!is_max) continue;
      const size_t first = *std::min_element(plateau.begin(), plateau.end());
      found.push_back({first, {static_cast<double>(first % w), static_cast<double>(first / w), v}});
    }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    if (a.second.score != b.second.score) return a.second.score > b.second.score;
    return a.first < b.first;
  });
  std::vector<Detection> out;
  out.reserve(found.size());
  for (const auto& f : found) out.push_back(f.second);
  return out;
}

ApResult average_precision(const std::vector<ImageKeypoints>& images, double threshold) {
  ApResult r;
  std::vector<Scored> all;
  for (size_t i = 0; i < images.size(); ++i) {
    r.num_gt += static_cast<long>(images[i].ground_truth.size());
    for (size_t k = 0; k < images[i].detections.size(); ++k)
      all.push_back({images[i].detections[k].score, i, k, &images[i].detections[k]});
  }
  r.num_detections = static_cast<long>(all.size());
  if (r.num_gt == 0) {
    r.ap = all.empty() ? 1.0 : 0.0;
    return r;
  }
  std::stable_sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });
  std::vector<std::vector<bool>> matched(images.size());
  for (size_t i = 0; i < images.size(); ++i) matched[i].assign(images[i].ground_truth.size(), false);
  std::vector<bool> tp(all.size(), false);
  for (size_t k = 0; k < all.size(); ++k) {
    const auto& gt = images[all[k].image].ground_truth;
    auto& used = matched[all[k].image];
    int best = -1;
    double best_d = 0;
    for (size_t g = 0; g < gt.size(); ++g) {
      if (used[g]) continue;
      const double d = std::hypot(all[k].det->x - gt[g].x, all[k].det->y - gt[g].y);
      if (d <= threshold && (best < 0 || d < best_d)) {
        best = static_cast<int>(g);
        best_d = d;
      }
    }
    if (best >= 0) {
      used[best] = true;
      tp[k] = true;
      ++r.true_positives;
    }
  }
  r.ap = interpolated_ap(tp, r.num_gt);
  return r;
}

double average_precision(const std::vector<Detection>& detections, const std::vector<Vec2>& ground_truth,
                         double threshold) {
  return average_precision(std::vector<ImageKeypoints>{{detections, ground_truth}}, threshold).ap;
}

AkdResult average_keypoint_distance(const std::vector<std::vector<ImageKeypoints>>& per_type) {
  AkdResult r;
  double sum = 0;
  for (const auto& images : per_type)
    for (const ImageKeypoints& img : images) {
      if (img.detections.empty()) {
        r.skipped += static_cast<long>(img.ground_truth.size());
        continue;
      }
      const Detection* best = &img.detections[0];
      for (const Detection& d : img.detections)
        if (d.score > best->score) best = &d;
      for (const Vec2& g : img.ground_truth) {
        sum += std::hypot(best->x - g.x, best->y - g.y);
        ++r.pairs;
      }
    }
  r.defined = r.pairs > 0;
  r.value = r.defined ? sum / static_cast<double>(r.pairs) : 0.0;
  return r;
}

EvalReport evaluate(const std::map<std::string, std::vector<ImageKeypoints>>& data,
                    const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw_invalid("at least one threshold is required");
  for (double t : thresholds)
    if (!(t > 0)) throw_invalid("thresholds must be positive");
  EvalReport rep;
  rep.thresholds = thresholds;
  std::vector<std::vector<ImageKeypoints>> per_type;
  double sum = 0;
  long terms = 0;
  for (const auto& [name, images] : data) {
    if (rep.images == 0) rep.images = static_cast<long>(images.size());
    TypeReport t;
    long gt = 0;
    for (const auto& img : images) {
      gt += static_cast<long>(img.ground_truth.size());
      rep.detections += static_cast<long>(img.detections.size());
    }
    rep.visible_gt_keypoints += gt;
    t.included = gt > 0;
    for (double thr : thresholds) {
      t.ap[thr] = average_precision(images, thr);
      if (t.included) {
        sum += t.ap[thr].ap;
        ++terms;
      }
    }
    rep.types[name] = std::move(t);
    per_type.push_back(images);
  }
  if (terms > 0) rep.map = sum / static_cast<double>(terms);
  rep.akd = average_keypoint_distance(per_type);
  return rep;
}

std::string EvalReport::to_json() const {
  Json j;
  j["thresholds"] = thresholds;
  j["mAP"] = map ? Json(*map) : Json(nullptr);
  j["AKD"] = {{"value", akd.defined ? Json(akd.value) : Json(nullptr)},
              {"defined", akd.defined},
              {"pairs", akd.pairs},
              {"skipped", akd.skipped}};
  j["counts"] = {{"images", images},
                 {"gt_keypoints", gt_keypoints},
                 {"visible_gt_keypoints", visible_gt_keypoints},
                 {"detections", detections}};
  Json types_json = Json::object();
  for (const auto& [name, t] : types) {
    Json ap = Json::object(), matched = Json::object();
    long num_gt = 0, num_det = 0;
    for (const auto& [thr, r] : t.ap) {
      const std::string key = format_real(thr, 6);
      ap[key] = r.ap;
      matched[key] = r.true_positives;
      num_gt = r.num_gt;
      num_det = r.num_detections;
    }
    types_json[name] = {{"included", t.included},
                        {"num_gt", num_gt},
                        {"num_detections", num_det},
                        {"AP", ap},
                        {"matched", matched}};
  }
  j["per_keypoint"] = std::move(types_json);
  return j.dump(2) + "\n";
}

namespace {

[[noreturn]] void fail(const std::string& what, const std::string& source, const std::string& pointer) {
  throw Error(ErrorCode::kParse, what, source + "#" + pointer);
}

Json parse_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, e.what(), path + ":byte " + std::to_string(e.byte));
  }
}

}  // namespace

EvalReport evaluate_files(const std::string& gt_path, const std::string& pred_path,
                          const std::vector<double>& thresholds) {
  const Json gt = parse_json_file(gt_path);
  const Json pred = parse_json_file(pred_path);
  if (!gt.is_object()) fail("expected a COCO object", gt_path, "");
  for (const char* key : {"images", "annotations", "categories"})
    if (!gt.contains(key) || !gt[key].is_array()) fail(std::string("missing array '") + key + "'", gt_path, "");

  // category id -> keypoint type names
  std::map<int64_t, std::vector<std::string>> types;
  for (size_t i = 0; i < gt["categories"].size(); ++i) {
    const Json& c = gt["categories"][i];
    const std::string ptr = "/categories/" + std::to_string(i);
    if (!c.is_object() || !c.contains("id") || !c["id"].is_number_integer()) fail("missing integer id", gt_path, ptr);
    if (!c.contains("name") || !c["name"].is_string()) fail("missing name", gt_path, ptr);
    if (!c.contains("keypoints") || !c["keypoints"].is_array()) fail("missing keypoints", gt_path, ptr);
    std::vector<std::string> names;
    for (const Json& n : c["keypoints"]) {
      if (!n.is_string()) fail("keypoint names must be strings", gt_path, ptr + "/keypoints");
      names.push_back(c["name"].get<std::string>() + "." + n.get<std::string>());
    }
    types[c["id"].get<int64_t>()] = names;
  }
  std::map<int64_t, size_t> image_index;
  for (size_t i = 0; i < gt["images"].size(); ++i) {
    const Json& im = gt["images"][i];
    if (!im.is_object() || !im.contains("id") || !im["id"].is_number_integer())
      fail("missing integer id", gt_path, "/images/" + std::to_string(i));
    image_index.emplace(im["id"].get<int64_t>(), image_index.size());
  }
  const size_t n_images = image_index.size();
  std::map<std::string, std::vector<ImageKeypoints>> data;
  for (const auto& [id, names] : types)
    for (const std::string& n : names) data[n].assign(n_images, ImageKeypoints{});

  auto read_triplets = [&](const Json& entry, const std::string& source, const std::string& ptr, bool is_pred,
                           auto&& sink) {
    for (const char* key : {"image_id", "category_id", "keypoints"})
      if (!entry.is_object() || !entry.contains(key)) fail(std::string("missing key '") + key + "'", source, ptr);
    if (!entry["image_id"].is_number_integer()) fail("image_id must be an integer", source, ptr + "/image_id");
    if (!entry["category_id"].is_number_integer())
      fail("category_id must be an integer", source, ptr + "/category_id");
    auto img = image_index.find(entry["image_id"].get<int64_t>());
    if (img == image_index.end()) fail("unknown image_id", source, ptr + "/image_id");
    auto cat = types.find(entry["category_id"].get<int64_t>());
    if (cat == types.end()) fail("unknown category_id", source, ptr + "/category_id");
    const Json& kps = entry["keypoints"];
    if (!kps.is_array() || kps.size() != 3 * cat->second.size())
      fail("keypoint array length does not match the category", source, ptr + "/keypoints");
    for (size_t k = 0; k < kps.size(); ++k)
      if (!kps[k].is_number()) fail("expected a number", source, ptr + "/keypoints/" + std::to_string(k));
    double score = 1.0;
    const Json* kp_scores = nullptr;
    if (is_pred) {
      if (!entry.contains("score") || !entry["score"].is_number()) fail("missing numeric score", source, ptr);
      score = entry["score"].get<double>();
      if (entry.contains("keypoint_scores")) {
        kp_scores = &entry["keypoint_scores"];
        if (!kp_scores->is_array() || kp_scores->size() != cat->second.size())
          fail("keypoint_scores length does not match the category", source, ptr + "/keypoint_scores");
      }
    }
    for (size_t k = 0; k < cat->second.size(); ++k) {
      if (kps[3 * k + 2].get<double>() <= 0) continue;
      double s = score;
      if (kp_scores) {
        const Json& v = (*kp_scores)[k];
        if (!v.is_number()) fail("expected a number", source, ptr + "/keypoint_scores/" + std::to_string(k));
        s = v.get<double>();
      }
      sink(data[cat->second[k]][img->second], kps[3 * k].get<double>(), kps[3 * k + 1].get<double>(), s);
    }
    return cat->second.size();
  };

  long gt_keypoints = 0;
  for (size_t i = 0; i < gt["annotations"].size(); ++i)
    gt_keypoints += static_cast<long>(read_triplets(
        gt["annotations"][i], gt_path, "/annotations/" + std::to_string(i), false,
        [](ImageKeypoints& ik, double x, double y, double) { ik.ground_truth.push_back({x, y}); }));
  if (!pred.is_array()) fail("expected a COCO results array", pred_path, "");
  for (size_t i = 0; i < pred.size(); ++i)
    read_triplets(pred[i], pred_path, "/" + std::to_string(i), true,
                  [](ImageKeypoints& ik, double x, double y, double s) { ik.detections.push_back({x, y, s}); });
  EvalReport rep = evaluate(data, thresholds);
  rep.images = static_cast<long>(n_images);
  rep.gt_keypoints = gt_keypoints;
  return rep;
}

}  // namespace clothforge

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

#include "render/annotate.h"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>

#include "common/error.h"
#include "geometry/obj_io.h"

namespace clothforge {
namespace {

using Json = nlohmann::ordered_json;

// Whether a is strictly preferred over b as the keypoint nearest to target.
bool nearer(const Keypoint2D& a, const Keypoint2D& b, double tx, double ty) {
  const double da = (a.x - tx) * (a.x - tx) + (a.y - ty) * (a.y - ty);
  const double db = (b.x - tx) * (b.x - tx) + (b.y - ty) * (b.y - ty);
  if (da != db) return da < db;
  if (a.x != b.x) return a.x < b.x;
  return a.y < b.y;
}

std::map<std::string, Keypoint2D> by_name(ClothCategory category, const std::vector<Keypoint2D>& keypoints) {
  std::map<std::string, Keypoint2D> out;
  for (const Keypoint2D& k : keypoints)
    if (!out.emplace(k.name, k).second) throw_invalid("duplicate keypoint '" + k.name + "'");
  for (std::string_view n : keypoint_names(category))
    if (!out.count(std::string(n))) throw_invalid("missing keypoint '" + std::string(n) + "'");
  if (out.size() != keypoint_names(category).size()) throw_invalid("unexpected keypoint names");
  return out;
}

[[noreturn]] void schema_error(const std::string& what, const std::string& pointer, const std::string& source) {
  throw Error(ErrorCode::kParse, what, source + "#" + pointer);
}

const Json& member(const Json& obj, const char* key, const std::string& ptr, const std::string& source) {
  if (!obj.is_object()) schema_error("expected an object", ptr, source);
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(std::string("missing key '") + key + "'", ptr, source);
  return *it;
}

int64_t as_int(const Json& v, const std::string& ptr, const std::string& source) {
  if (v.is_number_integer()) return v.get<int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == std::floor(d) && std::fabs(d) < 9e15) return static_cast<int64_t>(d);
  }
  schema_error("expected an integer", ptr, source);
}

double as_number(const Json& v, const std::string& ptr, const std::string& source) {
  if (!v.is_number()) schema_error("expected a number", ptr, source);
  return v.get<double>();
}

}  // namespace

std::vector<Keypoint2D> order_keypoints(ClothCategory category, const std::vector<Keypoint2D>& keypoints,
                                        const BBox& bbox) {
  const auto kp = by_name(category, keypoints);
  const double left = bbox.x, right = bbox.x + bbox.w, top = bbox.y, bottom = bbox.y + bbox.h;
  std::vector<Keypoint2D> out;
  const auto names = keypoint_names(category);
  if (category == ClothCategory::kTowel) {
    std::vector<Keypoint2D> corners;
    for (int i = 0; i < 4; ++i) corners.push_back(kp.at("corner" + std::to_string(i)));
    int first = 0;
    for (int i = 1; i < 4; ++i)
      if (nearer(corners[i], corners[first], left, top)) first = i;
    const int next = (first + 1) % 4, prev = (first + 3) % 4;
    const int dir = nearer(corners[prev], corners[next], right, top) ? 3 : 1;
    for (int k = 0; k < 4; ++k) {
      Keypoint2D c = corners[(first + dir * k) % 4];
      c.name = "corner" + std::to_string(k);
      out.push_back(c);
    }
    return out;
  }
  const Keypoint2D& wl = kp.at("waist_left");
  const Keypoint2D& wr = kp.at("waist_right");
  // T-shirts anchor on the bottom-left bbox corner, shorts on the top-left.
  const double ty = category == ClothCategory::kTshirt ? bottom : top;
  const bool mirror = nearer(wr, wl, left, ty);
  for (std::string_view n : names) {
    Keypoint2D k = kp.at(mirror ? mirror_keypoint_name(n) : std::string(n));
    k.name = std::string(n);
    out.push_back(k);
  }
  return out;
}

Rle encode_rle(const Mask& mask) {
  Rle rle;
  rle.height = mask.height;
  rle.width = mask.width;
  uint8_t current = 0;
  uint32_t run = 0;
  for (int x = 0; x < mask.width; ++x)
    for (int y = 0; y < mask.height; ++y) {
      const uint8_t v = mask.at(x, y) ? 1 : 0;
      if (v != current) {
        rle.counts.push_back(run);
        run = 0;
        current = v;
      }
      ++run;
    }
  rle.counts.push_back(run);
  return rle;
}

Mask decode_rle(const Rle& rle) {
  Mask m;
  m.width = rle.width;
  m.height = rle.height;
  m.data.assign(static_cast<size_t>(rle.width) * rle.height, 0);
  size_t pos = 0;
  uint8_t value = 0;
  for (uint32_t run : rle.counts) {
    if (pos + run > m.data.size()) throw Error(ErrorCode::kParse, "RLE counts exceed the mask size");
    for (uint32_t k = 0; k < run; ++k, ++pos) {
      const size_t x = pos / rle.height, y = pos % rle.height;
      m.data[y * rle.width + x] = value;
    }
    value ^= 1;
  }
  if (pos != m.data.size()) throw Error(ErrorCode::kParse, "RLE counts do not cover the mask");
  return m;
}

AnnotationRecord annotate(const Scene& scene, const Bvh& bvh, const VisibleMask& visible, int64_t image_id,
                          const std::string& file_name) {
  const Camera& cam = scene.camera;
  const ClothMesh& mesh = scene.cloth;
  AnnotationRecord rec;
  rec.id = image_id;
  rec.image_id = image_id;
  rec.file_name = file_name;
  rec.width = cam.intrinsics.width;
  rec.height = cam.intrinsics.height;
  rec.category = mesh.category;
  rec.bbox = visible.bbox;
  rec.area = visible.mask.count();
  rec.segmentation = encode_rle(visible.mask);

  std::vector<Keypoint2D> raw;
  for (std::string_view n : keypoint_names(mesh.category)) {
    const std::string name(n);
    const Projection p = cam.project(mesh.vertices[mesh.keypoint_vertex(name)]);
    raw.push_back({name, p.x, p.y, !visible.bbox.empty && keypoint_visibility(bvh, cam, mesh, name)});
  }
  const std::vector<Keypoint2D> ordered = order_keypoints(mesh.category, raw, visible.bbox);
  const BBox& b = visible.bbox;
  for (const Keypoint2D& k : ordered) {
    bool v = k.visible && k.x >= 0 && k.y >= 0 && k.x < rec.width && k.y < rec.height;
    v = v && k.x >= b.x - 1 && k.x <= b.x + b.w + 1 && k.y >= b.y - 1 && k.y <= b.y + b.h + 1;
    if (v) {
      rec.keypoints.insert(rec.keypoints.end(), {k.x, k.y, 2.0});
      ++rec.num_keypoints;
    } else {
      rec.keypoints.insert(rec.keypoints.end(), {0.0, 0.0, 0.0});
    }
  }
  return rec;
}

std::string export_coco(const CocoDataset& dataset) {
  Json root;
  root["info"] = {{"description", "clothforge synthetic cloth keypoints"}, {"version", "1"}};
  Json images = Json::array(), annotations = Json::array(), categories = Json::array();
  for (const AnnotationRecord& r : dataset.records) {
    images.push_back({{"id", r.image_id}, {"file_name", r.file_name}, {"width", r.width}, {"height", r.height}});
    Json kps = Json::array();
    for (size_t i = 0; i + 2 < r.keypoints.size(); i += 3) {
      if (r.keypoints[i + 2] > 0) {
        kps.push_back(r.keypoints[i]);
        kps.push_back(r.keypoints[i + 1]);
        kps.push_back(2);
      } else {
        kps.insert(kps.end(), {0, 0, 0});
      }
    }
    Json bbox = Json::array({r.bbox.x, r.bbox.y, r.bbox.w, r.bbox.h});
    if (r.bbox.empty) bbox = Json::array({0, 0, 0, 0});
    annotations.push_back({{"id", r.id},
                           {"image_id", r.image_id},
                           {"category_id", coco_category_id(r.category)},
                           {"bbox", bbox},
                           {"area", r.area},
                           {"iscrowd", 0},
                           {"segmentation", {{"size", {r.segmentation.height, r.segmentation.width}},
                                             {"counts", r.segmentation.counts}}},
                           {"keypoints", kps},
                           {"num_keypoints", r.num_keypoints}});
  }
  for (ClothCategory c : dataset.categories) {
    Json names = Json::array();
    for (std::string_view n : keypoint_names(c)) names.push_back(std::string(n));
    categories.push_back({{"id", coco_category_id(c)},
                          {"name", std::string(to_string(c))},
                          {"supercategory", "cloth"},
                          {"keypoints", names},
                          {"skeleton", Json::array()}});
  }
  root["images"] = std::move(images);
  root["annotations"] = std::move(annotations);
  root["categories"] = std::move(categories);
  return root.dump(1) + "\n";
}

void write_coco(const CocoDataset& dataset, const std::filesystem::path& path) {
  write_file_atomic(path, export_coco(dataset));
}

CocoDataset parse_coco(const std::string& text, const std::string& source) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, e.what(), source + ":byte " + std::to_string(e.byte));
  }
  CocoDataset out;
  std::map<int64_t, ClothCategory> cat_by_id;
  const Json& cats = member(root, "categories", "", source);
  if (!cats.is_array()) schema_error("expected an array", "/categories", source);
  for (size_t i = 0; i < cats.size(); ++i) {
    const std::string ptr = "/categories/" + std::to_string(i);
    const Json& name = member(cats[i], "name", ptr, source);
    if (!name.is_string()) schema_error("expected a string", ptr + "/name", source);
    auto c = parse_category(name.get<std::string>());
    if (!c) schema_error("unknown category '" + name.get<std::string>() + "'", ptr + "/name", source);
    const int64_t id = as_int(member(cats[i], "id", ptr, source), ptr + "/id", source);
    if (id != coco_category_id(*c)) schema_error("category id does not match its name", ptr + "/id", source);
    cat_by_id[id] = *c;
    out.categories.push_back(*c);
  }
  struct ImageInfo {
    std::string file_name;
    int width = 0, height = 0;
  };
  std::map<int64_t, ImageInfo> images;
  const Json& imgs = member(root, "images", "", source);
  if (!imgs.is_array()) schema_error("expected an array", "/images", source);
  for (size_t i = 0; i < imgs.size(); ++i) {
    const std::string ptr = "/images/" + std::to_string(i);
    ImageInfo info;
    const Json& fn = member(imgs[i], "file_name", ptr, source);
    if (!fn.is_string()) schema_error("expected a string", ptr + "/file_name", source);
    info.file_name = fn.get<std::string>();
    info.width = static_cast<int>(as_int(member(imgs[i], "width", ptr, source), ptr + "/width", source));
    info.height = static_cast<int>(as_int(member(imgs[i], "height", ptr, source), ptr + "/height", source));
    images[as_int(member(imgs[i], "id", ptr, source), ptr + "/id", source)] = info;
  }
  const Json& anns = member(root, "annotations", "", source);
  if (!anns.is_array()) schema_error("expected an array", "/annotations", source);
  for (size_t i = 0; i < anns.size(); ++i) {
    const std::string ptr = "/annotations/" + std::to_string(i);
    const Json& a = anns[i];
    AnnotationRecord r;
    r.id = as_int(member(a, "id", ptr, source), ptr + "/id", source);
    r.image_id = as_int(member(a, "image_id", ptr, source), ptr + "/image_id", source);
    auto img = images.find(r.image_id);
    if (img == images.end()) schema_error("unknown image_id", ptr + "/image_id", source);
    r.file_name = img->second.file_name;
    r.width = img->second.width;
    r.height = img->second.height;
    const int64_t cid = as_int(member(a, "category_id", ptr, source), ptr + "/category_id", source);
    auto cat = cat_by_id.find(cid);
    if (cat == cat_by_id.end()) schema_error("unknown category_id", ptr + "/category_id", source);
    r.category = cat->second;
    const Json& bbox = member(a, "bbox", ptr, source);
    if (!bbox.is_array() || bbox.size() != 4) schema_error("bbox must have 4 entries", ptr + "/bbox", source);
    r.bbox.x = static_cast<int>(as_int(bbox[0], ptr + "/bbox/0", source));
    r.bbox.y = static_cast<int>(as_int(bbox[1], ptr + "/bbox/1", source));
    r.bbox.w = static_cast<int>(as_int(bbox[2], ptr + "/bbox/2", source));
    r.bbox.h = static_cast<int>(as_int(bbox[3], ptr + "/bbox/3", source));
    r.bbox.empty = r.bbox.w == 0 || r.bbox.h == 0;
    r.area = static_cast<long>(as_int(member(a, "area", ptr, source), ptr + "/area", source));
    const Json& seg = member(a, "segmentation", ptr, source);
    const Json& size = member(seg, "size", ptr + "/segmentation", source);
    if (!size.is_array() || size.size() != 2) schema_error("size must have 2 entries", ptr + "/segmentation/size", source);
    r.segmentation.height = static_cast<int>(as_int(size[0], ptr + "/segmentation/size/0", source));
    r.segmentation.width = static_cast<int>(as_int(size[1], ptr + "/segmentation/size/1", source));
    const Json& counts = member(seg, "counts", ptr + "/segmentation", source);
    if (!counts.is_array()) schema_error("expected uncompressed RLE counts", ptr + "/segmentation/counts", source);
    for (size_t k = 0; k < counts.size(); ++k)
      r.segmentation.counts.push_back(
          static_cast<uint32_t>(as_int(counts[k], ptr + "/segmentation/counts/" + std::to_string(k), source)));
    const Json& kps = member(a, "keypoints", ptr, source);
    if (!kps.is_array() || kps.size() != 3 * keypoint_names(r.category).size())
      schema_error("keypoint array length does not match the category", ptr + "/keypoints", source);
    for (size_t k = 0; k < kps.size(); ++k)
      r.keypoints.push_back(as_number(kps[k], ptr + "/keypoints/" + std::to_string(k), source));
    r.num_keypoints =
        static_cast<int>(as_int(member(a, "num_keypoints", ptr, source), ptr + "/num_keypoints", source));
    out.records.push_back(std::move(r));
  }
  return out;
}

}  // namespace clothforge

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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "common/error.h"
#include "common/rng.h"
#include "metrics/metrics.h"

namespace clothforge {
namespace {

// Reference AP: explicit distance table, literal max-over-ranks envelope.
double oracle_ap(const std::vector<ImageKeypoints>& images, double thr) {
  struct Item {
    double score;
    size_t image, k;
  };
  std::vector<Item> items;
  size_t n_gt = 0;
  for (size_t i = 0; i < images.size(); ++i) {
    n_gt += images[i].ground_truth.size();
    for (size_t k = 0; k < images[i].detections.size(); ++k) items.push_back({images[i].detections[k].score, i, k});
  }
  if (n_gt == 0) return items.empty() ? 1.0 : 0.0;
  for (size_t a = 0; a < items.size(); ++a)  // insertion sort keeps input order on ties
    for (size_t b = a; b > 0 && items[b].score > items[b - 1].score; --b) std::swap(items[b], items[b - 1]);
  std::vector<std::vector<int>> taken(images.size());
  for (size_t i = 0; i < images.size(); ++i) taken[i].assign(images[i].ground_truth.size(), 0);
  std::vector<double> precision, recall;
  size_t tp = 0;
  for (size_t r = 0; r < items.size(); ++r) {
    const auto& img = images[items[r].image];
    const Detection& d = img.detections[items[r].k];
    std::vector<std::pair<double, size_t>> cand;
    for (size_t g = 0; g < img.ground_truth.size(); ++g) {
      const double dist = std::sqrt(std::pow(d.x - img.ground_truth[g].x, 2) + std::pow(d.y - img.ground_truth[g].y, 2));
      if (!taken[items[r].image][g] && dist <= thr) cand.push_back({dist, g});
    }
    if (!cand.empty()) {
      std::sort(cand.begin(), cand.end());
      taken[items[r].image][cand[0].second] = 1;
      ++tp;
    }
    precision.push_back(static_cast<double>(tp) / static_cast<double>(r + 1));
    recall.push_back(static_cast<double>(tp) / static_cast<double>(n_gt));
  }
  double sum = 0;
  for (int i = 0; i <= 100; ++i) {
    double best = 0;
    for (size_t r = 0; r < precision.size(); ++r)
      if (recall[r] >= i / 100.0) best = std::max(best, precision[r]);
    sum += best;
  }
  return sum / 101;
}

std::vector<ImageKeypoints> random_images(Rng& rng, int n) {
  std::vector<ImageKeypoints> images(n);
  for (auto& img : images) {
    const int gts = static_cast<int>(rng.uniform_int(0, 3));
    for (int g = 0; g < gts; ++g) img.ground_truth.push_back({rng.uniform(0, 40), rng.uniform(0, 40)});
    const int dets = static_cast<int>(rng.uniform_int(0, 4));
    for (int k = 0; k < dets; ++k) {
      Vec2 p{rng.uniform(0, 40), rng.uniform(0, 40)};
      if (!img.ground_truth.empty() && rng.bernoulli(0.6)) {
        const Vec2& g = img.ground_truth[rng.uniform_int(0, static_cast<int64_t>(img.ground_truth.size()) - 1)];
        p = {g.x + rng.uniform(-6, 6), g.y + rng.uniform(-6, 6)};
      }
      // Coarse scores force ties.
      img.detections.push_back({p.x, p.y, std::round(rng.uniform() * 4) / 4});
    }
  }
  return images;
}

TEST(AveragePrecision, HandComputedCurves) {
  const std::vector<Vec2> gt = {{0, 0}, {10, 0}};
  EXPECT_DOUBLE_EQ(average_precision({{0, 0, 1}}, {{0.5, 0}}, 2), 1.0);
  // FP, TP, TP: every interpolated precision is 2/3.
  EXPECT_NEAR(average_precision({{50, 50, 0.9}, {0, 1, 0.8}, {10, 1, 0.7}}, gt, 2), 2.0 / 3, 1e-12);
  // TP, FP, TP: 51 recall points at 1, 50 at 2/3.
  EXPECT_NEAR(average_precision({{0, 1, 0.9}, {50, 50, 0.8}, {10, 1, 0.7}}, gt, 2), (51 + 50 * 2.0 / 3) / 101, 1e-12);
  // Half recall, perfect precision.
  EXPECT_NEAR(average_precision({{0, 0, 0.9}}, gt, 2), 51.0 / 101, 1e-12);
}

TEST(AveragePrecision, EmptyCases) {
  EXPECT_DOUBLE_EQ(average_precision({}, {}, 2), 1.0);
  EXPECT_DOUBLE_EQ(average_precision({{1, 1, 0.5}}, {}, 2), 0.0);
  EXPECT_DOUBLE_EQ(average_precision({}, {{1, 1}}, 2), 0.0);
}

TEST(AveragePrecision, DuplicateDetectionIsFalsePositive) {
  const ApResult r = average_precision({{{{0, 0, 0.9}, {0.1, 0, 0.8}}, {{0, 0}}}}, 2);
  EXPECT_EQ(r.true_positives, 1);
  EXPECT_DOUBLE_EQ(r.ap, 1.0);
}

TEST(AveragePrecision, MatchesNearestUnmatchedGroundTruth) {
  // The first detection takes the nearer ground truth, leaving none in range for the second.
  const ApResult r = average_precision({{{{1.1, 0, 0.9}, {3.5, 0, 0.8}}, {{0, 0}, {2, 0}}}}, 2);
  EXPECT_EQ(r.true_positives, 1);
  // Equidistant: the lower index wins, so the second detection still matches.
  const ApResult s = average_precision({{{{1, 0, 0.9}, {3.5, 0, 0.8}}, {{0, 0}, {2, 0}}}}, 2);
  EXPECT_EQ(s.true_positives, 2);
}

TEST(AveragePrecision, AgreesWithReferenceOnRandomInputs) {
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto images = random_images(rng, static_cast<int>(rng.uniform_int(1, 6)));
    for (double thr : kDefaultThresholds)
      ASSERT_NEAR(average_precision(images, thr).ap, oracle_ap(images, thr), 1e-12) << "trial " << trial;
  }
}

TEST(AveragePrecision, TruePositivesMonotoneInThreshold) {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto images = random_images(rng, 4);
    long prev = -1;
    for (double thr : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
      const long tp = average_precision(images, thr).true_positives;
      EXPECT_GE(tp, prev);
      prev = tp;
    }
  }
}

TEST(AveragePrecision, MonotoneInThresholdWithOneDetectionPerImage) {
  Rng rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ImageKeypoints> images(5);
    for (auto& img : images) {
      img.ground_truth = {{rng.uniform(0, 40), rng.uniform(0, 40)}};
      if (rng.bernoulli(0.8))
        img.detections = {{img.ground_truth[0].x + rng.uniform(-9, 9), img.ground_truth[0].y + rng.uniform(-9, 9),
                           rng.uniform()}};
    }
    double prev = -1;
    for (double thr : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
      const double ap = average_precision(images, thr).ap;
      EXPECT_GE(ap, prev - 1e-15);
      prev = ap;
    }
  }
}

TEST(Akd, AgreesWithFlatLoop) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<ImageKeypoints>> per_type = {random_images(rng, 5), random_images(rng, 5)};
    double sum = 0;
    long n = 0, skipped = 0;
    for (const auto& type : per_type)
      for (const auto& img : type) {
        if (img.detections.empty()) {
          skipped += static_cast<long>(img.ground_truth.size());
          continue;
        }
        size_t best = 0;
        for (size_t k = 1; k < img.detections.size(); ++k)
          if (img.detections[k].score > img.detections[best].score) best = k;
        for (const Vec2& g : img.ground_truth) {
          sum += std::hypot(img.detections[best].x - g.x, img.detections[best].y - g.y);
          ++n;
        }
      }
    const AkdResult r = average_keypoint_distance(per_type);
    EXPECT_EQ(r.pairs, n);
    EXPECT_EQ(r.skipped, skipped);
    EXPECT_EQ(r.defined, n > 0);
    if (n > 0) EXPECT_NEAR(r.value, sum / n, 1e-12);
  }
}

TEST(Akd, UndefinedWithoutPairs) {
  const AkdResult r = average_keypoint_distance({{{{}, {{1, 1}}}}});
  EXPECT_FALSE(r.defined);
  EXPECT_EQ(r.skipped, 1);
  EXPECT_EQ(r.pairs, 0);
}

TEST(Heatmap, EncodePeaksAtKeypoint) {
  const Heatmap h = encode_heatmap({{5, 7}}, 4, 20, 16);
  EXPECT_DOUBLE_EQ(h.at(5, 7), 1.0);
  EXPECT_NEAR(h.at(9, 7), std::exp(-16.0 / 32), 1e-15);
  const Heatmap two = encode_heatmap({{2, 2}, {3, 2}}, 1, 8, 8);
  EXPECT_DOUBLE_EQ(two.at(2, 2), 1.0);
  EXPECT_DOUBLE_EQ(two.at(3, 2), 1.0);  // max, not sum
}

TEST(Heatmap, DecodeStrictMaximaAndPlateau) {
  Heatmap h{5, 4, std::vector<double>(20, 0.0)};
  h.values[1 * 5 + 1] = 0.5;
  h.values[1 * 5 + 2] = 0.5;  // plateau with (1,1)
  h.values[2 * 5 + 2] = 0.5;
  h.values[3 * 5 + 4] = 0.9;
  h.values[0 * 5 + 4] = 0.005;  // below threshold
  const auto d = decode_heatmap(h, 0.01);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_DOUBLE_EQ(d[0].score, 0.9);
  EXPECT_DOUBLE_EQ(d[0].x, 4);
  EXPECT_DOUBLE_EQ(d[0].y, 3);
  EXPECT_DOUBLE_EQ(d[1].x, 1);
  EXPECT_DOUBLE_EQ(d[1].y, 1);
}

TEST(Heatmap, PlateauAdjacentToHigherValueIsNotAPeak) {
  Heatmap h{4, 1, {0.5, 0.5, 0.7, 0.1}};
  const auto d = decode_heatmap(h, 0.01);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_DOUBLE_EQ(d[0].x, 2);
}

TEST(Heatmap, DecodeOfEncodeRecoversKeypoints) {
  Rng rng(5);
  std::vector<ImageKeypoints> images;
  for (int i = 0; i < 200; ++i) {
    const Vec2 k{rng.uniform(3, 60), rng.uniform(3, 28)};
    const auto d = decode_heatmap(encode_heatmap({k}, 4, 64, 32));
    ASSERT_EQ(d.size(), 1u);
    EXPECT_DOUBLE_EQ(d[0].x, std::round(k.x));
    EXPECT_DOUBLE_EQ(d[0].y, std::round(k.y));
    images.push_back({d, {k}});
  }
  const EvalReport rep = evaluate({{"towel.corner0", images}});
  ASSERT_TRUE(rep.map.has_value());
  EXPECT_EQ(*rep.map, 1.0);
  EXPECT_LE(rep.akd.value, 0.5);
}

TEST(Evaluate, ExcludesTypesWithoutGroundTruth) {
  std::map<std::string, std::vector<ImageKeypoints>> data;
  data["a.k"] = {{{{0, 0, 1}}, {{0, 0}}}};
  data["b.k"] = {{{{5, 5, 1}}, {}}};
  const EvalReport rep = evaluate(data);
  EXPECT_TRUE(rep.types.at("a.k").included);
  EXPECT_FALSE(rep.types.at("b.k").included);
  EXPECT_DOUBLE_EQ(*rep.map, 1.0);
  EXPECT_DOUBLE_EQ(rep.types.at("b.k").ap.at(2.0).ap, 0.0);
}

TEST(Evaluate, NoDetectionsGivesZeroMap) {
  const EvalReport rep = evaluate({{"a.k", {{{}, {{1, 1}}}}}});
  EXPECT_DOUBLE_EQ(*rep.map, 0.0);
  EXPECT_FALSE(rep.akd.defined);
  EXPECT_NE(rep.to_json().find("\"value\": null"), std::string::npos);
}

TEST(AveragePrecision, FivePixelOffsetAcrossThresholds) {
  const std::vector<Vec2> gt = {{10, 10}};
  const std::vector<Detection> det = {{13, 14, 1}};
  EXPECT_DOUBLE_EQ(average_precision(det, gt, 2), 0.0);
  EXPECT_DOUBLE_EQ(average_precision(det, gt, 4), 0.0);
  EXPECT_DOUBLE_EQ(average_precision(det, gt, 8), 1.0);
  const EvalReport rep = evaluate({{"a.k", {{det, gt}}}});
  EXPECT_NEAR(*rep.map, 1.0 / 3, 1e-15);
  EXPECT_DOUBLE_EQ(rep.akd.value, 5.0);
}

TEST(AveragePrecision, MonotoneAcrossDefaultThresholds) {
  Rng rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    const auto images = random_images(rng, static_cast<int>(rng.uniform_int(1, 5)));
    EXPECT_GE(average_precision(images, 8).ap, average_precision(images, 4).ap);
    EXPECT_GE(average_precision(images, 4).ap, average_precision(images, 2).ap);
  }
}

TEST(AveragePrecision, InvariantToScoreScale) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    auto images = random_images(rng, 3);
    const double before = average_precision(images, 4).ap;
    for (auto& img : images)
      for (auto& d : img.detections) d.score *= 0.37;
    EXPECT_EQ(average_precision(images, 4).ap, before);
  }
}

TEST(Akd, TranslationInvariant) {
  Rng rng(19);
  auto images = random_images(rng, 6);
  const double before = average_keypoint_distance({images}).value;
  for (auto& img : images) {
    for (auto& d : img.detections) d.x += 17.25, d.y -= 3.5;
    for (auto& g : img.ground_truth) g.x += 17.25, g.y -= 3.5;
  }
  EXPECT_NEAR(average_keypoint_distance({images}).value, before, 1e-12);
}

TEST(Heatmap, EncodeEmptyAndOverlapping) {
  const Heatmap empty = encode_heatmap({}, 2, 6, 5);
  for (double v : empty.values) EXPECT_EQ(v, 0.0);
  const Heatmap one = encode_heatmap({{10, 10}}, 2, 20, 20);
  EXPECT_DOUBLE_EQ(one.at(10, 11), std::exp(-0.125));
  const std::vector<Vec2> kps = {{4.2, 5}, {7, 6.5}, {5, 8}};
  const Heatmap h = encode_heatmap(kps, 2, 12, 12);
  std::vector<Heatmap> single;
  for (const Vec2& k : kps) single.push_back(encode_heatmap({k}, 2, 12, 12));
  for (size_t i = 0; i < h.values.size(); ++i) {
    double m = 0;
    for (const Heatmap& s : single) m = std::max(m, s.values[i]);
    EXPECT_EQ(h.values[i], m);
  }
}

TEST(Heatmap, AdjacentPeaksKeepOnlyTheHigher) {
  Heatmap h{6, 3, std::vector<double>(18, 0.0)};
  h.values[1 * 6 + 2] = 0.9;
  h.values[1 * 6 + 3] = 0.8;
  const auto d = decode_heatmap(h);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_DOUBLE_EQ(d[0].x, 2);
  EXPECT_TRUE(decode_heatmap(Heatmap{3, 3, std::vector<double>(9, 0.005)}).empty());
}

TEST(Heatmap, DecodeRecoversSeparatedIntegerKeypoints) {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec2> kps;
    while (kps.size() < 4) {
      const Vec2 k{static_cast<double>(rng.uniform_int(0, 79)), static_cast<double>(rng.uniform_int(0, 39))};
      bool ok = true;
      for (const Vec2& o : kps) ok = ok && std::hypot(k.x - o.x, k.y - o.y) > 12.0;
      if (ok) kps.push_back(k);
    }
    const auto d = decode_heatmap(encode_heatmap(kps, 4, 80, 40));
    ASSERT_EQ(d.size(), kps.size());
    for (const Vec2& k : kps) {
      bool found = false;
      for (const Detection& x : d) found = found || (x.x == k.x && x.y == k.y && x.score == 1.0);
      EXPECT_TRUE(found);
    }
  }
}

class EvaluateFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("cf_metrics_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string put(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::filesystem::path dir_;
};

const char* kGt = R"({"images":[{"id":1,"file_name":"a.png","width":64,"height":32},
  {"id":2,"file_name":"b.png","width":64,"height":32}],
 "annotations":[{"id":1,"image_id":1,"category_id":1,"keypoints":[10,10,2,20,10,2,0,0,0,10,20,2],"num_keypoints":3},
  {"id":2,"image_id":2,"category_id":1,"keypoints":[30,5,2,40,5,2,40,15,2,30,15,2],"num_keypoints":4}],
 "categories":[{"id":1,"name":"towel","keypoints":["corner0","corner1","corner2","corner3"],"skeleton":[]}]})";

TEST_F(EvaluateFiles, PerfectPredictionsScoreOne) {
  const std::string gt = put("gt.json", kGt);
  const std::string pred = put("pred.json", R"([
    {"image_id":1,"category_id":1,"keypoints":[10,10,1,20,10,1,0,0,0,10,20,1],"score":0.9},
    {"image_id":2,"category_id":1,"keypoints":[30,5,1,40,5,1,40,15,1,30,15,1],"score":0.8,
     "keypoint_scores":[0.1,0.2,0.3,0.4]}])");
  const EvalReport rep = evaluate_files(gt, pred);
  EXPECT_DOUBLE_EQ(*rep.map, 1.0);
  EXPECT_DOUBLE_EQ(rep.akd.value, 0.0);
  EXPECT_EQ(rep.akd.pairs, 7);
  EXPECT_EQ(rep.images, 2);
  EXPECT_EQ(rep.gt_keypoints, 8);
  EXPECT_EQ(rep.visible_gt_keypoints, 7);
  EXPECT_EQ(rep.types.size(), 4u);
}

TEST_F(EvaluateFiles, ShiftedPredictionsDependOnThreshold) {
  const std::string gt = put("gt.json", kGt);
  const std::string pred = put("pred.json", R"([
    {"image_id":1,"category_id":1,"keypoints":[13,10,1,23,10,1,0,0,0,13,20,1],"score":0.9},
    {"image_id":2,"category_id":1,"keypoints":[33,5,1,43,5,1,43,15,1,33,15,1],"score":0.8}])");
  const EvalReport rep = evaluate_files(gt, pred);
  for (const auto& [name, t] : rep.types) {
    EXPECT_DOUBLE_EQ(t.ap.at(2.0).ap, 0.0) << name;
    EXPECT_DOUBLE_EQ(t.ap.at(4.0).ap, 1.0) << name;
  }
  EXPECT_NEAR(*rep.map, 2.0 / 3, 1e-12);
  EXPECT_DOUBLE_EQ(rep.akd.value, 3.0);
}

TEST_F(EvaluateFiles, ErrorsCarryJsonPointer) {
  const std::string gt = put("gt.json", kGt);
  const std::string pred = put("pred.json", R"([{"image_id":1,"category_id":1,"keypoints":[1,2,3],"score":1}])");
  try {
    evaluate_files(gt, pred);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_EQ(e.location(), pred + "#/0/keypoints");
  }
  const std::string bad = put("bad.json", "[{");
  EXPECT_THROW(evaluate_files(gt, bad), Error);
  EXPECT_THROW(evaluate_files(gt, (dir_ / "missing.json").string()), Error);
}

}  // namespace
}  // namespace clothforge

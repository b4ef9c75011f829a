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

#include <filesystem>
#include <set>

#include "common/error.h"
#include "geometry/obj_io.h"
#include "pipeline/config.h"
#include "pipeline/pipeline.h"

namespace clothforge {
namespace {

namespace fs = std::filesystem;

std::string error_location(const std::string& text) {
  try {
    PipelineConfig::parse(text, "cfg.json");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig) << e.what();
    return e.location();
  }
  ADD_FAILURE() << "no error for " << text;
  return {};
}

TEST(Config, EmptyDocumentGivesDefaults) {
  const PipelineConfig cfg = PipelineConfig::parse("{}");
  EXPECT_EQ(cfg.to_json(), PipelineConfig().to_json());
  EXPECT_EQ(cfg.counts.at(ClothCategory::kTowel), 10);
  EXPECT_DOUBLE_EQ(cfg.max_edge, 0.01);
  EXPECT_DOUBLE_EQ(cfg.metrics.sigma, 4.0);
}

TEST(Config, JsonRoundTrip) {
  PipelineConfig cfg = PipelineConfig::parse(R"({"master_seed": "0xdeadbeef", "counts": {"shorts": 3},
    "templates": {"towel": {"width": [0.4, 0.5]}}, "scene": {"camera": {"distance": [0.7, 0.8]}},
    "materials": {"uniform": 0.25, "tailored": 0.75}, "deform": {"undeformed": true}})");
  EXPECT_EQ(cfg.master_seed, 0xdeadbeefULL);
  EXPECT_EQ(cfg.counts.at(ClothCategory::kShorts), 3);
  EXPECT_EQ(cfg.templates.at(ClothCategory::kTowel).at("width"), (Range{0.4, 0.5}));
  EXPECT_DOUBLE_EQ(cfg.materials.random_texture, 0.0);
  const PipelineConfig again = PipelineConfig::parse(cfg.to_json());
  EXPECT_EQ(again.to_json(), cfg.to_json());
  EXPECT_EQ(again.hash(), cfg.hash());
}

TEST(Config, ErrorsPointAtTheOffendingKey) {
  EXPECT_EQ(error_location(R"({"scene": {"camra": {}}})"), "cfg.json#/scene/camra");
  EXPECT_EQ(error_location(R"({"counts": {"towel": "ten"}})"), "cfg.json#/counts/towel");
  EXPECT_EQ(error_location(R"({"counts": {"towel": -1}})"), "cfg.json#/counts/towel");
  EXPECT_EQ(error_location(R"({"materials": {"uniform": 0.5}})"), "cfg.json#/materials");
  EXPECT_EQ(error_location(R"({"templates": {"tshirt": {"sleeve_length": [0.3, 0.1]}}})"),
            "cfg.json#/templates/tshirt/sleeve_length");
  EXPECT_EQ(error_location(R"({"templates": {"towel": {"neck_width": [0.1, 0.2]}}})"),
            "cfg.json#/templates/towel/neck_width");
  EXPECT_EQ(error_location(R"({"metrics": {"thresholds": [2, -4]}})"), "cfg.json#/metrics/thresholds/1");
  EXPECT_EQ(error_location(R"({"master_seed": "0xzz"})"), "cfg.json#/master_seed");
  EXPECT_EQ(error_location(R"({"version": 7})"), "cfg.json#/version");
  EXPECT_EQ(error_location(R"({"workers": 0})"), "cfg.json#/workers");
  EXPECT_EQ(error_location(R"({"deform": {"fold_probability": 1.5}})"), "cfg.json#/deform");
  EXPECT_EQ(error_location("[1, 2]"), "cfg.json#");
  EXPECT_EQ(error_location(R"({"counts": )").rfind("cfg.json:byte", 0), 0u);
}

TEST(Config, HashIgnoresExecutionOnlyFields) {
  PipelineConfig a, b;
  b.workers = 8;
  b.output_dir = "elsewhere";
  b.render_threads = 3;
  EXPECT_EQ(a.hash(), b.hash());
  b.master_seed = 1;
  EXPECT_NE(a.hash(), b.hash());
}

TEST(Seeds, DependOnlyOnSeedCategoryAndId) {
  std::set<uint64_t> seen;
  for (ClothCategory c : kAllCategories)
    for (int id = 0; id < 1000; ++id) seen.insert(sample_seed(42, c, id));
  EXPECT_EQ(seen.size(), 3000u);
  PipelineConfig small, large;
  small.counts[ClothCategory::kTowel] = 2;
  large.counts[ClothCategory::kTowel] = 7;
  const auto a = enumerate_samples(small);
  const auto b = enumerate_samples(large);
  EXPECT_EQ(a[1].seed, b[1].seed);
  EXPECT_EQ(a[2].category, ClothCategory::kTshirt);
  EXPECT_EQ(a[2].seed, b[7].seed);
}

TEST(Stage, Parse) {
  EXPECT_EQ(parse_stage("deform"), Stage::kDeform);
  EXPECT_FALSE(parse_stage("bake").has_value());
}

class Generate : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("cf_pipeline_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    cfg_.counts = {{ClothCategory::kTowel, 2}, {ClothCategory::kTshirt, 1}, {ClothCategory::kShorts, 0}};
    cfg_.max_edge = 0.03;
    cfg_.master_seed = 9;
    cfg_.scene.intrinsics.width = 128;
    cfg_.scene.intrinsics.height = 64;
    cfg_.scene.intrinsics.focal_px = 75;
    cfg_.deform.settle.max_steps = 120;
    reset_cancel();
  }
  void TearDown() override {
    reset_cancel();
    fs::remove_all(root_);
  }
  PipelineConfig at(const std::string& dir) {
    PipelineConfig c = cfg_;
    c.output_dir = (root_ / dir).string();
    return c;
  }
  std::string slurp(const std::string& dir, const std::string& file) { return read_file(root_ / dir / file); }

  fs::path root_;
  PipelineConfig cfg_;
};

TEST_F(Generate, StageOrderIsEnforced) {
  try {
    generate(at("a"), Stage::kDeform);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStageOrder);
  }
  generate(at("a"), Stage::kMeshes);
  EXPECT_THROW(generate(at("a"), Stage::kRender), Error);
}

TEST_F(Generate, AllIsDeterministicAndMatchesStagedRuns) {
  const GenerateSummary s = generate(at("a"), Stage::kAll);
  EXPECT_EQ(s.samples_done, 3);
  EXPECT_TRUE(fs::exists(root_ / "a/towel/images/000001.png"));
  EXPECT_TRUE(fs::exists(root_ / "a/tshirt/annotations.json"));
  EXPECT_FALSE(fs::exists(root_ / "a/shorts/annotations.json"));
  PipelineConfig b = at("b");
  b.workers = 3;
  generate(b, Stage::kAll);
  for (const char* f : {"manifest.json", "towel/annotations.json", "tshirt/annotations.json",
                        "towel/images/000000.png", "deformed/tshirt/000000.obj"})
    EXPECT_EQ(slurp("a", f), slurp("b", f)) << f;

  generate(at("c"), Stage::kMeshes);
  generate(at("c"), Stage::kDeform);
  generate(at("c"), Stage::kRender);
  for (const char* f : {"towel/annotations.json", "tshirt/annotations.json", "towel/images/000001.png"})
    EXPECT_EQ(slurp("a", f), slurp("c", f)) << f;
}

TEST_F(Generate, CancellationWritesConsistentOutputs) {
  request_cancel();
  try {
    generate(at("a"), Stage::kMeshes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCancelled);
  }
  const std::string manifest = slurp("a", "manifest.json");
  EXPECT_NE(manifest.find("\"complete\": false"), std::string::npos);
  EXPECT_NE(manifest.find("\"samples\": []"), std::string::npos);
}

TEST_F(Generate, ProgressReportsEverySample) {
  cfg_.counts = {{ClothCategory::kTowel, 0}, {ClothCategory::kTshirt, 0}, {ClothCategory::kShorts, 3}};
  std::vector<long> seen;
  generate(at("a"), Stage::kMeshes, [&](long done, long total) {
    EXPECT_EQ(total, 3);
    seen.push_back(done);
  });
  EXPECT_EQ(seen, (std::vector<long>{1, 2, 3}));
}

}  // namespace
}  // namespace clothforge

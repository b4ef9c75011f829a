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
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + CLOTHFORGE_CLI + " " + args + " 2>&1";
  CliResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cf_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string config(const std::string& out, int towels = 2, const std::string& extra = "") {
    const fs::path p = dir_ / (out + ".json");
    std::ofstream(p) << R"({"master_seed": 21, "output_dir": ")" << (dir_ / out).string()
                     << R"(", "counts": {"towel": )" << towels << R"(, "tshirt": 0, "shorts": 1},
      "mesh": {"max_edge": 0.03}, "deform": {"settle": {"max_steps": 90}},
      "scene": {"intrinsics": {"width": 128, "height": 64, "focal_px": 75}})"
                     << extra << "}";
    return p.string();
  }
  fs::path dir_;
};

TEST_F(Cli, GenerateIsReproducible) {
  ASSERT_EQ(run("generate --config " + config("a")).code, 0);
  ASSERT_EQ(run("generate --config " + config("b") + " --workers 2").code, 0);
  for (const char* f : {"manifest.json", "towel/annotations.json", "shorts/annotations.json", "towel/images/000001.png"})
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  const Json coco = Json::parse(slurp(dir_ / "a/towel/annotations.json"));
  EXPECT_EQ(coco["images"].size(), 2u);
  EXPECT_EQ(coco["annotations"].size(), 2u);
}

TEST_F(Cli, StagesAndExitCodes) {
  EXPECT_EQ(run("generate --config " + config("a") + " --stage render").code, 3);
  EXPECT_EQ(run("generate --config " + config("a") + " --stage meshes").code, 0);
  EXPECT_EQ(run("generate --config " + config("a") + " --stage render").code, 3);
  EXPECT_EQ(run("generate --config " + config("a") + " --stage bake").code, 2);
  EXPECT_EQ(run("generate --config " + (dir_ / "none.json").string()).code, 4);
  const CliResult bad = run("generate --config " + config("c", 1, R"(, "scene": {"ambient": "dim"})"));
  EXPECT_EQ(bad.code, 2);
  const CliResult dup = run("generate --config " + config("d", 1, R"(, "camera": {})"));
  EXPECT_EQ(dup.code, 2);
  EXPECT_NE(dup.out.find("#/camera"), std::string::npos) << dup.out;
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(Cli, SeedOverrideFromEnvironment) {
  ASSERT_EQ(run("generate --stage meshes --config " + config("a"), "CLOTHFORGE_SEED=0x10").code, 0);
  const Json m = Json::parse(slurp(dir_ / "a/manifest.json"));
  EXPECT_EQ(m["master_seed"], "0x0000000000000010");
  EXPECT_EQ(run("generate --stage meshes --config " + config("a"), "CLOTHFORGE_SEED=seven").code, 2);
}

TEST_F(Cli, ConfigPrintsDefaults) {
  const CliResult r = run("config --config " + config("a"));
  ASSERT_EQ(r.code, 0);
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["counts"]["towel"], 2);
  EXPECT_EQ(j["metrics"]["sigma"], 4.0);
}

TEST_F(Cli, EvaluateGroundTruthAgainstItself) {
  ASSERT_EQ(run("generate --config " + config("a", 3)).code, 0);
  const fs::path gt = dir_ / "a/towel/annotations.json";
  const Json coco = Json::parse(slurp(gt));
  Json results = Json::array();
  for (const Json& a : coco["annotations"])
    results.push_back({{"image_id", a["image_id"]}, {"category_id", a["category_id"]},
                       {"keypoints", a["keypoints"]}, {"score", 1.0}});
  std::ofstream(dir_ / "pred.json") << results.dump();
  std::ofstream(dir_ / "empty.json") << "[]";
  ASSERT_EQ(run("evaluate --gt " + gt.string() + " --pred " + (dir_ / "pred.json").string() + " --out " +
                (dir_ / "r.json").string())
                .code,
            0);
  const Json r = Json::parse(slurp(dir_ / "r.json"));
  EXPECT_EQ(r["mAP"], 1.0);
  EXPECT_EQ(r["AKD"]["value"], 0.0);
  for (const auto& [name, t] : r["per_keypoint"].items())
    if (t["included"]) {
      for (const char* thr : {"2", "4", "8"}) EXPECT_EQ(t["AP"][thr], 1.0) << name;
    }

  const CliResult empty = run("evaluate --gt " + gt.string() + " --pred " + (dir_ / "empty.json").string());
  ASSERT_EQ(empty.code, 0);
  const Json e = Json::parse(empty.out);
  EXPECT_EQ(e["mAP"], 0.0);
  EXPECT_TRUE(e["AKD"]["value"].is_null());
  EXPECT_EQ(e["AKD"]["defined"], false);

  const CliResult schema = run("evaluate --gt " + gt.string() + " --pred " + gt.string());
  EXPECT_EQ(schema.code, 2);
  EXPECT_NE(schema.out.find("parse error"), std::string::npos) << schema.out;
}

}  // namespace

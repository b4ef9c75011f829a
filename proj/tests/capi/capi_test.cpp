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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "clothforge/clothforge.h"

namespace {

namespace fs = std::filesystem;

class Capi : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cf_capi_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    cf_reset_cancel();
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string put(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return (dir_ / name).string();
  }
  fs::path dir_;
};

TEST_F(Capi, VersionAndStatusStrings) {
  EXPECT_STREQ(cf_version(), CF_VERSION_STRING);
  EXPECT_STREQ(cf_status_string(CF_OK), "ok");
  EXPECT_STREQ(cf_status_string(CF_ERR_STAGE_ORDER), "stage order error");
  EXPECT_STREQ(cf_status_string(static_cast<cf_status>(99)), "unknown status");
}

TEST_F(Capi, ConfigErrorsReportPointer) {
  cf_config* cfg = nullptr;
  EXPECT_EQ(cf_config_parse(R"({"scene": {"ambient": [0.9, 0.1]}})", &cfg), CF_ERR_CONFIG);
  EXPECT_EQ(cfg, nullptr);
  EXPECT_STREQ(cf_last_error_location(), "<config>#/scene/ambient");
  EXPECT_NE(std::string(cf_last_error()).find("min exceeds max"), std::string::npos);

  ASSERT_EQ(cf_config_parse("{}", &cfg), CF_OK);
  EXPECT_STREQ(cf_last_error(), "");
  cf_config_free(cfg);

  EXPECT_EQ(cf_config_load((dir_ / "missing.json").c_str(), &cfg), CF_ERR_IO);
  EXPECT_EQ(cf_config_parse(nullptr, &cfg), CF_ERR_INVALID_ARGUMENT);
}

TEST_F(Capi, ConfigAccessors) {
  cf_config* cfg = nullptr;
  ASSERT_EQ(cf_config_default(&cfg), CF_OK);
  uint64_t hash0 = 0, hash1 = 0, seed = 0;
  ASSERT_EQ(cf_config_hash(cfg, &hash0), CF_OK);
  ASSERT_EQ(cf_config_set_workers(cfg, 4), CF_OK);
  ASSERT_EQ(cf_config_hash(cfg, &hash1), CF_OK);
  EXPECT_EQ(hash0, hash1);
  EXPECT_EQ(cf_config_set_workers(cfg, 0), CF_ERR_INVALID_ARGUMENT);
  ASSERT_EQ(cf_config_set_master_seed(cfg, 0xabcULL), CF_OK);
  ASSERT_EQ(cf_config_get_master_seed(cfg, &seed), CF_OK);
  EXPECT_EQ(seed, 0xabcULL);
  char* json = nullptr;
  ASSERT_EQ(cf_config_to_json(cfg, &json), CF_OK);
  EXPECT_NE(std::string(json).find("\"master_seed\": \"0x0000000000000abc\""), std::string::npos);
  EXPECT_NE(std::string(json).find("\"workers\": 4"), std::string::npos);
  cf_string_free(json);
  cf_config_free(cfg);
}

TEST_F(Capi, StageParse) {
  cf_stage s = CF_STAGE_ALL;
  ASSERT_EQ(cf_stage_parse("render", &s), CF_OK);
  EXPECT_EQ(s, CF_STAGE_RENDER);
  EXPECT_EQ(cf_stage_parse("paint", &s), CF_ERR_INVALID_ARGUMENT);
}

TEST_F(Capi, MeshLifecycle) {
  cf_mesh* mesh = nullptr;
  ASSERT_EQ(cf_mesh_from_template("towel", 3, 0.02, &mesh), CF_OK);
  const size_t nv = cf_mesh_vertex_count(mesh);
  EXPECT_GT(nv, 10u);
  EXPECT_GT(cf_mesh_triangle_count(mesh), nv);
  size_t kp = 0;
  ASSERT_EQ(cf_mesh_keypoint_vertex(mesh, "corner0", &kp), CF_OK);
  double xyz[3];
  ASSERT_EQ(cf_mesh_vertex(mesh, kp, xyz), CF_OK);
  EXPECT_EQ(xyz[2], 0.0);
  EXPECT_EQ(cf_mesh_vertex(mesh, nv, xyz), CF_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(cf_mesh_keypoint_vertex(mesh, "collar", &kp), CF_ERR_INVALID_ARGUMENT);

  const std::string path = (dir_ / "m.obj").string();
  ASSERT_EQ(cf_mesh_write_obj(mesh, path.c_str()), CF_OK);
  cf_mesh* back = nullptr;
  ASSERT_EQ(cf_mesh_read_obj(path.c_str(), &back), CF_OK);
  EXPECT_EQ(cf_mesh_vertex_count(back), nv);
  EXPECT_EQ(cf_mesh_triangle_count(back), cf_mesh_triangle_count(mesh));
  cf_mesh_free(back);
  cf_mesh_free(mesh);

  EXPECT_EQ(cf_mesh_from_template("sock", 1, 0.02, &mesh), CF_ERR_INVALID_ARGUMENT);
  const std::string bad = put("bad.obj", "v 0 0 0\nf 1 2 3\n");
  EXPECT_EQ(cf_mesh_read_obj(bad.c_str(), &mesh), CF_ERR_PARSE);
  EXPECT_EQ(std::string(cf_last_error_location()), bad + ":2");
}

TEST_F(Capi, GenerateMeshesAndStageOrder) {
  cf_config* cfg = nullptr;
  ASSERT_EQ(cf_config_parse(R"({"counts": {"towel": 2, "tshirt": 1, "shorts": 1}, "mesh": {"max_edge": 0.03}})", &cfg),
            CF_OK);
  ASSERT_EQ(cf_config_set_output_dir(cfg, dir_.c_str()), CF_OK);
  EXPECT_EQ(cf_generate(cfg, CF_STAGE_DEFORM, nullptr, nullptr), CF_ERR_STAGE_ORDER);
  long calls = 0;
  auto progress = [](long, long total, void* user) {
    EXPECT_EQ(total, 4);
    ++*static_cast<long*>(user);
  };
  ASSERT_EQ(cf_generate(cfg, CF_STAGE_MESHES, progress, &calls), CF_OK);
  EXPECT_EQ(calls, 4);
  EXPECT_TRUE(fs::exists(dir_ / "meshes/shorts/000000.obj"));
  EXPECT_TRUE(fs::exists(dir_ / "manifest.json"));

  cf_request_cancel();
  EXPECT_EQ(cf_generate(cfg, CF_STAGE_MESHES, nullptr, nullptr), CF_ERR_CANCELLED);
  cf_reset_cancel();
  cf_config_free(cfg);
}

TEST_F(Capi, Evaluate) {
  const std::string gt = put("gt.json", R"({"images":[{"id":1,"file_name":"a.png","width":64,"height":32}],
    "annotations":[{"id":1,"image_id":1,"category_id":1,"keypoints":[10,10,2,20,10,2,20,20,2,10,20,2]}],
    "categories":[{"id":1,"name":"towel","keypoints":["corner0","corner1","corner2","corner3"]}]})");
  const std::string pred = put("pred.json", R"([{"image_id":1,"category_id":1,"score":1.0,
    "keypoints":[10,10,1,20,10,1,20,20,1,10,20,1]}])");
  const std::string empty = put("empty.json", "[]");
  char* json = nullptr;
  ASSERT_EQ(cf_evaluate(gt.c_str(), pred.c_str(), (dir_ / "r.json").c_str(), &json), CF_OK);
  EXPECT_NE(std::string(json).find("\"mAP\": 1.0"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "r.json"));
  cf_string_free(json);
  ASSERT_EQ(cf_evaluate(gt.c_str(), empty.c_str(), nullptr, &json), CF_OK);
  EXPECT_NE(std::string(json).find("\"mAP\": 0.0"), std::string::npos);
  EXPECT_NE(std::string(json).find("\"defined\": false"), std::string::npos);
  cf_string_free(json);
  EXPECT_EQ(cf_evaluate(gt.c_str(), gt.c_str(), nullptr, nullptr), CF_ERR_PARSE);
}

}  // namespace

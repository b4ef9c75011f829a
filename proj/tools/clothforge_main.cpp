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

#include <unistd.h>

#include <CLI11.hpp>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "clothforge/clothforge.h"

namespace {

int exit_code(cf_status s) {
  switch (s) {
    case CF_OK:
      return 0;
    case CF_ERR_CONFIG:
    case CF_ERR_PARSE:
      return 2;
    case CF_ERR_STAGE_ORDER:
      return 3;
    case CF_ERR_IO:
      return 4;
    case CF_ERR_CANCELLED:
      return 130;
    default:
      return 1;
  }
}

int report(cf_status s) {
  if (s != CF_OK) {
    std::fprintf(stderr, "clothforge: %s: %s", cf_status_string(s), cf_last_error());
    const char* where = cf_last_error_location();
    if (*where) std::fprintf(stderr, " (at %s)", where);
    std::fputc('\n', stderr);
  }
  return exit_code(s);
}

extern "C" void on_sigint(int) {
  cf_request_cancel();
  // A second Ctrl-C terminates immediately.
  std::signal(SIGINT, SIG_DFL);
}

bool parse_seed(const std::string& text, uint64_t& out) {
  if (text.empty()) return false;
  const bool hex = text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X');
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text.c_str(), &end, hex ? 16 : 10);
  if (errno != 0 || *end != '\0' || text[0] == '-') return false;
  out = v;
  return true;
}

// Loads the config and applies command-line and environment overrides.
cf_status load_config(const std::string& path, int workers, const std::string& output_dir, cf_config** out) {
  cf_status s = cf_config_load(path.c_str(), out);
  if (s != CF_OK) return s;
  if (const char* env = std::getenv("CLOTHFORGE_SEED")) {
    uint64_t seed = 0;
    if (!parse_seed(env, seed)) {
      std::fprintf(stderr, "clothforge: config error: CLOTHFORGE_SEED must be a decimal or 0x-hex integer\n");
      cf_config_free(*out);
      *out = nullptr;
      return CF_ERR_CONFIG;
    }
    cf_config_set_master_seed(*out, seed);
  }
  if (workers > 0 && (s = cf_config_set_workers(*out, workers)) != CF_OK) return s;
  if (!output_dir.empty() && (s = cf_config_set_output_dir(*out, output_dir.c_str())) != CF_OK) return s;
  return CF_OK;
}

void print_progress(long done, long total, void* user) {
  if (*static_cast<bool*>(user)) std::fprintf(stderr, "\r%ld/%ld samples", done, total);
  if (done == total && *static_cast<bool*>(user)) std::fputc('\n', stderr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Procedural synthetic cloth images with keypoint annotations"};
  app.set_version_flag("--version", std::string(cf_version()));
  app.require_subcommand(1);

  std::string config_path, stage_name = "all", output_dir;
  int workers = 0;
  auto* gen = app.add_subcommand("generate", "Run pipeline stages");
  gen->add_option("--config", config_path, "Pipeline config JSON")->required();
  gen->add_option("--stage", stage_name, "meshes, deform, render or all")
      ->check(CLI::IsMember({"meshes", "deform", "render", "all"}));
  gen->add_option("--workers", workers, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
  gen->add_option("--output-dir", output_dir, "Output directory (overrides the config)");

  std::string gt_path, pred_path, report_path;
  auto* eval = app.add_subcommand("evaluate", "Score keypoint detections against COCO ground truth");
  eval->add_option("--gt", gt_path, "COCO keypoint ground truth")->required();
  eval->add_option("--pred", pred_path, "COCO results array")->required();
  eval->add_option("--out", report_path, "Report path (stdout when omitted)");

  std::string bench_config, bench_out;
  auto* bench = app.add_subcommand("bench", "Time the pipeline stages");
  bench->add_option("--config", bench_config, "Pipeline config JSON")->required();
  bench->add_option("--out", bench_out, "Report path (stdout when omitted)");

  std::string show_config;
  auto* show = app.add_subcommand("config", "Print the effective config with all defaults filled in");
  show->add_option("--config", show_config, "Pipeline config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::signal(SIGINT, on_sigint);

  if (*gen) {
    cf_config* cfg = nullptr;
    cf_status s = load_config(config_path, workers, output_dir, &cfg);
    if (s != CF_OK) return report(s);
    cf_stage stage = CF_STAGE_ALL;
    cf_stage_parse(stage_name.c_str(), &stage);
    bool tty = isatty(STDERR_FILENO);
    s = cf_generate(cfg, stage, print_progress, &tty);
    cf_config_free(cfg);
    if (s == CF_OK) std::printf("stage %s complete\n", stage_name.c_str());
    return report(s);
  }
  if (*eval) {
    char* json = nullptr;
    const cf_status s =
        cf_evaluate(gt_path.c_str(), pred_path.c_str(), report_path.empty() ? nullptr : report_path.c_str(),
                    report_path.empty() ? &json : nullptr);
    if (json) std::fputs(json, stdout);
    cf_string_free(json);
    return report(s);
  }
  if (*bench) {
    cf_config* cfg = nullptr;
    cf_status s = load_config(bench_config, 0, "", &cfg);
    if (s != CF_OK) return report(s);
    char* json = nullptr;
    s = cf_bench(cfg, &json);
    cf_config_free(cfg);
    if (s != CF_OK) return report(s);
    int rc = 0;
    if (bench_out.empty()) {
      std::fputs(json, stdout);
    } else {
      std::FILE* f = std::fopen(bench_out.c_str(), "wb");
      const bool written = f && std::fputs(json, f) >= 0;
      if ((f && std::fclose(f) != 0) || !written) {
        std::fprintf(stderr, "clothforge: i/o error: cannot write %s\n", bench_out.c_str());
        rc = exit_code(CF_ERR_IO);
      }
    }
    cf_string_free(json);
    return rc;
  }
  if (*show) {
    cf_config* cfg = nullptr;
    cf_status s = load_config(show_config, 0, "", &cfg);
    if (s != CF_OK) return report(s);
    char* json = nullptr;
    s = cf_config_to_json(cfg, &json);
    if (s == CF_OK) std::fputs(json, stdout);
    cf_string_free(json);
    cf_config_free(cfg);
    return report(s);
  }
  return 1;
}

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

// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--criterion N]... [--workdir DIR]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>
#include <vector>

#include "criteria.h"

namespace {

using clothforge::acceptance::Context;
using clothforge::acceptance::Outcome;

struct Entry {
  int number;
  const char* name;
  Outcome (*run)(const Context&);
};

const Entry kCriteria[] = {
    {1, "edge-length contract", clothforge::acceptance::edge_length_contract},
    {2, "simulator invariants", clothforge::acceptance::simulator_invariants},
    {3, "bvh correctness", clothforge::acceptance::bvh_correctness},
    {4, "visibility rule", clothforge::acceptance::visibility_rule},
    {5, "metrics oracle equivalence", clothforge::acceptance::metrics_oracles},
    {6, "symmetry ordering", clothforge::acceptance::symmetry_ordering},
    {7, "determinism", clothforge::acceptance::determinism},
    {8, "throughput", clothforge::acceptance::throughput},
    {9, "end-to-end smoke", clothforge::acceptance::end_to_end_smoke},
};

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  ctx.cli = CLOTHFORGE_CLI;
  ctx.work = std::filesystem::current_path() / "acceptance_work";
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else if (arg == "--workdir" && i + 1 < argc) {
      ctx.work = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]... [--workdir DIR]\n", argv[0]);
      return 2;
    }
  }
  bool all_pass = true;
  for (const Entry& e : kCriteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), e.number) == selected.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = e.run(ctx);
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d [%s] %s: %s (%.1f s)\n", e.number, o.pass ? "PASS" : "FAIL", e.name, o.detail.c_str(),
                s);
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}

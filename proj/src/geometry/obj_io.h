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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "geometry/mesh.h"

namespace clothforge {

// Wavefront OBJ with per-vertex UVs. Reals are written with 9 significant
// digits; metadata rides in comment lines:
//   # category <name>
//   # kp <name> <vertex-index>      (0-based)
std::string write_obj(const ClothMesh& mesh);
ClothMesh parse_obj(std::string_view text, const std::string& source = "<obj>");

// Writes through a temporary file and rename, so readers never observe a
// partially written mesh.
void save_obj(const ClothMesh& mesh, const std::filesystem::path& path);
ClothMesh load_obj(const std::filesystem::path& path);

// Shared helpers for deterministic text/binary output.
std::string format_real(double value, int significant_digits = 9);
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace clothforge

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

#include "geometry/obj_io.h"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "common/error.h"

namespace clothforge {

std::string format_real(double value, int significant_digits) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general,
                           significant_digits);
  std::string out(buf, res.ptr);
  if (out == "-0") out = "0";
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot open for writing", path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::kIo, "write failed", path.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "rename failed: " + ec.message(), path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open for reading", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string write_obj(const ClothMesh& mesh) {
  std::string out;
  out.reserve(mesh.vertices.size() * 64 + mesh.triangles.size() * 32);
  out += "# clothforge mesh\n# category ";
  out += to_string(mesh.category);
  out += '\n';
  for (const auto& [name, index] : mesh.keypoint_vertex_map)
    out += "# kp " + name + ' ' + std::to_string(index) + '\n';
  for (const Vec3& v : mesh.vertices)
    out += "v " + format_real(v.x) + ' ' + format_real(v.y) + ' ' + format_real(v.z) + '\n';
  for (const Vec2& uv : mesh.uvs) out += "vt " + format_real(uv.x) + ' ' + format_real(uv.y) + '\n';
  const bool with_uv = !mesh.uvs.empty();
  for (const Triangle& t : mesh.triangles) {
    out += 'f';
    for (int i : t) {
      const std::string idx = std::to_string(i + 1);
      out += ' ';
      out += idx;
      if (with_uv) out += '/' + idx;
    }
    out += '\n';
  }
  return out;
}

namespace {

class LineReader {
 public:
  LineReader(std::string_view line, const std::string& where) : rest_(line), where_(where) {}

  std::string_view word() {
    while (!rest_.empty() && (rest_.front() == ' ' || rest_.front() == '\t')) rest_.remove_prefix(1);
    size_t n = 0;
    while (n < rest_.size() && rest_[n] != ' ' && rest_[n] != '\t') ++n;
    std::string_view w = rest_.substr(0, n);
    rest_.remove_prefix(n);
    return w;
  }

  double real() {
    std::string_view w = word();
    double v = 0;
    auto res = std::from_chars(w.data(), w.data() + w.size(), v);
    if (res.ec != std::errc() || res.ptr != w.data() + w.size()) fail("expected a number");
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::kParse, what, where_);
  }

 private:
  std::string_view rest_;
  const std::string& where_;
};

int parse_index(std::string_view w, const LineReader& reader) {
  int v = 0;
  auto res = std::from_chars(w.data(), w.data() + w.size(), v);
  if (res.ec != std::errc() || res.ptr != w.data() + w.size()) reader.fail("expected an index");
  return v;
}

}  // namespace

ClothMesh parse_obj(std::string_view text, const std::string& source) {
  ClothMesh mesh;
  size_t line_no = 0;
  while (!text.empty()) {
    const size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::string where = source + ":" + std::to_string(line_no);
    LineReader r(line, where);
    const std::string_view tag = r.word();
    if (tag.empty()) continue;
    if (tag == "#") {
      const std::string_view key = r.word();
      if (key == "category") {
        auto c = parse_category(r.word());
        if (!c) r.fail("unknown category");
        mesh.category = *c;
      } else if (key == "kp") {
        std::string name(r.word());
        const int index = parse_index(r.word(), r);
        if (name.empty()) r.fail("keypoint without name");
        if (!mesh.keypoint_vertex_map.emplace(name, index).second) r.fail("duplicate keypoint " + name);
      }
    } else if (tag == "v") {
      const double x = r.real(), y = r.real(), z = r.real();
      mesh.vertices.push_back({x, y, z});
    } else if (tag == "vt") {
      const double u = r.real(), v = r.real();
      mesh.uvs.push_back({u, v});
    } else if (tag == "f") {
      Triangle t{};
      for (int k = 0; k < 3; ++k) {
        std::string_view w = r.word();
        if (w.empty()) r.fail("face needs three vertices");
        const size_t slash = w.find('/');
        const int pos = parse_index(w.substr(0, slash), r);
        if (slash != std::string_view::npos && w.substr(slash + 1) != w.substr(0, slash))
          r.fail("only per-vertex uvs (i/i) are supported");
        if (pos < 1 || static_cast<size_t>(pos) > mesh.vertices.size())
          r.fail("vertex index out of range");
        t[k] = pos - 1;
      }
      if (!r.word().empty()) r.fail("only triangular faces are supported");
      mesh.triangles.push_back(t);
    } else {
      r.fail("unsupported OBJ statement '" + std::string(tag) + "'");
    }
  }
  try {
    validate(mesh);
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, e.what(), source);
  }
  return mesh;
}

void save_obj(const ClothMesh& mesh, const std::filesystem::path& path) {
  write_file_atomic(path, write_obj(mesh));
}

ClothMesh load_obj(const std::filesystem::path& path) {
  return parse_obj(read_file(path), path.string());
}

}  // namespace clothforge

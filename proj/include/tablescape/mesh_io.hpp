/* Copyright 2026 The Tablescape Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef TABLESCAPE_MESH_IO_HPP_
#define TABLESCAPE_MESH_IO_HPP_

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tablescape/error.hpp"
#include "tablescape/geometry.hpp"

// OBJ and PLY (ascii, binary little/big endian) readers and writers.
namespace tablescape {

enum class PlyEncoding { kAscii, kBinaryLittleEndian };

// Vertex/face data plus any additional scalar vertex properties, keyed by
// property name.
struct PlyData {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::map<std::string, std::vector<double>> vertex_properties;
};

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string lower_ext(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  // std::from_chars for double is available in libstdc++ 11.
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline bool parse_long(std::string_view s, long long& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

// Triangulates a polygon as a fan.
inline void push_polygon(std::vector<Face>& faces,
                         const std::vector<std::uint32_t>& poly) {
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    faces.push_back({poly[0], poly[k], poly[k + 1]});
  }
}

inline TriMesh parse_obj(const std::string& text) {
  TriMesh mesh;
  std::size_t line_no = 0, offset = 0;
  std::string_view all(text);
  while (offset < all.size()) {
    std::size_t eol = all.find('\n', offset);
    if (eol == std::string_view::npos) eol = all.size();
    std::string_view line = all.substr(offset, eol - offset);
    ++line_no;
    const std::size_t line_offset = offset;
    offset = eol + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "v") {
      if (tok.size() < 4) {
        throw ParseError("vertex needs 3 coordinates", line_no, line_offset);
      }
      Vec3 v;
      for (int k = 0; k < 3; ++k) {
        if (!parse_double(tok[k + 1], v[k]) || !std::isfinite(v[k])) {
          throw ParseError("bad vertex coordinate", line_no, line_offset);
        }
      }
      mesh.vertices.push_back(v);
    } else if (tok[0] == "f") {
      if (tok.size() < 4) {
        throw ParseError("face needs at least 3 vertices", line_no, line_offset);
      }
      std::vector<std::uint32_t> poly;
      for (std::size_t k = 1; k < tok.size(); ++k) {
        const auto slash = tok[k].find('/');
        long long idx = 0;
        if (!parse_long(tok[k].substr(0, slash), idx) || idx == 0) {
          throw ParseError("bad face index", line_no, line_offset);
        }
        const auto n = static_cast<long long>(mesh.vertices.size());
        if (idx < 0) idx = n + idx + 1;
        if (idx < 1 || idx > n) {
          throw ParseError("face index out of range", line_no, line_offset);
        }
        poly.push_back(static_cast<std::uint32_t>(idx - 1));
      }
      push_polygon(mesh.faces, poly);
    }
    // Normals, texture coordinates, groups and materials are ignored.
  }
  return mesh;
}

enum class PlyType { kInt8, kUInt8, kInt16, kUInt16, kInt32, kUInt32, kFloat32, kFloat64 };

inline bool ply_type_from_name(std::string_view n, PlyType& t) {
  static const std::pair<std::string_view, PlyType> kNames[] = {
      {"char", PlyType::kInt8},     {"int8", PlyType::kInt8},
      {"uchar", PlyType::kUInt8},   {"uint8", PlyType::kUInt8},
      {"short", PlyType::kInt16},   {"int16", PlyType::kInt16},
      {"ushort", PlyType::kUInt16}, {"uint16", PlyType::kUInt16},
      {"int", PlyType::kInt32},     {"int32", PlyType::kInt32},
      {"uint", PlyType::kUInt32},   {"uint32", PlyType::kUInt32},
      {"float", PlyType::kFloat32}, {"float32", PlyType::kFloat32},
      {"double", PlyType::kFloat64}, {"float64", PlyType::kFloat64}};
  for (const auto& [name, type] : kNames) {
    if (n == name) {
      t = type;
      return true;
    }
  }
  return false;
}

inline std::size_t ply_type_size(PlyType t) {
  switch (t) {
    case PlyType::kInt8:
    case PlyType::kUInt8: return 1;
    case PlyType::kInt16:
    case PlyType::kUInt16: return 2;
    case PlyType::kInt32:
    case PlyType::kUInt32:
    case PlyType::kFloat32: return 4;
    case PlyType::kFloat64: return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::kFloat32;
  bool is_list = false;
  PlyType count_type = PlyType::kUInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

enum class PlyFormat { kAscii, kBinaryLE, kBinaryBE };

// Sequential reader over the PLY body in either encoding.
class PlyBodyReader {
 public:
  PlyBodyReader(std::string_view body, std::size_t base_offset,
                std::size_t base_line, PlyFormat format)
      : body_(body), base_offset_(base_offset), line_(base_line), format_(format) {}

  double read(PlyType t) {
    if (format_ == PlyFormat::kAscii) return read_ascii();
    const std::size_t n = ply_type_size(t);
    if (pos_ + n > body_.size()) fail("unexpected end of binary data");
    unsigned char buf[8];
    std::memcpy(buf, body_.data() + pos_, n);
    const bool host_le = std::endian::native == std::endian::little;
    if ((format_ == PlyFormat::kBinaryLE) != host_le) std::reverse(buf, buf + n);
    pos_ += n;
    switch (t) {
      case PlyType::kInt8: { std::int8_t v; std::memcpy(&v, buf, 1); return v; }
      case PlyType::kUInt8: { std::uint8_t v; std::memcpy(&v, buf, 1); return v; }
      case PlyType::kInt16: { std::int16_t v; std::memcpy(&v, buf, 2); return v; }
      case PlyType::kUInt16: { std::uint16_t v; std::memcpy(&v, buf, 2); return v; }
      case PlyType::kInt32: { std::int32_t v; std::memcpy(&v, buf, 4); return v; }
      case PlyType::kUInt32: { std::uint32_t v; std::memcpy(&v, buf, 4); return v; }
      case PlyType::kFloat32: { float v; std::memcpy(&v, buf, 4); return v; }
      case PlyType::kFloat64: { double v; std::memcpy(&v, buf, 8); return v; }
    }
    return 0.0;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, line_, base_offset_ + pos_);
  }

 private:
  double read_ascii() {
    while (pos_ < body_.size() &&
           std::isspace(static_cast<unsigned char>(body_[pos_]))) {
      if (body_[pos_] == '\n') ++line_;
      ++pos_;
    }
    const std::size_t start = pos_;
    while (pos_ < body_.size() &&
           !std::isspace(static_cast<unsigned char>(body_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) fail("unexpected end of ascii data");
    double v = 0.0;
    if (!parse_double(body_.substr(start, pos_ - start), v)) {
      fail("bad ascii number");
    }
    return v;
  }

  std::string_view body_;
  std::size_t base_offset_;
  std::size_t line_;
  PlyFormat format_;
  std::size_t pos_ = 0;
};

inline PlyData parse_ply(const std::string& text) {
  std::string_view all(text);
  std::size_t pos = 0, line_no = 0;
  auto next_line = [&]() -> std::string_view {
    if (pos >= all.size()) throw ParseError("unterminated PLY header", line_no, pos);
    std::size_t eol = all.find('\n', pos);
    if (eol == std::string_view::npos) {
      throw ParseError("unterminated PLY header", line_no + 1, pos);
    }
    std::string_view line = all.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;
    ++line_no;
    return line;
  };
  if (next_line() != "ply") throw UnsupportedFormat("missing PLY magic");
  PlyFormat format = PlyFormat::kAscii;
  std::vector<PlyElement> elements;
  for (;;) {
    const std::string_view line = next_line();
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "format") {
      if (tok.size() < 2) throw ParseError("bad format line", line_no, pos);
      if (tok[1] == "ascii") format = PlyFormat::kAscii;
      else if (tok[1] == "binary_little_endian") format = PlyFormat::kBinaryLE;
      else if (tok[1] == "binary_big_endian") format = PlyFormat::kBinaryBE;
      else throw UnsupportedFormat("unknown PLY format " + std::string(tok[1]));
    } else if (tok[0] == "element") {
      long long count = 0;
      if (tok.size() != 3 || !parse_long(tok[2], count) || count < 0) {
        throw ParseError("bad element line", line_no, pos);
      }
      elements.push_back({std::string(tok[1]), static_cast<std::size_t>(count), {}});
    } else if (tok[0] == "property") {
      if (elements.empty()) throw ParseError("property before element", line_no, pos);
      PlyProperty prop;
      if (tok.size() == 5 && tok[1] == "list") {
        prop.is_list = true;
        if (!ply_type_from_name(tok[2], prop.count_type) ||
            !ply_type_from_name(tok[3], prop.type)) {
          throw ParseError("bad list property type", line_no, pos);
        }
        prop.name = tok[4];
      } else if (tok.size() == 3) {
        if (!ply_type_from_name(tok[1], prop.type)) {
          throw ParseError("bad property type", line_no, pos);
        }
        prop.name = tok[2];
      } else {
        throw ParseError("bad property line", line_no, pos);
      }
      elements.back().props.push_back(prop);
    } else {
      throw ParseError("unknown header keyword " + std::string(tok[0]), line_no, pos);
    }
  }

  PlyData data;
  PlyBodyReader reader(all.substr(pos), pos, line_no + 1, format);
  for (const auto& el : elements) {
    if (el.name == "vertex") {
      int ix = -1, iy = -1, iz = -1;
      for (std::size_t p = 0; p < el.props.size(); ++p) {
        if (el.props[p].name == "x") ix = static_cast<int>(p);
        if (el.props[p].name == "y") iy = static_cast<int>(p);
        if (el.props[p].name == "z") iz = static_cast<int>(p);
      }
      if (ix < 0 || iy < 0 || iz < 0) {
        throw ParseError("vertex element lacks x/y/z", line_no, pos);
      }
      data.vertices.resize(el.count);
      std::vector<double> values(el.props.size());
      for (const auto& prop : el.props) {
        if (!prop.is_list && prop.name != "x" && prop.name != "y" && prop.name != "z") {
          data.vertex_properties[prop.name].resize(el.count);
        }
      }
      for (std::size_t i = 0; i < el.count; ++i) {
        for (std::size_t p = 0; p < el.props.size(); ++p) {
          const auto& prop = el.props[p];
          if (prop.is_list) {
            const auto n = static_cast<std::size_t>(reader.read(prop.count_type));
            for (std::size_t k = 0; k < n; ++k) reader.read(prop.type);
            continue;
          }
          values[p] = reader.read(prop.type);
          if (prop.name != "x" && prop.name != "y" && prop.name != "z") {
            data.vertex_properties[prop.name][i] = values[p];
          }
        }
        data.vertices[i] = Vec3(values[ix], values[iy], values[iz]);
        if (!data.vertices[i].allFinite()) reader.fail("non-finite vertex");
      }
    } else if (el.name == "face") {
      for (std::size_t i = 0; i < el.count; ++i) {
        for (const auto& prop : el.props) {
          if (!prop.is_list) {
            reader.read(prop.type);
            continue;
          }
          const double n = reader.read(prop.count_type);
          if (n < 0 || n > 1e6) reader.fail("bad face size");
          std::vector<std::uint32_t> poly(static_cast<std::size_t>(n));
          for (auto& idx : poly) {
            const double v = reader.read(prop.type);
            if (v < 0 || v >= static_cast<double>(data.vertices.size())) {
              reader.fail("face index out of range");
            }
            idx = static_cast<std::uint32_t>(v);
          }
          if (prop.name == "vertex_indices" || prop.name == "vertex_index") {
            if (poly.size() < 3) reader.fail("face needs at least 3 vertices");
            push_polygon(data.faces, poly);
          }
        }
      }
    } else {
      for (std::size_t i = 0; i < el.count; ++i) {
        for (const auto& prop : el.props) {
          if (prop.is_list) {
            const auto n = static_cast<std::size_t>(reader.read(prop.count_type));
            for (std::size_t k = 0; k < n; ++k) reader.read(prop.type);
          } else {
            reader.read(prop.type);
          }
        }
      }
    }
  }
  return data;
}

}  // namespace detail

inline PlyData read_ply(const std::filesystem::path& path) {
  return detail::parse_ply(detail::read_file(path));
}

// Loads an OBJ or PLY file. PLY integer properties `semantic_id` and
// `instance_id` populate the vertex labels.
inline TriMesh load_mesh(const std::filesystem::path& path) {
  const std::string ext = detail::lower_ext(path);
  if (ext != ".obj" && ext != ".ply") {
    throw UnsupportedFormat("unsupported mesh format '" + ext + "'");
  }
  const std::string text = detail::read_file(path);
  if (ext == ".obj") return detail::parse_obj(text);
  PlyData data = detail::parse_ply(text);
  TriMesh mesh;
  mesh.vertices = std::move(data.vertices);
  mesh.faces = std::move(data.faces);
  const auto sem = data.vertex_properties.find("semantic_id");
  const auto ins = data.vertex_properties.find("instance_id");
  if (sem != data.vertex_properties.end()) {
    mesh.labels.resize(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      mesh.labels[i].semantic = static_cast<int>(sem->second[i]);
      mesh.labels[i].instance =
          ins != data.vertex_properties.end() ? static_cast<int>(ins->second[i]) : -1;
    }
  }
  return mesh;
}

// Scalar per-vertex property for writing.
struct PlyVertexProperty {
  std::string name;
  std::vector<double> values;
  bool integral = false;  // written as int32, else float32
};

// Writes vertices (as doubles), optional faces and extra vertex properties.
inline void write_ply(const std::filesystem::path& path,
                      std::span<const Vec3> vertices, std::span<const Face> faces,
                      std::span<const PlyVertexProperty> props,
                      PlyEncoding encoding = PlyEncoding::kBinaryLittleEndian) {
  for (const auto& p : props) {
    if (p.values.size() != vertices.size()) {
      throw LengthMismatch("property " + p.name + " has wrong length");
    }
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const bool ascii = encoding == PlyEncoding::kAscii;
  out << "ply\nformat " << (ascii ? "ascii" : "binary_little_endian") << " 1.0\n"
      << "element vertex " << vertices.size() << "\n"
      << "property double x\nproperty double y\nproperty double z\n";
  for (const auto& p : props) {
    out << "property " << (p.integral ? "int" : "float") << " " << p.name << "\n";
  }
  if (!faces.empty()) {
    out << "element face " << faces.size() << "\n"
        << "property list uchar int vertex_indices\n";
  }
  out << "end_header\n";
  auto put = [&out](const auto& value) {
    auto v = value;
    if constexpr (std::endian::native == std::endian::big) {
      auto* b = reinterpret_cast<unsigned char*>(&v);
      std::reverse(b, b + sizeof(v));
    }
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  };
  if (ascii) {
    out.precision(17);
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      out << vertices[i].x() << ' ' << vertices[i].y() << ' ' << vertices[i].z();
      for (const auto& p : props) {
        if (p.integral) out << ' ' << static_cast<std::int32_t>(p.values[i]);
        else out << ' ' << static_cast<float>(p.values[i]);
      }
      out << '\n';
    }
    for (const auto& f : faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  } else {
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      put(vertices[i].x());
      put(vertices[i].y());
      put(vertices[i].z());
      for (const auto& p : props) {
        if (p.integral) put(static_cast<std::int32_t>(p.values[i]));
        else put(static_cast<float>(p.values[i]));
      }
    }
    for (const auto& f : faces) {
      put(std::uint8_t{3});
      for (auto idx : f) put(static_cast<std::int32_t>(idx));
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

// Saves a mesh as PLY (labels become semantic_id/instance_id) or OBJ.
inline void save_mesh(const std::filesystem::path& path, const TriMesh& mesh,
                      PlyEncoding encoding = PlyEncoding::kBinaryLittleEndian) {
  const std::string ext = detail::lower_ext(path);
  if (ext == ".ply") {
    std::vector<PlyVertexProperty> props;
    if (mesh.has_labels()) {
      PlyVertexProperty sem{"semantic_id", {}, true}, ins{"instance_id", {}, true};
      for (const auto& l : mesh.labels) {
        sem.values.push_back(l.semantic);
        ins.values.push_back(l.instance);
      }
      props.push_back(std::move(sem));
      props.push_back(std::move(ins));
    }
    write_ply(path, mesh.vertices, mesh.faces, props, encoding);
    return;
  }
  if (ext != ".obj") throw UnsupportedFormat("unsupported mesh format '" + ext + "'");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  for (const auto& v : mesh.vertices) {
    out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  }
  for (const auto& f : mesh.faces) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
}

}  // namespace tablescape

#endif  // TABLESCAPE_MESH_IO_HPP_

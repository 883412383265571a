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

#ifndef TABLESCAPE_GLTF_HPP_
#define TABLESCAPE_GLTF_HPP_

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tablescape/error.hpp"
#include "tablescape/geometry.hpp"

// Minimal glTF 2.0 export: one mesh, float positions and uint32 indices in a
// single base64 data-URI buffer.
namespace tablescape {

inline std::string base64_encode(std::string_view bytes) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (static_cast<std::uint8_t>(bytes[i]) << 16) |
                            (static_cast<std::uint8_t>(bytes[i + 1]) << 8) |
                            static_cast<std::uint8_t>(bytes[i + 2]);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest) {
    std::uint32_t v = static_cast<std::uint8_t>(bytes[i]) << 16;
    if (rest == 2) v |= static_cast<std::uint8_t>(bytes[i + 1]) << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += rest == 2 ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

inline nlohmann::json mesh_to_gltf(const TriMesh& mesh) {
  mesh.validate();
  if (mesh.vertices.empty() || mesh.faces.empty()) throw EmptyGeometry("nothing to export");
  std::string buffer;
  Aabb box;
  for (const auto& v : mesh.vertices) {
    box.extend(v);
    for (int a = 0; a < 3; ++a) {
      const float f = static_cast<float>(v[a]);
      buffer.append(reinterpret_cast<const char*>(&f), sizeof f);
    }
  }
  const std::size_t position_bytes = buffer.size();
  for (const auto& f : mesh.faces) {
    for (std::uint32_t idx : f) buffer.append(reinterpret_cast<const char*>(&idx), sizeof idx);
  }
  const std::size_t index_bytes = buffer.size() - position_bytes;
  auto lo = [&](int a) { return static_cast<double>(static_cast<float>(box.min[a])); };
  auto hi = [&](int a) { return static_cast<double>(static_cast<float>(box.max[a])); };
  constexpr int kFloat = 5126, kUInt = 5125, kArrayBuffer = 34962, kElementBuffer = 34963;
  return {
      {"asset", {{"version", "2.0"}, {"generator", "tablescape"}}},
      {"scene", 0},
      {"scenes", {{{"nodes", {0}}}}},
      {"nodes", {{{"mesh", 0}}}},
      {"meshes", {{{"primitives", {{{"attributes", {{"POSITION", 0}}}, {"indices", 1}}}}}}},
      {"buffers",
       {{{"byteLength", buffer.size()},
         {"uri", "data:application/octet-stream;base64," + base64_encode(buffer)}}}},
      {"bufferViews",
       {{{"buffer", 0}, {"byteOffset", 0}, {"byteLength", position_bytes},
         {"target", kArrayBuffer}},
        {{"buffer", 0}, {"byteOffset", position_bytes}, {"byteLength", index_bytes},
         {"target", kElementBuffer}}}},
      {"accessors",
       {{{"bufferView", 0}, {"componentType", kFloat}, {"count", mesh.vertices.size()},
         {"type", "VEC3"}, {"min", {lo(0), lo(1), lo(2)}}, {"max", {hi(0), hi(1), hi(2)}}},
        {{"bufferView", 1}, {"componentType", kUInt}, {"count", 3 * mesh.faces.size()},
         {"type", "SCALAR"}}}},
  };
}

}  // namespace tablescape

#endif  // TABLESCAPE_GLTF_HPP_

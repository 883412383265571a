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

#ifndef TABLESCAPE_ANNOTATE_HPP_
#define TABLESCAPE_ANNOTATE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tablescape/bvh.hpp"
#include "tablescape/catalog.hpp"
#include "tablescape/error.hpp"
#include "tablescape/fusion.hpp"
#include "tablescape/geometry.hpp"
#include "tablescape/mesh_io.hpp"
#include "tablescape/placement.hpp"
#include "tablescape/rng.hpp"
#include "tablescape/taxonomy.hpp"

namespace tablescape {

struct LabeledCloud {
  std::vector<Vec3> points;
  std::vector<int> semantic;  // 0 = background
  std::vector<int> instance;  // -1 = none

  std::size_t size() const { return points.size(); }

  void validate() const {
    if (semantic.size() != points.size() || instance.size() != points.size()) {
      throw LengthMismatch("labeled cloud arrays differ in length");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (instance[i] >= 0 && !taxonomy::is_tabletop(semantic[i])) {
        throw InvalidArgument("instance label on a non-tabletop point");
      }
    }
  }
};

// Each point takes the label of the box containing it; points in several
// boxes go to the nearest center, then the lower instance id.
inline LabeledCloud label_points(std::span<const Vec3> points,
                                 std::span<const BBox3D> boxes) {
  for (const auto& b : boxes) b.validate();
  LabeledCloud out;
  out.points.assign(points.begin(), points.end());
  out.semantic.assign(points.size(), taxonomy::kBackground);
  out.instance.assign(points.size(), -1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    const BBox3D* owner = nullptr;
    for (const auto& b : boxes) {
      if (!point_in_obb(points[i], b)) continue;
      const double d = (points[i] - b.center).squaredNorm();
      if (d < best || (d == best && owner && b.instance_id < owner->instance_id)) {
        best = d;
        owner = &b;
      }
    }
    if (owner) {
      out.semantic[i] = owner->semantic_id;
      out.instance[i] = owner->instance_id;
    }
  }
  return out;
}

enum class Split { kUnassigned, kTrain, kTest };

inline std::string to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kTest: return "test";
    default: return "unassigned";
  }
}

struct DatasetSample {
  Variant variant = Variant::kVanilla;
  std::string table_id;
  TriMesh mesh;                // reconstruction
  LabeledCloud cloud;          // mesh vertices with labels
  std::vector<BBox3D> boxes;   // tabletop objects
  Split split = Split::kUnassigned;
};

// Copies furniture labels from the ground-truth scene onto unlabeled points
// via the nearest ground-truth triangle.
inline void transfer_furniture_labels(LabeledCloud& cloud, const TriMesh& truth) {
  if (!truth.has_labels() || truth.faces.empty()) return;
  const Bvh bvh(truth);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud.instance[i] >= 0) continue;
    const auto hit = bvh.closest_point(cloud.points[i]);
    const Face& f = truth.faces[hit.triangle];
    std::uint32_t nearest = f[0];
    double best = std::numeric_limits<double>::infinity();
    for (auto v : f) {
      const double d = (truth.vertices[v] - hit.point).squaredNorm();
      if (d < best) {
        best = d;
        nearest = v;
      }
    }
    const int label = truth.labels[nearest].semantic;
    cloud.semantic[i] = taxonomy::is_furniture(label) ? label : taxonomy::kBackground;
  }
}

// Scans, fuses and labels one scene. Single-table variants keep only the
// cropped surroundings and tabletop labels; whole-room samples also carry
// furniture classes.
inline DatasetSample assemble_variant(const SceneConfig& config, const AssetLibrary& lib,
                                      Variant variant,
                                      const ReconstructionParams& params,
                                      std::uint64_t seed) {
  if (config.variant != variant) {
    throw VariantMismatch("config is " + to_string(config.variant) + ", requested " +
                          to_string(variant));
  }
  const CountRange range = default_count_range(variant);
  const int n = static_cast<int>(config.placements.size());
  if (n < range.min || n > range.max) {
    throw VariantMismatch(std::to_string(n) + " objects outside the " +
                          to_string(variant) + " range");
  }
  ScanResult scan = reconstruct_scene(config, lib, params, seed);
  DatasetSample s;
  s.variant = variant;
  s.table_id = config.table_id;
  s.boxes = scan.scene.boxes;
  s.cloud = label_points(scan.mesh.vertices, s.boxes);
  if (variant == Variant::kWholeRoom) transfer_furniture_labels(s.cloud, scan.scene.mesh);
  s.mesh = std::move(scan.mesh);
  return s;
}

struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::string warning;
};

// Scene-level split keeping every table on one side. `group_keys[i]` is the
// table of sample i; the train side is filled group by group in seeded
// random order up to round(ratio * N) samples.
inline DatasetSplit split_dataset(const std::vector<std::string>& group_keys, double ratio,
                                  std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidArgument("split ratio must be in (0, 1)");
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < group_keys.size(); ++i) groups[group_keys[i]].push_back(i);
  std::vector<const std::vector<std::size_t>*> order;
  for (const auto& [_, members] : groups) order.push_back(&members);
  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  const auto target = static_cast<std::size_t>(std::llround(ratio * group_keys.size()));
  DatasetSplit out;
  for (const auto* g : order) {
    auto& side = (out.train.size() < target || out.train.empty()) ? out.train : out.test;
    side.insert(side.end(), g->begin(), g->end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  if (out.test.empty()) out.warning = "test split is empty";
  return out;
}

// ---------------------------------------------------------------------------
// Persistence.

inline void write_labeled_cloud(const std::filesystem::path& path, const LabeledCloud& cloud,
                                std::span<const Face> faces = {}) {
  cloud.validate();
  std::vector<PlyVertexProperty> props(2);
  props[0].name = "semantic_id";
  props[0].integral = true;
  props[0].values.assign(cloud.semantic.begin(), cloud.semantic.end());
  props[1].name = "instance_id";
  props[1].integral = true;
  props[1].values.assign(cloud.instance.begin(), cloud.instance.end());
  write_ply(path, cloud.points, faces, props);
}

inline LabeledCloud read_labeled_cloud(const std::filesystem::path& path) {
  PlyData ply = read_ply(path);
  LabeledCloud cloud;
  cloud.points = std::move(ply.vertices);
  auto column = [&](const char* name, int fallback) {
    std::vector<int> out(cloud.points.size(), fallback);
    auto it = ply.vertex_properties.find(name);
    if (it != ply.vertex_properties.end()) {
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(it->second[i]);
    }
    return out;
  };
  cloud.semantic = column("semantic_id", taxonomy::kBackground);
  cloud.instance = column("instance_id", -1);
  cloud.validate();
  return cloud;
}

inline nlohmann::json boxes_to_json(std::span<const BBox3D> boxes) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& b : boxes) {
    arr.push_back({{"center", {b.center.x(), b.center.y(), b.center.z()}},
                   {"dims", {b.dims.x(), b.dims.y(), b.dims.z()}},
                   {"yaw", b.yaw},
                   {"class", b.semantic_id},
                   {"class_name", taxonomy::class_name(b.semantic_id)},
                   {"instance", b.instance_id}});
  }
  return arr;
}

inline std::vector<BBox3D> boxes_from_json(const nlohmann::json& arr) {
  std::vector<BBox3D> out;
  try {
    for (const auto& j : arr) {
      BBox3D b;
      b.center = vec3_from_json(j.at("center"));
      b.dims = vec3_from_json(j.at("dims"));
      b.yaw = j.at("yaw").get<double>();
      b.semantic_id = j.at("class").get<int>();
      b.instance_id = j.value("instance", -1);
      b.validate();
      out.push_back(b);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed box list: ") + e.what());
  }
  return out;
}

}  // namespace tablescape

#endif  // TABLESCAPE_ANNOTATE_HPP_

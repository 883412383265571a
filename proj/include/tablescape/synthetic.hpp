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

#ifndef TABLESCAPE_SYNTHETIC_HPP_
#define TABLESCAPE_SYNTHETIC_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tablescape/catalog.hpp"
#include "tablescape/mesh_io.hpp"
#include "tablescape/rng.hpp"
#include "tablescape/shapes.hpp"
#include "tablescape/taxonomy.hpp"

// Procedural stand-ins for CAD objects, scanned tables and rooms, used for
// demos, tests and headless dataset generation when no real assets exist.
namespace tablescape::synthetic {

enum class Shape { kBox, kCylinder, kCone, kSphere };

struct ObjectTemplate {
  const char* category;
  Shape shape;
  double x, y, z;  // nominal extents (m)
};

// Rough real-world sizes for every tabletop class.
inline const std::vector<ObjectTemplate>& object_templates() {
  static const std::vector<ObjectTemplate> kTemplates = {
      {"bag", Shape::kBox, 0.30, 0.12, 0.25},
      {"bottle", Shape::kCylinder, 0.07, 0.07, 0.25},
      {"bowl", Shape::kCone, 0.16, 0.16, 0.07},
      {"camera", Shape::kBox, 0.12, 0.07, 0.08},
      {"can", Shape::kCylinder, 0.066, 0.066, 0.12},
      {"cap", Shape::kSphere, 0.20, 0.18, 0.10},
      {"clock", Shape::kCylinder, 0.15, 0.15, 0.05},
      {"keyboard", Shape::kBox, 0.44, 0.14, 0.03},
      {"display", Shape::kBox, 0.55, 0.18, 0.40},
      {"earphone", Shape::kBox, 0.16, 0.08, 0.18},
      {"jar", Shape::kCylinder, 0.10, 0.10, 0.14},
      {"knife", Shape::kBox, 0.22, 0.02, 0.015},
      {"lamp", Shape::kCone, 0.18, 0.18, 0.40},
      {"laptop", Shape::kBox, 0.33, 0.23, 0.025},
      {"microphone", Shape::kCylinder, 0.05, 0.05, 0.20},
      {"microwave", Shape::kBox, 0.45, 0.35, 0.27},
      {"mug", Shape::kCylinder, 0.08, 0.08, 0.10},
      {"printer", Shape::kBox, 0.42, 0.35, 0.22},
      {"remote_control", Shape::kBox, 0.18, 0.05, 0.025},
      {"phone", Shape::kBox, 0.15, 0.075, 0.01},
      {"alarm", Shape::kCylinder, 0.10, 0.10, 0.11},
      {"book", Shape::kBox, 0.22, 0.15, 0.03},
      {"cake", Shape::kCylinder, 0.20, 0.20, 0.09},
      {"calculator", Shape::kBox, 0.16, 0.08, 0.015},
      {"candle", Shape::kCylinder, 0.06, 0.06, 0.12},
      {"charger", Shape::kBox, 0.06, 0.05, 0.03},
      {"chessboard", Shape::kBox, 0.38, 0.38, 0.03},
      {"coffee_machine", Shape::kBox, 0.25, 0.30, 0.35},
      {"comb", Shape::kBox, 0.18, 0.04, 0.01},
      {"cutting_board", Shape::kBox, 0.35, 0.25, 0.02},
      {"dishes", Shape::kCylinder, 0.24, 0.24, 0.05},
      {"doll", Shape::kCone, 0.10, 0.10, 0.25},
      {"eraser", Shape::kBox, 0.06, 0.025, 0.012},
      {"eye_glasses", Shape::kBox, 0.14, 0.05, 0.04},
      {"file_box", Shape::kBox, 0.32, 0.25, 0.28},
      {"fork", Shape::kBox, 0.19, 0.025, 0.015},
      {"fruit", Shape::kSphere, 0.08, 0.08, 0.08},
      {"globe", Shape::kSphere, 0.30, 0.30, 0.30},
      {"hat", Shape::kCone, 0.30, 0.30, 0.12},
      {"mirror", Shape::kBox, 0.25, 0.10, 0.35},
      {"notebook", Shape::kBox, 0.25, 0.18, 0.015},
      {"pencil", Shape::kBox, 0.18, 0.008, 0.008},
      {"plant", Shape::kCone, 0.15, 0.15, 0.30},
      {"plate", Shape::kCylinder, 0.26, 0.26, 0.025},
      {"radio", Shape::kBox, 0.25, 0.10, 0.15},
      {"ruler", Shape::kBox, 0.30, 0.03, 0.004},
      {"saucepan", Shape::kCylinder, 0.22, 0.22, 0.12},
      {"spoon", Shape::kBox, 0.17, 0.035, 0.015},
      {"tea_pot", Shape::kSphere, 0.18, 0.18, 0.16},
      {"toaster", Shape::kBox, 0.28, 0.17, 0.19},
      {"vase", Shape::kCylinder, 0.12, 0.12, 0.30},
      {"vegetables", Shape::kSphere, 0.12, 0.10, 0.09},
  };
  return kTemplates;
}

// Primitive mesh with the given full extents, bottom at z = 0.
inline TriMesh make_object_mesh(Shape shape, const Vec3& size) {
  TriMesh m;
  switch (shape) {
    case Shape::kBox:
      return shapes::box({-0.5 * size.x(), -0.5 * size.y(), 0.0},
                         {0.5 * size.x(), 0.5 * size.y(), size.z()});
    case Shape::kCylinder:
      m = shapes::cylinder(0.5, size.z(), 20);
      break;
    case Shape::kCone:
      m = shapes::cylinder(0.5, size.z(), 20, 0.0, 0.2);
      break;
    case Shape::kSphere:
      m = shapes::sphere(Vec3(0, 0, 0.5), 0.5, 10, 20);
      for (auto& v : m.vertices) v.z() *= size.z();
      break;
  }
  for (auto& v : m.vertices) {
    v.x() *= size.x();
    v.y() *= size.y();
  }
  return m;
}

struct TableTemplate {
  const char* category;
  double width, depth, height;
  bool solid;
  bool against_wall;
};

inline const std::vector<TableTemplate>& table_templates() {
  static const std::vector<TableTemplate> kTemplates = {
      {"dining_table", 1.40, 0.90, 0.75, false, false},
      {"coffee_table", 1.00, 0.60, 0.45, false, false},
      {"writing_desk", 1.20, 0.70, 0.75, false, true},
      {"kitchen_table", 1.20, 0.80, 0.90, false, true},
      {"bathroom_counter", 1.00, 0.55, 0.85, true, true},
  };
  return kTemplates;
}

struct Options {
  int tables_per_category = 1;
  int objects_per_category = 2;
  std::uint64_t seed = 7;
  double room_size = 7.0;
  double wall_height = 2.6;
};

struct GeneratedTable {
  TableAsset asset;
  TriMesh table;
  TriMesh room;
};

// Room with floor, four walls and a few labeled furniture boxes. A table
// against the wall stands next to the -x wall with its long side along y.
inline GeneratedTable make_table(const TableTemplate& tpl, const std::string& id,
                                 Rng& rng, const Options& opt) {
  const double jitter = rng.uniform(0.9, 1.1);
  const double width = tpl.width * jitter;    // along y
  const double depth = tpl.depth * jitter;    // along x
  const double half_room = 0.5 * opt.room_size;
  const double cx = tpl.against_wall ? -half_room + 0.5 * depth + 0.01 : rng.uniform(-0.3, 0.3);
  const double cy = tpl.against_wall ? rng.uniform(-0.5, 0.5) : rng.uniform(-0.3, 0.3);

  GeneratedTable g;
  g.table = shapes::table(cx, cy, depth, width, tpl.height, 0.03, tpl.solid);
  g.table.set_labels({taxonomy::table_furniture_id(tpl.category), -1});

  const int wall = taxonomy::furniture_id("wall");
  const int floor = taxonomy::furniture_id("floor");
  TriMesh room = shapes::box({-half_room, -half_room, -0.05}, {half_room, half_room, 0.0});
  room.set_labels({floor, -1});
  const double t = 0.1, h = opt.wall_height;
  const Vec3 walls[4][2] = {
      {{-half_room - t, -half_room, 0.0}, {-half_room, half_room, h}},
      {{half_room, -half_room, 0.0}, {half_room + t, half_room, h}},
      {{-half_room, -half_room - t, 0.0}, {half_room, -half_room, h}},
      {{-half_room, half_room, 0.0}, {half_room, half_room + t, h}}};
  for (const auto& w : walls) {
    TriMesh part = shapes::box(w[0], w[1]);
    part.set_labels({wall, -1});
    room.append(part);
  }
  // Chairs near the table and a cabinet in a corner, as surrounding context.
  const int chair = taxonomy::furniture_id("chair");
  for (int k = 0; k < 2; ++k) {
    const double sy = (k == 0 ? -1.0 : 1.0);
    const double chx = cx + (tpl.against_wall ? 0.35 * depth : 0.0);
    const double chy = cy + sy * (0.5 * width + 0.35);
    TriMesh part = shapes::table(chx, chy, 0.42, 0.42, 0.45, 0.04, false);
    part.append(shapes::box({chx - 0.21, chy + (sy > 0 ? 0.17 : -0.21), 0.45},
                            {chx + 0.21, chy + (sy > 0 ? 0.21 : -0.17), 0.9}));
    part.set_labels({chair, -1});
    room.append(part);
  }
  TriMesh cabinet = shapes::box({half_room - 0.5, half_room - 1.0, 0.0},
                                {half_room, half_room, 1.8});
  cabinet.set_labels({taxonomy::furniture_id("cabinet"), -1});
  room.append(cabinet);
  g.room = std::move(room);

  g.asset.id = id;
  g.asset.category = tpl.category;
  g.asset.path = "tables/" + id + ".ply";
  g.asset.room = "rooms/" + id + "_room.ply";
  g.asset.arc = tpl.against_wall ? AzimuthArc{-90.0, 90.0} : AzimuthArc{-180.0, 180.0};
  return g;
}

// Builds an in-memory library: every table template and every tabletop class.
inline AssetLibrary make_library(const Options& opt = {}) {
  Rng rng(opt.seed);
  AssetCatalog catalog;
  std::vector<std::pair<std::string, TriMesh>> object_meshes;
  for (const auto& tpl : object_templates()) {
    for (int k = 0; k < opt.objects_per_category; ++k) {
      ObjectAsset o;
      o.id = std::string(tpl.category) + "_" + std::to_string(k);
      o.category = tpl.category;
      o.path = "objects/" + o.id + ".ply";
      o.size = Vec3(tpl.x * rng.uniform(0.85, 1.15), tpl.y * rng.uniform(0.85, 1.15),
                    tpl.z * rng.uniform(0.85, 1.15));
      object_meshes.emplace_back(o.id, make_object_mesh(tpl.shape, o.size));
      catalog.objects.push_back(std::move(o));
    }
  }
  std::vector<GeneratedTable> tables;
  for (const auto& tpl : table_templates()) {
    for (int k = 0; k < opt.tables_per_category; ++k) {
      tables.push_back(make_table(tpl, std::string(tpl.category) + "_" + std::to_string(k),
                                  rng, opt));
      catalog.tables.push_back(tables.back().asset);
    }
  }
  AssetLibrary lib(std::move(catalog), CompatibilityMap::builtin());
  for (auto& [id, mesh] : object_meshes) lib.add_object_mesh(id, mesh);
  for (auto& g : tables) {
    lib.add_mesh(g.asset.path, std::move(g.table));
    lib.add_mesh(g.asset.room, std::move(g.room));
  }
  return lib;
}

// Writes meshes and `catalog.json` under `dir`; returns the manifest path.
inline std::filesystem::path write_library(const std::filesystem::path& dir,
                                           const AssetLibrary& lib) {
  const auto& catalog = lib.catalog();
  for (const auto& o : catalog.objects) save_mesh(dir / o.path, lib.object_mesh(o.id));
  for (const auto& t : catalog.tables) {
    save_mesh(dir / t.path, lib.mesh(t.path));
    if (!t.room.empty()) save_mesh(dir / t.room, lib.mesh(t.room));
  }
  const auto manifest = dir / "catalog.json";
  write_json_file(manifest, catalog_to_json(catalog, lib.compatibility()));
  return manifest;
}

}  // namespace tablescape::synthetic

#endif  // TABLESCAPE_SYNTHETIC_HPP_

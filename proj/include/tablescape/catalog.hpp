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

#ifndef TABLESCAPE_CATALOG_HPP_
#define TABLESCAPE_CATALOG_HPP_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tablescape/error.hpp"
#include "tablescape/geometry.hpp"
#include "tablescape/mesh_io.hpp"
#include "tablescape/taxonomy.hpp"

namespace tablescape {

struct ObjectAsset {
  std::string id;
  std::string category;
  std::string path;
  Vec3 size = Vec3::Ones();  // canonical physical extents (m)
};

// Azimuth range (degrees, counter-clockwise from +x) from which a table may
// be viewed. [-180, 180] means unobstructed.
struct AzimuthArc {
  double lo_deg = -180.0;
  double hi_deg = 180.0;
  bool full_circle() const { return hi_deg - lo_deg >= 360.0 - 1e-9; }
};

struct TableAsset {
  std::string id;
  std::string category;
  std::string room;  // room mesh path
  std::string path;  // table mesh path, world frame
  AzimuthArc arc;
};

struct AssetCatalog {
  std::vector<ObjectAsset> objects;
  std::vector<TableAsset> tables;

  const ObjectAsset* find_object(const std::string& id) const {
    for (const auto& o : objects) if (o.id == id) return &o;
    return nullptr;
  }
  const TableAsset* find_table(const std::string& id) const {
    for (const auto& t : tables) if (t.id == id) return &t;
    return nullptr;
  }
  const TableAsset& table(const std::string& id) const {
    if (const auto* t = find_table(id)) return *t;
    throw UnknownTable("unknown table '" + id + "'");
  }
  const ObjectAsset& object(const std::string& id) const {
    if (const auto* o = find_object(id)) return *o;
    throw UnknownAsset("unknown asset '" + id + "'");
  }
  std::vector<const ObjectAsset*> objects_of(const std::string& category) const {
    std::vector<const ObjectAsset*> out;
    for (const auto& o : objects) if (o.category == category) out.push_back(&o);
    return out;
  }
};

// Table category -> allowed object categories.
struct CompatibilityMap {
  std::map<std::string, std::vector<std::string>> allowed;

  static CompatibilityMap builtin() { return {taxonomy::default_compatibility()}; }
};

inline std::vector<std::string> candidate_categories(const std::string& table_id,
                                                     const AssetCatalog& catalog,
                                                     const CompatibilityMap& map) {
  const TableAsset& table = catalog.table(table_id);
  const auto it = map.allowed.find(table.category);
  if (it == map.allowed.end()) return {};
  std::vector<std::string> out = it->second;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct CatalogFinding {
  std::string kind;     // duplicate_id, dangling_mesh, empty_category_table, ...
  std::string subject;  // offending id or path
  std::string detail;
};

// Report-only consistency check of a catalog against the files under `root`.
inline std::vector<CatalogFinding> validate_catalog(
    const AssetCatalog& catalog, const CompatibilityMap& map,
    const std::filesystem::path& root) {
  std::vector<CatalogFinding> report;
  std::set<std::string> seen;
  auto check_id = [&](const std::string& id) {
    if (!seen.insert(id).second) {
      report.push_back({"duplicate_id", id, "asset id used more than once"});
    }
  };
  auto check_path = [&](const std::string& id, const std::string& path) {
    if (!std::filesystem::exists(root / path)) {
      report.push_back({"dangling_mesh", id, "missing mesh file " + path});
    }
  };
  std::set<std::string> known(taxonomy::kTabletop.begin(), taxonomy::kTabletop.end());
  for (const auto& o : catalog.objects) {
    check_id(o.id);
    check_path(o.id, o.path);
    if (!known.count(o.category)) {
      report.push_back({"unknown_category", o.id, "category " + o.category});
    }
    if (!(o.size.array() > 0.0).all()) {
      report.push_back({"bad_size", o.id, "physical size must be positive"});
    }
  }
  std::set<std::string> checked_rooms;
  for (const auto& t : catalog.tables) {
    check_id(t.id);
    check_path(t.id, t.path);
    if (!t.room.empty() && checked_rooms.insert(t.room).second) {
      check_path(t.id, t.room);
    }
    const auto it = map.allowed.find(t.category);
    if (it == map.allowed.end() || it->second.empty()) {
      report.push_back({"empty_category_table", t.id,
                        "no object categories for table category " + t.category});
    }
    if (t.arc.hi_deg <= t.arc.lo_deg) {
      report.push_back({"bad_arc", t.id, "azimuth arc is empty"});
    }
  }
  for (const auto& [table_cat, cats] : map.allowed) {
    for (const auto& c : cats) {
      if (!known.count(c)) {
        report.push_back({"unknown_category", table_cat, "compatibility lists " + c});
      }
    }
  }
  return report;
}

inline nlohmann::json catalog_to_json(const AssetCatalog& catalog,
                                      const CompatibilityMap& map) {
  nlohmann::json j;
  j["objects"] = nlohmann::json::array();
  for (const auto& o : catalog.objects) {
    j["objects"].push_back({{"id", o.id},
                            {"category", o.category},
                            {"path", o.path},
                            {"size", {o.size.x(), o.size.y(), o.size.z()}}});
  }
  j["tables"] = nlohmann::json::array();
  for (const auto& t : catalog.tables) {
    j["tables"].push_back({{"id", t.id},
                           {"category", t.category},
                           {"room", t.room},
                           {"path", t.path},
                           {"arc_deg", {t.arc.lo_deg, t.arc.hi_deg}}});
  }
  j["compatibility"] = map.allowed;
  return j;
}

// Parses a manifest document. A missing `compatibility` key selects the
// built-in map.
inline std::pair<AssetCatalog, CompatibilityMap> catalog_from_json(
    const nlohmann::json& j) {
  AssetCatalog catalog;
  CompatibilityMap map;
  try {
    for (const auto& o : j.value("objects", nlohmann::json::array())) {
      ObjectAsset a;
      a.id = o.at("id").get<std::string>();
      a.category = o.at("category").get<std::string>();
      a.path = o.at("path").get<std::string>();
      const auto s = o.at("size");
      a.size = Vec3(s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<double>());
      catalog.objects.push_back(std::move(a));
    }
    for (const auto& t : j.value("tables", nlohmann::json::array())) {
      TableAsset a;
      a.id = t.at("id").get<std::string>();
      a.category = t.at("category").get<std::string>();
      a.room = t.value("room", std::string{});
      a.path = t.at("path").get<std::string>();
      if (t.contains("arc_deg")) {
        a.arc.lo_deg = t["arc_deg"].at(0).get<double>();
        a.arc.hi_deg = t["arc_deg"].at(1).get<double>();
      }
      catalog.tables.push_back(std::move(a));
    }
    if (j.contains("compatibility")) {
      map.allowed = j["compatibility"].get<std::map<std::string, std::vector<std::string>>>();
    } else {
      map = CompatibilityMap::builtin();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad catalog manifest: ") + e.what(), 0, 0);
  }
  return {std::move(catalog), std::move(map)};
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("bad JSON in ") + path.string() + ": " + e.what(), 0,
                     e.byte);
  }
}

inline void write_json_file(const std::filesystem::path& path,
                            const nlohmann::json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// Moves a mesh into the canonical object frame: bottom face at z = 0,
// centered in x/y, uniformly scaled so its largest extent matches the
// largest physical size.
inline TriMesh canonicalize_object(const TriMesh& mesh, const Vec3& size) {
  const Aabb box = aabb_of(mesh);
  const double extent = box.extents().maxCoeff();
  const double scale = extent > 0.0 ? size.maxCoeff() / extent : 1.0;
  const Vec3 anchor(box.center().x(), box.center().y(), box.min.z());
  TriMesh out = mesh;
  for (auto& v : out.vertices) v = (v - anchor) * scale;
  return out;
}

// Catalog plus loaded geometry. Immutable after construction; concurrent
// reads are safe.
class AssetLibrary {
 public:
  AssetLibrary() = default;
  AssetLibrary(AssetCatalog catalog, CompatibilityMap map)
      : catalog_(std::move(catalog)), map_(std::move(map)) {}

  // Loads the manifest and every referenced mesh; paths are relative to the
  // manifest's directory.
  static AssetLibrary open(const std::filesystem::path& manifest) {
    auto [catalog, map] = catalog_from_json(read_json_file(manifest));
    AssetLibrary lib(std::move(catalog), std::move(map));
    lib.root_ = manifest.parent_path();
    for (const auto& o : lib.catalog_.objects) {
      lib.add_object_mesh(o.id, load_mesh(lib.root_ / o.path));
    }
    for (const auto& t : lib.catalog_.tables) {
      if (!lib.meshes_.count(t.path)) lib.meshes_[t.path] = load_mesh(lib.root_ / t.path);
      if (!t.room.empty() && !lib.meshes_.count(t.room)) {
        lib.meshes_[t.room] = load_mesh(lib.root_ / t.room);
      }
    }
    return lib;
  }

  const AssetCatalog& catalog() const { return catalog_; }
  const CompatibilityMap& compatibility() const { return map_; }
  const std::filesystem::path& root() const { return root_; }

  // Registers a raw object mesh; it is stored in the canonical frame.
  void add_object_mesh(const std::string& object_id, const TriMesh& raw) {
    const ObjectAsset& o = catalog_.object(object_id);
    object_meshes_[object_id] = canonicalize_object(raw, o.size);
  }

  // Registers a world-frame mesh (table or room) under its catalog path.
  void add_mesh(const std::string& path, TriMesh mesh) { meshes_[path] = std::move(mesh); }

  const TriMesh& object_mesh(const std::string& object_id) const {
    const auto it = object_meshes_.find(object_id);
    if (it == object_meshes_.end()) throw UnknownAsset("no mesh for asset '" + object_id + "'");
    return it->second;
  }

  const TriMesh& mesh(const std::string& path) const {
    const auto it = meshes_.find(path);
    if (it == meshes_.end()) throw UnknownAsset("no mesh loaded for '" + path + "'");
    return it->second;
  }

  const TriMesh& table_mesh(const std::string& table_id) const {
    return mesh(catalog_.table(table_id).path);
  }

  // Empty mesh when the table has no room.
  TriMesh room_mesh(const std::string& table_id) const {
    const auto& t = catalog_.table(table_id);
    if (t.room.empty()) return {};
    return mesh(t.room);
  }

  std::vector<std::string> candidates(const std::string& table_id) const {
    return candidate_categories(table_id, catalog_, map_);
  }

 private:
  AssetCatalog catalog_;
  CompatibilityMap map_;
  std::filesystem::path root_;
  std::map<std::string, TriMesh> object_meshes_;
  std::map<std::string, TriMesh> meshes_;
};

}  // namespace tablescape

#endif  // TABLESCAPE_CATALOG_HPP_

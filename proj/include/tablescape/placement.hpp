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

#ifndef TABLESCAPE_PLACEMENT_HPP_
#define TABLESCAPE_PLACEMENT_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tablescape/catalog.hpp"
#include "tablescape/error.hpp"
#include "tablescape/geometry.hpp"
#include "tablescape/rng.hpp"
#include "tablescape/taxonomy.hpp"

namespace tablescape {

enum class Variant { kVanilla, kCrowd, kWholeRoom };

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::kVanilla: return "vanilla";
    case Variant::kCrowd: return "crowd";
    case Variant::kWholeRoom: return "whole_room";
  }
  return "vanilla";
}

inline Variant variant_from_string(const std::string& s) {
  if (s == "vanilla") return Variant::kVanilla;
  if (s == "crowd") return Variant::kCrowd;
  if (s == "whole_room") return Variant::kWholeRoom;
  throw InvalidArgument("unknown variant '" + s + "'");
}

struct CountRange {
  int min = 3;
  int max = 8;
};

// Objects per table: ~5.0 per vanilla scene (60,174 / 12,078) and ~13.0 per
// crowd scene (52,055 / 3,999). Whole-room samples reuse vanilla tables.
inline CountRange default_count_range(Variant v) {
  return v == Variant::kCrowd ? CountRange{10, 16} : CountRange{3, 8};
}

// Overlap (m) tolerated along at least one axis before two object boxes
// count as colliding.
inline double pack_tolerance(Variant v) { return v == Variant::kCrowd ? 1e-3 : 0.0; }

// Axis-aligned rectangle on the table plane.
struct BevRect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  bool overlaps(const BevRect& o) const {
    return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1;
  }
  Vec2 center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  double width() const { return x1 - x0; }
  double depth() const { return y1 - y0; }
  double diagonal() const { return std::hypot(width(), depth()); }
  friend bool operator==(const BevRect&, const BevRect&) = default;

  static BevRect of(const Aabb& box) {
    return {box.min.x(), box.min.y(), box.max.x(), box.max.y()};
  }
};

struct Placement {
  int id = 0;
  std::string asset_id;
  RigidPlacementTransform transform;
  BevRect footprint;  // projected AABB of the transformed object
  Aabb bounds;        // 3D AABB of the transformed object
};

struct SceneConfig {
  std::string room_ref;
  std::string table_id;
  std::vector<Placement> placements;
  std::uint64_t seed = 0;
  Variant variant = Variant::kVanilla;

  int next_placement_id() const {
    int next = 0;
    for (const auto& p : placements) next = std::max(next, p.id + 1);
    return next;
  }
  Placement* find(int id) {
    for (auto& p : placements) if (p.id == id) return &p;
    return nullptr;
  }
  const Placement* find(int id) const {
    for (const auto& p : placements) if (p.id == id) return &p;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Serialization. Doubles are written with round-trip precision, so a config
// re-materializes bit-identically after a save/load cycle.

inline nlohmann::json to_json(const Placement& p) {
  const auto& t = p.transform;
  return {{"id", p.id},
          {"asset_id", p.asset_id},
          {"translation", {t.translation.x(), t.translation.y(), t.translation.z()}},
          {"yaw", t.yaw},
          {"pitch", t.pitch},
          {"roll", t.roll},
          {"scale", t.scale},
          {"footprint", {p.footprint.x0, p.footprint.y0, p.footprint.x1, p.footprint.y1}},
          {"bounds",
           {{"min", {p.bounds.min.x(), p.bounds.min.y(), p.bounds.min.z()}},
            {"max", {p.bounds.max.x(), p.bounds.max.y(), p.bounds.max.z()}}}}};
}

inline Vec3 vec3_from_json(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

inline Placement placement_from_json(const nlohmann::json& j) {
  Placement p;
  p.id = j.at("id").get<int>();
  p.asset_id = j.at("asset_id").get<std::string>();
  p.transform.translation = vec3_from_json(j.at("translation"));
  p.transform.yaw = j.at("yaw").get<double>();
  p.transform.pitch = j.value("pitch", 0.0);
  p.transform.roll = j.value("roll", 0.0);
  p.transform.scale = j.at("scale").get<double>();
  const auto& f = j.at("footprint");
  p.footprint = {f.at(0).get<double>(), f.at(1).get<double>(), f.at(2).get<double>(),
                 f.at(3).get<double>()};
  p.bounds.min = vec3_from_json(j.at("bounds").at("min"));
  p.bounds.max = vec3_from_json(j.at("bounds").at("max"));
  return p;
}

inline nlohmann::json to_json(const SceneConfig& c) {
  nlohmann::json placements = nlohmann::json::array();
  for (const auto& p : c.placements) placements.push_back(to_json(p));
  return {{"room", c.room_ref},
          {"table_id", c.table_id},
          {"seed", c.seed},
          {"variant", to_string(c.variant)},
          {"placements", placements}};
}

inline SceneConfig scene_config_from_json(const nlohmann::json& j) {
  try {
    SceneConfig c;
    c.room_ref = j.value("room", std::string{});
    c.table_id = j.at("table_id").get<std::string>();
    c.seed = j.value("seed", std::uint64_t{0});
    c.variant = variant_from_string(j.value("variant", std::string("vanilla")));
    for (const auto& p : j.at("placements")) c.placements.push_back(placement_from_json(p));
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad scene config: ") + e.what(), 0, 0);
  }
}

// ---------------------------------------------------------------------------
// Support height.

namespace detail {

// Clips a 3D polygon against the half-space sign * (p[axis] - bound) >= 0.
inline std::vector<Vec3> clip_halfspace(const std::vector<Vec3>& poly, int axis,
                                        double bound, double sign) {
  std::vector<Vec3> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& cur = poly[i];
    const Vec3& prev = poly[(i + n - 1) % n];
    const double dc = sign * (cur[axis] - bound);
    const double dp = sign * (prev[axis] - bound);
    if (dc >= 0.0) {
      if (dp < 0.0) {
        Vec3 q = prev + (cur - prev) * (dp / (dp - dc));
        q[axis] = bound;
        out.push_back(q);
      }
      out.push_back(cur);
    } else if (dp >= 0.0) {
      Vec3 q = prev + (cur - prev) * (dp / (dp - dc));
      q[axis] = bound;
      out.push_back(q);
    }
  }
  return out;
}

}  // namespace detail

// Highest point of the table surface inside the vertical prism over
// `footprint`. Each triangle is clipped to the prism exactly and the maximum
// of its (linear) height is taken at the clipped polygon's vertices.
inline double calibrate_height(const TriMesh& table, const BevRect& footprint) {
  double best = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (const auto& f : table.faces) {
    const Vec3& a = table.vertices[f[0]];
    const Vec3& b = table.vertices[f[1]];
    const Vec3& c = table.vertices[f[2]];
    const double minx = std::min({a.x(), b.x(), c.x()}), maxx = std::max({a.x(), b.x(), c.x()});
    const double miny = std::min({a.y(), b.y(), c.y()}), maxy = std::max({a.y(), b.y(), c.y()});
    if (maxx < footprint.x0 || minx > footprint.x1 || maxy < footprint.y0 ||
        miny > footprint.y1) {
      continue;
    }
    std::vector<Vec3> poly = {a, b, c};
    poly = detail::clip_halfspace(poly, 0, footprint.x0, 1.0);
    if (!poly.empty()) poly = detail::clip_halfspace(poly, 0, footprint.x1, -1.0);
    if (!poly.empty()) poly = detail::clip_halfspace(poly, 1, footprint.y0, 1.0);
    if (!poly.empty()) poly = detail::clip_halfspace(poly, 1, footprint.y1, -1.0);
    for (const auto& p : poly) {
      best = std::max(best, p.z());
      found = true;
    }
  }
  if (!found) throw OffTable("footprint does not overlap the table");
  return best;
}

// ---------------------------------------------------------------------------
// Collision.

struct CollisionResult {
  std::vector<int> ids;  // empty when ok
  bool ok() const { return ids.empty(); }
};

// Two boxes collide when their overlap exceeds `tolerance` along every axis;
// shared faces (zero-volume contact) never collide.
inline bool aabb_collide(const Aabb& a, const Aabb& b, double tolerance) {
  for (int k = 0; k < 3; ++k) {
    const double overlap = std::min(a.max[k], b.max[k]) - std::max(a.min[k], b.min[k]);
    if (overlap <= tolerance) return false;
  }
  return true;
}

inline CollisionResult check_collision(const Placement& p,
                                       const std::vector<Placement>& others,
                                       double tolerance = 0.0) {
  CollisionResult r;
  for (const auto& o : others) {
    if (o.id == p.id) continue;
    if (aabb_collide(p.bounds, o.bounds, tolerance)) r.ids.push_back(o.id);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Placing objects.

struct PlacementRequest {
  std::string asset_id;
  Vec2 bev_xy = Vec2::Zero();
  double yaw = 0.0;
  double scale = 1.0;
  double pitch = 0.0;
  double roll = 0.0;
};

inline TriMesh object_world_mesh(const Placement& p, const AssetLibrary& lib) {
  return apply_transform(lib.object_mesh(p.asset_id), p.transform);
}

// Poses the object at bev_xy and drops it so its lowest vertex rests on the
// calibrated support height. No compatibility or collision checks.
inline Placement resolve_placement(const TriMesh& table, const AssetLibrary& lib,
                                   const PlacementRequest& req, int id = 0) {
  Placement p;
  p.id = id;
  p.asset_id = req.asset_id;
  RigidPlacementTransform t;
  t.yaw = req.yaw;
  t.pitch = req.pitch;
  t.roll = req.roll;
  t.scale = req.scale;
  t = t.normalized();
  const TriMesh& canonical = lib.object_mesh(req.asset_id);
  // Center the rotated object's footprint on the clicked point.
  Aabb local;
  const Mat3 r = t.rotation();
  for (const auto& v : canonical.vertices) local.extend(r * (t.scale * v));
  const Vec3 shift(req.bev_xy.x() - local.center().x(), req.bev_xy.y() - local.center().y(), 0.0);
  const BevRect footprint{local.min.x() + shift.x(), local.min.y() + shift.y(),
                          local.max.x() + shift.x(), local.max.y() + shift.y()};
  const double support = calibrate_height(table, footprint);
  t.translation = Vec3(shift.x(), shift.y(), support - local.min.z());
  p.transform = t;
  p.footprint = footprint;
  p.bounds = Aabb{local.min + t.translation, local.max + t.translation};
  return p;
}

inline void require_compatible(const SceneConfig& config, const AssetLibrary& lib,
                               const std::string& asset_id) {
  const auto& asset = lib.catalog().object(asset_id);
  const auto cats = lib.candidates(config.table_id);
  if (!std::binary_search(cats.begin(), cats.end(), asset.category)) {
    throw IncompatibleCategory("category '" + asset.category + "' does not fit table '" +
                               config.table_id + "'");
  }
}

// Places an object and appends it to the config. Throws IncompatibleCategory,
// OffTable or Collision; the config is unchanged on error.
inline Placement place(SceneConfig& config, const AssetLibrary& lib,
                       const PlacementRequest& req) {
  require_compatible(config, lib, req.asset_id);
  Placement p = resolve_placement(lib.table_mesh(config.table_id), lib, req,
                                  config.next_placement_id());
  const auto hit = check_collision(p, config.placements, pack_tolerance(config.variant));
  if (!hit.ok()) throw Collision(hit.ids);
  config.placements.push_back(p);
  return p;
}

// Lowest object point minus the support height under its footprint.
inline double support_gap(const Placement& p, const AssetLibrary& lib,
                          const TriMesh& table) {
  const TriMesh world = object_world_mesh(p, lib);
  return aabb_of(world).min.z() - calibrate_height(table, p.footprint);
}

inline SceneConfig new_scene(const AssetLibrary& lib, const std::string& table_id,
                             Variant variant, std::uint64_t seed) {
  SceneConfig c;
  c.table_id = table_id;
  c.room_ref = lib.catalog().table(table_id).room;
  c.variant = variant;
  c.seed = seed;
  return c;
}

inline constexpr int kMaxPlacementAttempts = 50;

// Headless stand-in for a crowd worker: draws n ~ U[range] compatible objects
// and rejection-samples uniform positions/yaws on the table, at most
// kMaxPlacementAttempts per object.
inline SceneConfig procedural_place(const SceneConfig& base, const AssetLibrary& lib,
                                    CountRange range, std::uint64_t seed) {
  if (range.min < 0 || range.max < range.min) throw InvalidArgument("bad count range");
  SceneConfig config = base;
  config.seed = seed;
  Rng rng(seed);
  const TriMesh& table = lib.table_mesh(config.table_id);
  const BevRect top = BevRect::of(aabb_of(table));
  std::vector<std::string> categories;
  for (const auto& c : lib.candidates(config.table_id)) {
    if (!lib.catalog().objects_of(c).empty()) categories.push_back(c);
  }
  if (categories.empty()) throw PlacementExhausted("no placeable categories for table");
  const int target = static_cast<int>(rng.between(range.min, range.max));
  int placed = 0;
  for (int k = 0; k < target; ++k) {
    const auto& category = categories[rng.below(categories.size())];
    const auto assets = lib.catalog().objects_of(category);
    const ObjectAsset& asset = *assets[rng.below(assets.size())];
    for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
      PlacementRequest req;
      req.asset_id = asset.id;
      req.yaw = rng.uniform(-std::numbers::pi, std::numbers::pi);
      // Keep the footprint on the table when it fits; otherwise allow overhang.
      const double r = 0.5 * std::hypot(asset.size.x(), asset.size.y());
      const double mx = std::min(r, 0.5 * top.width() - 1e-3);
      const double my = std::min(r, 0.5 * top.depth() - 1e-3);
      req.bev_xy = Vec2(rng.uniform(top.x0 + std::max(mx, 0.0), top.x1 - std::max(mx, 0.0)),
                        rng.uniform(top.y0 + std::max(my, 0.0), top.y1 - std::max(my, 0.0)));
      try {
        place(config, lib, req);
        ++placed;
        break;
      } catch (const Collision&) {
      } catch (const OffTable&) {
      }
    }
  }
  if (placed < range.min) {
    throw PlacementExhausted("placed " + std::to_string(placed) + " of at least " +
                             std::to_string(range.min) + " objects");
  }
  return config;
}

// ---------------------------------------------------------------------------
// Materialization.

struct MaterializedScene {
  TriMesh mesh;                // room + table + objects, labeled
  std::vector<BBox3D> boxes;   // one per placement, instance = placement order
  std::vector<TriMesh> objects;  // per-placement world meshes
};

// Tight box of a transformed object in the placement's yaw frame.
inline BBox3D object_box(const TriMesh& world, double yaw, int semantic, int instance) {
  const Mat3 unyaw = rotation_z(-yaw);
  Aabb local;
  for (const auto& v : world.vertices) local.extend(unyaw * v);
  BBox3D b;
  b.center = rotation_z(yaw) * local.center();
  b.dims = local.extents().cwiseMax(Vec3::Constant(1e-6));
  b.yaw = yaw;
  b.semantic_id = semantic;
  b.instance_id = instance;
  return b;
}

inline MaterializedScene materialize(const SceneConfig& config, const AssetLibrary& lib) {
  const TableAsset& table = lib.catalog().table(config.table_id);
  MaterializedScene scene;
  TriMesh room = lib.room_mesh(config.table_id);
  if (!room.has_labels()) room.set_labels({});
  scene.mesh = std::move(room);
  TriMesh table_mesh = lib.table_mesh(config.table_id);
  if (!table_mesh.has_labels()) {
    table_mesh.set_labels({taxonomy::table_furniture_id(table.category), -1});
  }
  scene.mesh.append(table_mesh);
  for (std::size_t i = 0; i < config.placements.size(); ++i) {
    const auto& p = config.placements[i];
    const int semantic = taxonomy::tabletop_id(lib.catalog().object(p.asset_id).category);
    const int instance = static_cast<int>(i);
    TriMesh obj = object_world_mesh(p, lib);
    scene.boxes.push_back(object_box(obj, p.transform.yaw, semantic, instance));
    TriMesh labeled = obj;
    labeled.set_labels({semantic, instance});
    scene.mesh.append(labeled);
    scene.objects.push_back(std::move(obj));
  }
  return scene;
}

// Cold re-validation of a stored config: table exists, categories fit,
// derived footprints/bounds match, contact holds and no collisions.
inline std::vector<std::string> validate_config(const SceneConfig& config,
                                                const AssetLibrary& lib,
                                                double contact_tol = 1e-6) {
  std::vector<std::string> issues;
  if (!lib.catalog().find_table(config.table_id)) {
    issues.push_back("unknown table " + config.table_id);
    return issues;
  }
  const TriMesh& table = lib.table_mesh(config.table_id);
  for (const auto& p : config.placements) {
    const std::string tag = "placement " + std::to_string(p.id) + ": ";
    if (!lib.catalog().find_object(p.asset_id)) {
      issues.push_back(tag + "unknown asset " + p.asset_id);
      continue;
    }
    try {
      require_compatible(config, lib, p.asset_id);
    } catch (const IncompatibleCategory& e) {
      issues.push_back(tag + e.what());
    }
    const Aabb actual = aabb_of(object_world_mesh(p, lib));
    if ((actual.min - p.bounds.min).cwiseAbs().maxCoeff() > contact_tol ||
        (actual.max - p.bounds.max).cwiseAbs().maxCoeff() > contact_tol) {
      issues.push_back(tag + "stored bounds do not match the transformed asset");
    }
    try {
      const double gap = actual.min.z() - calibrate_height(table, BevRect::of(actual));
      if (std::abs(gap) > contact_tol) {
        issues.push_back(tag + "support gap " + std::to_string(gap));
      }
    } catch (const OffTable&) {
      issues.push_back(tag + "off table");
    }
    const auto hit = check_collision(p, config.placements, pack_tolerance(config.variant));
    if (!hit.ok()) issues.push_back(tag + "collides");
  }
  return issues;
}

}  // namespace tablescape

#endif  // TABLESCAPE_PLACEMENT_HPP_

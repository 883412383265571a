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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "tablescape/bvh.hpp"
#include "tablescape/placement.hpp"
#include "tablescape/shapes.hpp"
#include "test_util.hpp"

namespace tablescape {
namespace {

// Coffee table whose top is the plane z = 0.7 + slope * x over [-0.5, 0.5]^2.
AssetLibrary sloped_library(double slope = 0.1) {
  AssetCatalog c;
  c.tables.push_back({"slope", "coffee_table", "", "slope.ply", {}});
  c.objects.push_back({"mug_a", "mug", "mug_a.ply", Vec3(0.08, 0.08, 0.1)});
  c.objects.push_back({"book_a", "book", "book_a.ply", Vec3(0.2, 0.15, 0.03)});
  c.objects.push_back({"pencil_a", "pencil", "pencil_a.ply", Vec3(0.15, 0.01, 0.01)});
  AssetLibrary lib(c, CompatibilityMap::builtin());
  TriMesh top;
  for (double x : {-0.5, 0.5}) {
    for (double y : {-0.5, 0.5}) top.vertices.emplace_back(x, y, 0.7 + slope * x);
  }
  top.faces = {{0, 2, 3}, {0, 3, 1}};
  lib.add_mesh("slope.ply", top);
  lib.add_object_mesh("mug_a", shapes::cylinder(0.5, 1.0, 16));
  lib.add_object_mesh("book_a", shapes::box(Vec3::Zero(), Vec3(0.2, 0.15, 0.03)));
  lib.add_object_mesh("pencil_a", shapes::box(Vec3::Zero(), Vec3(0.15, 0.01, 0.01)));
  return lib;
}

// Highest downward-ray hit over a 1 mm grid covering the footprint.
double raster_height(const TriMesh& table, const BevRect& f) {
  const Bvh bvh(table);
  double best = -std::numeric_limits<double>::infinity();
  const double step = 0.001;
  const int nx = static_cast<int>(std::ceil(f.width() / step));
  const int ny = static_cast<int>(std::ceil(f.depth() / step));
  for (int i = 0; i <= nx; ++i) {
    for (int j = 0; j <= ny; ++j) {
      const Vec3 o(std::min(f.x0 + i * step, f.x1), std::min(f.y0 + j * step, f.y1), 10.0);
      if (auto hit = bvh.intersect(o, -Vec3::UnitZ(), 0.0)) best = std::max(best, 10.0 - hit->t);
    }
  }
  return best;
}

TEST(Calibrate, FlatTopIsExact) {
  const TriMesh t = shapes::table(0, 0, 1.2, 0.8, 0.75);
  EXPECT_DOUBLE_EQ(calibrate_height(t, {-0.1, -0.1, 0.1, 0.1}), 0.75);
}

TEST(Calibrate, BumpUnderFootprintRaisesSupport) {
  TriMesh t = shapes::table(0, 0, 1.2, 0.8, 0.75);
  t.append(shapes::box(Vec3(0.1, 0.1, 0.75), Vec3(0.12, 0.12, 0.77)));
  EXPECT_NEAR(calibrate_height(t, {0.05, 0.05, 0.15, 0.15}), 0.77, 1e-12);
  EXPECT_DOUBLE_EQ(calibrate_height(t, {-0.3, -0.3, -0.2, -0.2}), 0.75);
}

TEST(Calibrate, SlopedTopMatchesPlaneMaximum) {
  const AssetLibrary lib = sloped_library();
  const TriMesh& t = lib.table_mesh("slope");
  const BevRect f{0.1, -0.2, 0.3, 0.0};
  EXPECT_NEAR(calibrate_height(t, f), 0.7 + 0.1 * 0.3, 1e-12);
  // Footprint hanging over the +x edge: the highest point is at the edge.
  EXPECT_NEAR(calibrate_height(t, {0.45, 0.0, 0.6, 0.1}), 0.75, 1e-12);
}

TEST(Calibrate, AgreesWithMillimeterRaster) {
  const AssetLibrary lib = sloped_library();
  const TriMesh& t = lib.table_mesh("slope");
  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    const double x = rng.uniform(-0.45, 0.4), y = rng.uniform(-0.45, 0.4);
    const BevRect f{x, y, x + rng.uniform(0.01, 0.1), y + rng.uniform(0.01, 0.1)};
    const double exact = calibrate_height(t, f);
    const double raster = raster_height(t, f);
    EXPECT_GE(exact, raster - 1e-12);
    EXPECT_LE(exact - raster, 0.1 * 0.001 + 1e-12);
  }
}

TEST(Calibrate, OffTableThrows) {
  const AssetLibrary lib = sloped_library();
  const TriMesh& t = lib.table_mesh("slope");
  EXPECT_THROW(calibrate_height(t, {2, 2, 2.1, 2.1}), OffTable);
}

TEST(Place, ObjectRestsOnSlope) {
  const AssetLibrary lib = sloped_library();
  SceneConfig c = new_scene(lib, "slope", Variant::kVanilla, 1);
  PlacementRequest req{"mug_a", Vec2(0.2, 0.1), 0.4, 1.0, 0.0, 0.0};
  const Placement p = place(c, lib, req);
  EXPECT_NEAR(p.footprint.center().x(), 0.2, 1e-12);
  EXPECT_NEAR(p.footprint.center().y(), 0.1, 1e-12);
  EXPECT_NEAR(p.bounds.min.z(), 0.7 + 0.1 * p.footprint.x1, 1e-12);
  EXPECT_NEAR(support_gap(p, lib, lib.table_mesh("slope")), 0.0, 1e-12);
}

TEST(Place, PitchAndRollKeepContact) {
  const AssetLibrary lib = sloped_library();
  SceneConfig c = new_scene(lib, "slope", Variant::kVanilla, 1);
  PlacementRequest req{"book_a", Vec2(-0.1, 0.0), 0.2, 1.3, 0.3, -0.2};
  const Placement p = place(c, lib, req);
  EXPECT_NEAR(support_gap(p, lib, lib.table_mesh("slope")), 0.0, 1e-12);
  EXPECT_NEAR(p.transform.scale, 1.3, 0.0);
}

TEST(Place, CollisionRejectedAndConfigUnchanged) {
  const AssetLibrary lib = sloped_library();
  SceneConfig c = new_scene(lib, "slope", Variant::kVanilla, 1);
  place(c, lib, {"mug_a", Vec2(0, 0)});
  const auto before = to_json(c);
  try {
    place(c, lib, {"mug_a", Vec2(0.01, 0.0)});
    FAIL() << "expected Collision";
  } catch (const Collision& e) {
    EXPECT_EQ(e.ids(), std::vector<int>{0});
  }
  EXPECT_EQ(to_json(c), before);
}

TEST(Place, TouchingFacesDoNotCollide) {
  Placement a, b;
  a.bounds = {Vec3(0, 0, 0), Vec3(1, 1, 1)};
  b.id = 1;
  b.bounds = {Vec3(1, 0, 0), Vec3(2, 1, 1)};
  EXPECT_TRUE(check_collision(b, {a}).ok());
  b.bounds.min.x() = 0.9995;
  EXPECT_FALSE(check_collision(b, {a}).ok());
  EXPECT_TRUE(check_collision(b, {a}, pack_tolerance(Variant::kCrowd)).ok());
}

TEST(Place, IncompatibleAndUnknownAssets) {
  const AssetLibrary lib = sloped_library();
  SceneConfig c = new_scene(lib, "slope", Variant::kVanilla, 1);
  EXPECT_THROW(place(c, lib, {"pencil_a", Vec2(0, 0)}), IncompatibleCategory);
  EXPECT_THROW(place(c, lib, {"nope", Vec2(0, 0)}), UnknownAsset);
  EXPECT_THROW(place(c, lib, {"mug_a", Vec2(3, 3)}), OffTable);
  EXPECT_TRUE(c.placements.empty());
}

TEST(Place, IdsStayUniqueAfterDeletion) {
  const AssetLibrary lib = sloped_library();
  SceneConfig c = new_scene(lib, "slope", Variant::kVanilla, 1);
  place(c, lib, {"mug_a", Vec2(-0.3, 0)});
  place(c, lib, {"mug_a", Vec2(0.3, 0)});
  c.placements.erase(c.placements.begin());
  EXPECT_EQ(place(c, lib, {"mug_a", Vec2(0, 0)}).id, 2);
}

TEST(Procedural, CountsWithinVariantRanges) {
  const auto& lib = testing::library();
  for (Variant v : {Variant::kVanilla, Variant::kCrowd}) {
    const CountRange r = default_count_range(v);
    for (const auto& t : lib.catalog().tables) {
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        SceneConfig c;
        try {
          c = procedural_place(new_scene(lib, t.id, v, seed), lib, r, seed);
        } catch (const PlacementExhausted&) {
          continue;  // small tables may not fit a crowd
        }
        const int n = static_cast<int>(c.placements.size());
        EXPECT_GE(n, r.min);
        EXPECT_LE(n, r.max);
        EXPECT_TRUE(validate_config(c, lib).empty()) << t.id;
      }
    }
  }
}

TEST(Procedural, CrowdRangeIsDenser) {
  EXPECT_EQ(default_count_range(Variant::kVanilla).min, 3);
  EXPECT_EQ(default_count_range(Variant::kVanilla).max, 8);
  EXPECT_EQ(default_count_range(Variant::kCrowd).min, 10);
  EXPECT_EQ(default_count_range(Variant::kCrowd).max, 16);
}

TEST(Procedural, SameSeedSameScene) {
  const auto& lib = testing::library();
  const auto base = new_scene(lib, "dining_table_0", Variant::kVanilla, 9);
  const auto a = procedural_place(base, lib, default_count_range(Variant::kVanilla), 9);
  const auto b = procedural_place(base, lib, default_count_range(Variant::kVanilla), 9);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

TEST(Config, JsonRoundTrip) {
  const auto& lib = testing::library();
  const auto c = procedural_place(new_scene(lib, "kitchen_table_0", Variant::kVanilla, 4), lib,
                                  default_count_range(Variant::kVanilla), 4);
  const auto back = scene_config_from_json(nlohmann::json::parse(to_json(c).dump()));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_TRUE(validate_config(back, lib).empty());
}

TEST(Config, TamperedConfigFailsValidation) {
  const auto& lib = testing::library();
  auto c = procedural_place(new_scene(lib, "kitchen_table_0", Variant::kVanilla, 4), lib,
                            default_count_range(Variant::kVanilla), 4);
  c.placements[0].transform.translation.z() += 0.01;
  EXPECT_FALSE(validate_config(c, lib).empty());
}

TEST(Materialize, BoxesContainTheirObjects) {
  const auto& lib = testing::library();
  const auto c = procedural_place(new_scene(lib, "coffee_table_0", Variant::kVanilla, 2), lib,
                                  default_count_range(Variant::kVanilla), 2);
  const MaterializedScene s = materialize(c, lib);
  ASSERT_EQ(s.boxes.size(), c.placements.size());
  for (std::size_t i = 0; i < s.boxes.size(); ++i) {
    EXPECT_EQ(s.boxes[i].instance_id, static_cast<int>(i));
    EXPECT_TRUE(taxonomy::is_tabletop(s.boxes[i].semantic_id));
    for (const auto& v : s.objects[i].vertices) EXPECT_TRUE(point_in_obb(v, s.boxes[i], 1e-9));
  }
  s.mesh.validate();
  EXPECT_EQ(s.mesh.labels.size(), s.mesh.vertices.size());
}

TEST(Examples, CupOnFlatTableTouchesTop) {
  const AssetLibrary lib = sloped_library(0.0);
  SceneConfig c = new_scene(lib, "slope", Variant::kVanilla, 1);
  const Placement p = place(c, lib, {"mug_a", Vec2(0.1, 0.2)});
  EXPECT_NEAR(p.bounds.min.z(), 0.7, 1e-6);
  EXPECT_NEAR(support_gap(p, lib, lib.table_mesh("slope")), 0.0, 1e-6);
  EXPECT_THROW(place(c, lib, {"mug_a", Vec2(0.1, 0.2)}), Collision);
}

TEST(Examples, IdenticalAndDisjointBounds) {
  Placement a, b;
  a.bounds = {Vec3(0, 0, 0), Vec3(0.1, 0.1, 0.1)};
  b.id = 1;
  b.bounds = a.bounds;
  EXPECT_FALSE(check_collision(b, {a}).ok());
  EXPECT_FALSE(check_collision(b, {a}, pack_tolerance(Variant::kCrowd)).ok());
  b.bounds = {Vec3(0.5, 0, 0), Vec3(0.6, 0.1, 0.1)};
  EXPECT_TRUE(check_collision(b, {a}).ok());
}

TEST(Examples, MaterializeEmptyAndSingleCube) {
  const AssetLibrary lib = sloped_library(0.0);
  SceneConfig c = new_scene(lib, "slope", Variant::kVanilla, 1);
  const MaterializedScene empty = materialize(c, lib);
  EXPECT_TRUE(empty.boxes.empty());
  EXPECT_EQ(empty.mesh.faces.size(), lib.table_mesh("slope").faces.size());
  place(c, lib, {"book_a", Vec2(0, 0), 0.4, 1.3});
  const MaterializedScene one = materialize(c, lib);
  ASSERT_EQ(one.boxes.size(), 1u);
  const Vec3 want = Vec3(0.2, 0.15, 0.03) * 1.3;
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(one.boxes[0].dims[a], want[a], 1e-9);
  EXPECT_NEAR(one.boxes[0].yaw, 0.4, 1e-12);
}

}  // namespace
}  // namespace tablescape

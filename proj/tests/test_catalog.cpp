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

#include <algorithm>
#include <set>

#include "tablescape/catalog.hpp"
#include "tablescape/shapes.hpp"
#include "tablescape/synthetic.hpp"
#include "test_util.hpp"

namespace tablescape {
namespace {

bool has(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

TEST(Compatibility, MugOnCoffeeTablePencilOnDesk) {
  const auto& lib = testing::library();
  EXPECT_TRUE(has(lib.candidates("coffee_table_0"), "mug"));
  EXPECT_TRUE(has(lib.candidates("writing_desk_0"), "pencil"));
  EXPECT_FALSE(has(lib.candidates("bathroom_counter_0"), "keyboard"));
}

TEST(Compatibility, UnknownTableThrows) {
  EXPECT_THROW(testing::library().candidates("no_such_table"), UnknownTable);
}

TEST(Compatibility, EveryTabletopClassHasATable) {
  std::set<std::string> covered;
  for (const auto& [_, cats] : taxonomy::default_compatibility()) {
    covered.insert(cats.begin(), cats.end());
  }
  for (auto c : taxonomy::kTabletop) EXPECT_TRUE(covered.count(std::string(c))) << c;
}

TEST(Compatibility, CandidatesSortedAndUnique) {
  const auto c = testing::library().candidates("dining_table_0");
  EXPECT_TRUE(std::is_sorted(c.begin(), c.end()));
  EXPECT_EQ(std::adjacent_find(c.begin(), c.end()), c.end());
  EXPECT_THROW(testing::library().candidates("no_such_table"), UnknownTable);
}

TEST(Taxonomy, LabelSpaces) {
  EXPECT_EQ(taxonomy::kTabletop.size(), 52u);
  EXPECT_EQ(taxonomy::kFurniture.size(), 20u);
  EXPECT_TRUE(taxonomy::is_tabletop(taxonomy::tabletop_id("mug")));
  EXPECT_TRUE(taxonomy::is_furniture(taxonomy::furniture_id("sofa")));
  EXPECT_FALSE(taxonomy::is_tabletop(taxonomy::furniture_id("sofa")));
  EXPECT_EQ(taxonomy::class_name(taxonomy::tabletop_id("vegetables")), "vegetables");
  EXPECT_EQ(taxonomy::kNumClasses, taxonomy::tabletop_id("vegetables") + 1);
}

TEST(Catalog, ManifestRoundTripAndReload) {
  const auto dir = testing::scratch_dir("catalog");
  synthetic::Options opt;
  opt.objects_per_category = 1;
  const AssetLibrary lib = synthetic::make_library(opt);
  const auto manifest = synthetic::write_library(dir, lib);
  const AssetLibrary back = AssetLibrary::open(manifest);
  EXPECT_EQ(back.catalog().objects.size(), lib.catalog().objects.size());
  EXPECT_EQ(back.catalog().tables.size(), lib.catalog().tables.size());
  EXPECT_EQ(back.compatibility().allowed, lib.compatibility().allowed);
  EXPECT_TRUE(validate_catalog(back.catalog(), back.compatibility(), back.root()).empty());
  const auto& t = back.catalog().table("writing_desk_0");
  EXPECT_DOUBLE_EQ(t.arc.lo_deg, -90.0);
  EXPECT_DOUBLE_EQ(t.arc.hi_deg, 90.0);
  const Aabb a = aabb_of(lib.object_mesh("mug_0"));
  const Aabb b = aabb_of(back.object_mesh("mug_0"));
  EXPECT_LT((a.min - b.min).norm() + (a.max - b.max).norm(), 1e-9);
  std::filesystem::remove_all(dir);
}

TEST(Catalog, ValidationFindsEachProblem) {
  const auto dir = testing::scratch_dir("catalog_bad");
  save_mesh(dir / "ok.ply", shapes::unit_cube());
  AssetCatalog c;
  c.objects.push_back({"a", "mug", "ok.ply", Vec3(0.1, 0.1, 0.1)});
  c.objects.push_back({"a", "mug", "missing.ply", Vec3(0.1, 0.1, 0.1)});
  c.objects.push_back({"b", "spaceship", "ok.ply", Vec3(0.1, 0.0, 0.1)});
  c.tables.push_back({"t", "workbench", "", "ok.ply", {}});
  c.tables.push_back({"u", "coffee_table", "", "ok.ply", AzimuthArc{10, 10}});
  std::multiset<std::string> kinds;
  for (const auto& f : validate_catalog(c, CompatibilityMap::builtin(), dir)) kinds.insert(f.kind);
  EXPECT_EQ(kinds.count("duplicate_id"), 1u);
  EXPECT_EQ(kinds.count("dangling_mesh"), 1u);
  EXPECT_EQ(kinds.count("unknown_category"), 1u);
  EXPECT_EQ(kinds.count("bad_size"), 1u);
  EXPECT_EQ(kinds.count("empty_category_table"), 1u);
  EXPECT_EQ(kinds.count("bad_arc"), 1u);
  std::filesystem::remove_all(dir);
}

TEST(Catalog, MissingCompatibilityFallsBackToBuiltin) {
  const auto [c, map] = catalog_from_json(nlohmann::json{{"objects", nlohmann::json::array()}});
  EXPECT_EQ(map.allowed, CompatibilityMap::builtin().allowed);
  EXPECT_THROW(catalog_from_json(nlohmann::json{{"objects", {{{"id", 3}}}}}), ParseError);
}

TEST(Catalog, CanonicalFrame) {
  TriMesh raw = shapes::box(Vec3(2, 3, 4), Vec3(4, 4, 5));  // 2 x 1 x 1
  const TriMesh m = canonicalize_object(raw, Vec3(0.2, 0.1, 0.1));
  const Aabb box = aabb_of(m);
  EXPECT_NEAR(box.min.z(), 0.0, 1e-12);
  EXPECT_NEAR(box.center().x(), 0.0, 1e-12);
  EXPECT_NEAR(box.center().y(), 0.0, 1e-12);
  EXPECT_NEAR(box.extents().x(), 0.2, 1e-12);
  EXPECT_NEAR(box.extents().y(), 0.1, 1e-12);
}

}  // namespace
}  // namespace tablescape

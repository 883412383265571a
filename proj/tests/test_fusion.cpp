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
#include <cmath>
#include <map>

#include "tablescape/bvh.hpp"
#include "tablescape/fusion.hpp"
#include "tablescape/shapes.hpp"
#include "test_util.hpp"

namespace tablescape {
namespace {

// Depth frame of the plane z = plane_z seen straight down from (x, y, 0).
DepthFrame frontal_plane(double plane_z, double x, double y, const CameraIntrinsics& k) {
  DepthFrame f;
  f.intrinsics = k;
  f.pose.position = Vec3(x, y, 0);
  f.depth.assign(static_cast<std::size_t>(k.width) * k.height, static_cast<float>(plane_z));
  return f;
}

TsdfVolume small_volume(double voxel = 0.01) {
  return TsdfVolume(Vec3(-0.2, -0.2, 0.8), voxel, {40, 40, 40}, 4 * voxel);
}

TEST(Tsdf, RejectsBadParameters) {
  EXPECT_THROW(TsdfVolume(Vec3::Zero(), 0.0, {8, 8, 8}, 0.1), BadVoxelSize);
  EXPECT_THROW(TsdfVolume(Vec3::Zero(), -1.0, {8, 8, 8}, 0.1), BadVoxelSize);
  EXPECT_THROW(TsdfVolume(Vec3::Zero(), 0.1, {8, 8, 8}, 0.05), InvalidArgument);
  EXPECT_THROW(TsdfVolume(Vec3::Zero(), 0.1, {1, 8, 8}, 0.1), InvalidArgument);
}

TEST(Tsdf, UnobservedVoxelsReadEmpty) {
  const auto v = small_volume();
  EXPECT_EQ(v.tsdf(3, 4, 5), 1.0);
  EXPECT_EQ(v.weight(3, 4, 5), 0.0);
  EXPECT_THROW(extract_mesh(v), EmptyVolume);
}

TEST(Tsdf, FirstObservationSetsTruncatedValue) {
  auto v = small_volume();
  v.allocate_all();
  const double tau = v.truncation();
  // Voxel (20, 20, 10) sits at z = 0.9 on the optical axis; surface at 0.9 + 0.3 tau.
  const CameraIntrinsics k = CameraIntrinsics{}.scaled(0.25);
  const Vec3 p = v.position(20, 20, 10);
  v.update(frontal_plane(p.z() + 0.3 * tau, p.x(), p.y(), k));
  EXPECT_NEAR(v.tsdf(20, 20, 10), 0.3, 1e-6);
  EXPECT_EQ(v.weight(20, 20, 10), 1.0);
  // Far in front clamps to +1, far behind is skipped.
  EXPECT_EQ(v.tsdf(20, 20, 0), 1.0);
  EXPECT_EQ(v.weight(20, 20, 0), 1.0);
  EXPECT_EQ(v.weight(20, 20, 39), 0.0);
}

TEST(Tsdf, RunningAverageOfTwoObservations) {
  auto v = small_volume();
  v.allocate_all();
  const double tau = v.truncation();
  const CameraIntrinsics k = CameraIntrinsics{}.scaled(0.25);
  const Vec3 p = v.position(20, 20, 10);
  v.update(frontal_plane(p.z() + 0.2 * tau, p.x(), p.y(), k));
  v.update(frontal_plane(p.z() - 0.6 * tau, p.x(), p.y(), k));
  EXPECT_NEAR(v.tsdf(20, 20, 10), (0.2 - 0.6) / 2, 1e-6);
  EXPECT_EQ(v.weight(20, 20, 10), 2.0);
}

TEST(Tsdf, IdenticalObservationsKeepValueAndWeightGrows) {
  auto v = small_volume();
  v.allocate_all();
  const CameraIntrinsics k = CameraIntrinsics{}.scaled(0.25);
  const Vec3 p = v.position(20, 20, 10);
  const auto f = frontal_plane(p.z() + 0.01, p.x(), p.y(), k);
  v.update(f);
  const double d = v.tsdf(20, 20, 10);
  double prev_w = v.weight(20, 20, 10);
  for (int n = 0; n < 3; ++n) {
    v.update(f);
    EXPECT_NEAR(v.tsdf(20, 20, 10), d, 1e-12);
    EXPECT_GT(v.weight(20, 20, 10), prev_w);
    prev_w = v.weight(20, 20, 10);
  }
  EXPECT_EQ(prev_w, 4.0);
}

TEST(Tsdf, PlaneZeroCrossingWithinHalfVoxel) {
  const double voxel = 0.01;
  auto v = small_volume(voxel);
  const CameraIntrinsics k = CameraIntrinsics{}.scaled(0.5);
  const double plane = 1.003;
  std::vector<DepthFrame> frames;
  for (double dx : {-0.05, 0.0, 0.05}) frames.push_back(frontal_plane(plane, dx, 0.02, k));
  integrate_all(v, frames);
  const TriMesh m = extract_mesh(v);
  ASSERT_FALSE(m.vertices.empty());
  for (const auto& p : m.vertices) EXPECT_NEAR(p.z(), plane, 0.5 * voxel);
}

TEST(Tsdf, FrameOrderDoesNotMatter) {
  const auto& lib = testing::library();
  const auto c = new_scene(lib, lib.catalog().tables.front().id, Variant::kVanilla, 1);
  const auto scene = materialize(c, lib);
  const Bvh bvh(scene.mesh);
  const auto target = scan_target_of(lib.table_mesh(c.table_id), {});
  const auto poses = sample_poses(target, 4, 8);
  std::vector<DepthFrame> frames;
  for (const auto& p : poses) frames.push_back(render_depth(bvh, CameraIntrinsics{}.scaled(0.2), p));
  auto a = TsdfVolume::fit(aabb_of(lib.table_mesh(c.table_id)), 0.02, 0.08);
  auto b = TsdfVolume::fit(aabb_of(lib.table_mesh(c.table_id)), 0.02, 0.08);
  integrate_all(a, frames);
  std::reverse(frames.begin(), frames.end());
  integrate_all(b, frames);
  ASSERT_EQ(a.sorted_keys(), b.sorted_keys());
  const auto dims = a.dims();
  for (int k = 0; k < dims[2]; ++k)
    for (int j = 0; j < dims[1]; ++j)
      for (int i = 0; i < dims[0]; ++i) {
        ASSERT_NEAR(a.tsdf(i, j, k), b.tsdf(i, j, k), 1e-12);
        ASSERT_EQ(a.weight(i, j, k), b.weight(i, j, k));
      }
}

TEST(MarchingCubes, AnalyticSphereAndGridEdges) {
  const double voxel = 0.01, r = 0.13;
  TsdfVolume v(Vec3(-0.2, -0.2, -0.2), voxel, {41, 41, 41}, 4 * voxel);
  const double tau = v.truncation();
  for (int k = 0; k < 41; ++k)
    for (int j = 0; j < 41; ++j)
      for (int i = 0; i < 41; ++i) {
        const double sdf = r - v.position(i, j, k).norm();
        v.set(i, j, k, std::clamp(-sdf / tau, -1.0, 1.0), 1.0);
      }
  const TriMesh m = extract_mesh(v);
  ASSERT_GT(m.faces.size(), 500u);
  m.validate();
  for (const auto& p : m.vertices) {
    EXPECT_NEAR(p.norm(), r, 0.5 * voxel);
    // Each vertex lies on a grid edge: at least two coordinates on lattice values.
    int on_lattice = 0;
    for (int a = 0; a < 3; ++a) {
      const double g = (p[a] + 0.2) / voxel;
      if (std::abs(g - std::round(g)) < 1e-9) ++on_lattice;
    }
    EXPECT_GE(on_lattice, 2);
  }
  // Closed surface: every edge is shared by exactly two faces.
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edges;
  for (const auto& f : m.faces)
    for (int e = 0; e < 3; ++e) {
      auto a = f[e], b = f[(e + 1) % 3];
      ++edges[{std::min(a, b), std::max(a, b)}];
    }
  for (const auto& [e, n] : edges) EXPECT_EQ(n, 2);
}

TEST(MarchingCubes, UnobservedCornersProduceNothing) {
  TsdfVolume v(Vec3::Zero(), 0.01, {16, 16, 16}, 0.04);
  for (int k = 0; k < 16; ++k)
    for (int j = 0; j < 16; ++j)
      for (int i = 0; i < 16; ++i) v.set(i, j, k, k < 8 ? -0.5 : 0.5, i < 8 ? 1.0 : 0.0);
  const TriMesh m = extract_mesh(v);
  for (const auto& p : m.vertices) EXPECT_LE(p.x(), 0.07 + 1e-12);
}

AssetLibrary block_table_library(AzimuthArc arc) {
  AssetCatalog c;
  c.tables.push_back({"block", "coffee_table", "", "block.ply", arc});
  c.objects.push_back({"mug_a", "mug", "mug_a.ply", Vec3(0.08, 0.08, 0.1)});
  AssetLibrary lib(c, CompatibilityMap::builtin());
  lib.add_mesh("block.ply", shapes::table(0, 0, 0.6, 0.8, 0.8, 0.03, true));
  lib.add_object_mesh("mug_a", shapes::cylinder(0.5, 1.0, 16));
  return lib;
}

// Fraction of points sampled on the x = -0.3 face (away from its edges) with a
// reconstructed vertex nearby.
double back_face_coverage(const TriMesh& recon, double voxel, double margin) {
  const Bvh bvh(recon);
  int covered = 0, total = 0;
  for (double y = -0.4 + margin; y <= 0.4 - margin; y += 0.02) {
    for (double z = margin; z <= 0.8 - margin; z += 0.02) {
      ++total;
      if (bvh.closest_point(Vec3(-0.3, y, z)).distance < 1.5 * voxel) ++covered;
    }
  }
  return static_cast<double>(covered) / total;
}

TEST(Reconstruction, FrontArcLeavesBackFaceUnobserved) {
  ReconstructionParams p = testing::fast_recon();
  p.intrinsics = CameraIntrinsics{}.scaled(0.5);
  p.noise = false;
  const double margin = 2 * p.truncation();
  {
    const auto lib = block_table_library({-90, 90});
    const auto r = reconstruct_scene(new_scene(lib, "block", Variant::kVanilla, 1), lib, p, 3);
    for (const auto& pose : r.poses) EXPECT_GT(pose.position.x(), -0.3);
    EXPECT_LT(back_face_coverage(r.mesh, p.voxel_size, margin), 0.02);
  }
  {
    const auto lib = block_table_library({});
    const auto r = reconstruct_scene(new_scene(lib, "block", Variant::kVanilla, 1), lib, p, 3);
    EXPECT_GT(back_face_coverage(r.mesh, p.voxel_size, margin), 0.9);
  }
}

TEST(Reconstruction, VerticesNearGroundTruthWithoutNoise) {
  const auto& lib = testing::library();
  const auto c = procedural_place(new_scene(lib, "coffee_table_0", Variant::kVanilla, 5), lib,
                                  default_count_range(Variant::kVanilla), 5);
  ReconstructionParams p = testing::fast_recon();
  p.noise = false;
  const auto r = reconstruct_scene(c, lib, p, 5);
  EXPECT_EQ(static_cast<int>(r.poses.size()), p.pose_count);
  EXPECT_EQ(r.frames.size(), r.kept.size());
  const Bvh gt(r.scene.mesh);
  int near = 0;
  for (const auto& v : r.mesh.vertices) near += gt.closest_point(v).distance < 2 * p.voxel_size;
  EXPECT_GE(near, static_cast<int>(0.99 * r.mesh.vertices.size()));
}

// Chair legs and similar parts thinner than the truncation band smear, so the
// worst-case bound is checked on solid geometry only. Convex corners bulge by
// up to about 0.8 tau, so the bound needs a 2-voxel band.
TEST(Reconstruction, HausdorffOnSolidSceneWithDensePoses) {
  const auto lib = block_table_library({});
  SceneConfig c = new_scene(lib, "block", Variant::kVanilla, 1);
  place(c, lib, {"mug_a", Vec2(-0.1, 0.1)});
  place(c, lib, {"mug_a", Vec2(0.1, -0.2), 0.0, 1.5});
  ReconstructionParams p = testing::fast_recon();
  p.intrinsics = CameraIntrinsics{}.scaled(0.5);
  p.noise = false;
  p.target_frames = p.pose_count;
  p.truncation_voxels = 2.0;
  const auto r = reconstruct_scene(c, lib, p, 2);
  EXPECT_EQ(r.frames.size(), static_cast<std::size_t>(p.pose_count));
  const Bvh gt(r.scene.mesh);
  double hausdorff = 0.0;
  for (const auto& v : r.mesh.vertices) hausdorff = std::max(hausdorff, gt.closest_point(v).distance);
  EXPECT_LE(hausdorff, 2 * p.voxel_size);
}

TEST(Reconstruction, SameSeedSameMesh) {
  const auto& lib = testing::library();
  const auto c = procedural_place(new_scene(lib, "coffee_table_0", Variant::kVanilla, 6), lib,
                                  default_count_range(Variant::kVanilla), 6);
  const auto p = testing::fast_recon();
  const auto a = reconstruct_scene(c, lib, p, 6), b = reconstruct_scene(c, lib, p, 6);
  EXPECT_EQ(a.mesh.vertices, b.mesh.vertices);
  EXPECT_EQ(a.mesh.faces, b.mesh.faces);
  ReconstructionParams bad = p;
  bad.voxel_size = 0;
  EXPECT_THROW(reconstruct_scene(c, lib, bad, 6), BadVoxelSize);
}

TEST(Reconstruction, CropRegionAroundTable) {
  const auto& lib = testing::library();
  for (const auto& t : lib.catalog().tables) {
    if (t.room.empty()) continue;
    const auto c = new_scene(lib, t.id, Variant::kVanilla, 1);
    const auto scene = materialize(c, lib);
    const Aabb table = aabb_of(lib.table_mesh(t.id));
    const Aabb roi = scan_region(c, lib, scene.mesh, 1.5);
    const double r = 1.5 * std::hypot(table.extents().x(), table.extents().y());
    EXPECT_LE(roi.max.x() - table.center().x(), r + 1e-12);
    EXPECT_GE(roi.min.x() - table.center().x(), -r - 1e-12);
    auto whole = c;
    whole.variant = Variant::kWholeRoom;
    const Aabb full = scan_region(whole, lib, scene.mesh, 1.5);
    EXPECT_EQ(full.min, aabb_of(scene.mesh).min);
    break;
  }
}

}  // namespace
}  // namespace tablescape

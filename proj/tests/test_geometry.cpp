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
#include <numbers>

#include "tablescape/geometry.hpp"
#include "tablescape/rng.hpp"
#include "tablescape/shapes.hpp"
#include "test_util.hpp"

namespace tablescape {
namespace {

constexpr double kPi = std::numbers::pi;

TriMesh random_mesh(Rng& rng, int n) {
  TriMesh m;
  for (int i = 0; i < n; ++i) {
    m.vertices.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
  }
  for (int i = 0; i + 2 < n; i += 3) {
    m.faces.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i + 1),
                       static_cast<std::uint32_t>(i + 2)});
  }
  return m;
}

TEST(Transform, IdentityKeepsVertices) {
  Rng rng(1);
  const TriMesh m = random_mesh(rng, 30);
  const TriMesh out = apply_transform(m, RigidPlacementTransform{});
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    EXPECT_EQ(out.vertices[i], m.vertices[i]);
  }
  EXPECT_EQ(out.faces, m.faces);
}

TEST(Transform, ScaleDoublesExtents) {
  RigidPlacementTransform t;
  t.scale = 2.0;
  const Aabb box = aabb_of(apply_transform(shapes::unit_cube(), t));
  EXPECT_NEAR(box.extents().x(), 2.0, 1e-12);
  EXPECT_NEAR(box.extents().y(), 2.0, 1e-12);
  EXPECT_NEAR(box.extents().z(), 2.0, 1e-12);
}

TEST(Transform, TwoQuarterTurnsEqualHalfTurn) {
  Rng rng(2);
  const TriMesh m = random_mesh(rng, 60);
  RigidPlacementTransform quarter;
  quarter.yaw = kPi / 2;
  RigidPlacementTransform half;
  half.yaw = kPi;
  const TriMesh twice = apply_transform(apply_transform(m, quarter), quarter);
  const TriMesh once = apply_transform(m, half);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    EXPECT_LT((twice.vertices[i] - once.vertices[i]).norm(), 1e-9);
  }
}

TEST(Transform, OrderIsScaleRotateTranslate) {
  RigidPlacementTransform t;
  t.scale = 3.0;
  t.yaw = kPi / 2;
  t.translation = Vec3(1, 2, 3);
  const Vec3 p = t.apply(Vec3(1, 0, 0));
  EXPECT_LT((p - Vec3(1, 5, 3)).norm(), 1e-12);
}

TEST(Transform, PitchAndRollFollowYawPitchRoll) {
  RigidPlacementTransform t;
  t.yaw = 0.3;
  t.pitch = -0.4;
  t.roll = 0.7;
  const Mat3 expected = (Eigen::AngleAxisd(0.3, Vec3::UnitZ()) *
                         Eigen::AngleAxisd(-0.4, Vec3::UnitY()) *
                         Eigen::AngleAxisd(0.7, Vec3::UnitX()))
                            .toRotationMatrix();
  EXPECT_LT((t.rotation() - expected).norm(), 1e-12);
}

TEST(Transform, NormalizedWrapsAnglesAndRejectsBadScale) {
  RigidPlacementTransform t;
  t.yaw = 3 * kPi;
  t.pitch = -kPi;
  EXPECT_NEAR(t.normalized().yaw, kPi, 1e-12);
  EXPECT_NEAR(t.normalized().pitch, kPi, 1e-12);
  t.scale = 0.0;
  EXPECT_THROW(t.normalized(), InvalidArgument);
}

TEST(Mesh, ValidateCatchesBadIndexAndNan) {
  TriMesh m = shapes::unit_cube();
  EXPECT_NO_THROW(m.validate());
  m.faces.push_back({0, 1, 99});
  EXPECT_THROW(m.validate(), InvalidArgument);
  m = shapes::unit_cube();
  m.vertices[0].x() = std::nan("");
  EXPECT_THROW(m.validate(), InvalidArgument);
}

TEST(Aabb, EmptyGeometryThrows) {
  EXPECT_THROW(aabb_of(TriMesh{}), EmptyGeometry);
}

TEST(Aabb, CubeSinglePointAndRandomMesh) {
  const Aabb cube = aabb_of(shapes::unit_cube());
  EXPECT_EQ(cube.min, Vec3(0, 0, 0));
  EXPECT_EQ(cube.max, Vec3(1, 1, 1));
  const std::vector<Vec3> one = {Vec3(0.3, -2, 5)};
  EXPECT_EQ(aabb_of(one).min, aabb_of(one).max);
  Rng rng(4);
  std::vector<Vec3> pts(500);
  for (auto& p : pts) p = Vec3(rng.normal(), rng.normal(), rng.normal());
  const Aabb box = aabb_of(pts);
  for (const auto& p : pts) {
    EXPECT_TRUE((p.array() >= box.min.array()).all() && (p.array() <= box.max.array()).all());
  }
}

TEST(Obb, CenterInsideFarPointOutside) {
  BBox3D b;
  b.center = Vec3(1, 2, 3);
  b.dims = Vec3(0.4, 0.2, 0.6);
  b.yaw = 0.8;
  EXPECT_TRUE(point_in_obb(b.center, b));
  EXPECT_FALSE(point_in_obb(b.center + Vec3(0, 0, b.half_diagonal() + 1e-6), b));
}

// Frame change through an independently built rotation matrix.
TEST(Obb, MatchesRotationMatrixOracle) {
  Rng rng(3);
  int agree = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    BBox3D b;
    b.center = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    b.dims = Vec3(rng.uniform(0.1, 1), rng.uniform(0.1, 1), rng.uniform(0.1, 1));
    b.yaw = rng.uniform(-kPi, kPi);
    const Vec3 p = b.center + Vec3(rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8),
                                   rng.uniform(-0.8, 0.8));
    const Vec3 local = testing::yaw_matrix(b.yaw).transpose() * (p - b.center);
    const bool oracle = (local.cwiseAbs().array() <= 0.5 * b.dims.array()).all();
    agree += oracle == point_in_obb(p, b, 0.0) ? 1 : 0;
  }
  EXPECT_EQ(agree, n);
}

TEST(Obb, FootprintIsCounterClockwise) {
  BBox3D b;
  b.dims = Vec3(2, 1, 1);
  b.yaw = 0.3;
  const auto f = b.footprint();
  double twice = 0;
  for (int i = 0; i < 4; ++i) {
    twice += f[i].x() * f[(i + 1) % 4].y() - f[(i + 1) % 4].x() * f[i].y();
  }
  EXPECT_NEAR(0.5 * twice, 2.0, 1e-12);
}

double monte_carlo_iou(const BBox3D& a, const BBox3D& b, int samples, Rng& rng) {
  Aabb box;
  for (const BBox3D* x : {&a, &b}) {
    for (const auto& c : x->footprint()) {
      box.extend(Vec3(c.x(), c.y(), x->center.z() - 0.5 * x->dims.z()));
      box.extend(Vec3(c.x(), c.y(), x->center.z() + 0.5 * x->dims.z()));
    }
  }
  int in_a = 0, in_b = 0, in_both = 0;
  for (int i = 0; i < samples; ++i) {
    const Vec3 p(rng.uniform(box.min.x(), box.max.x()), rng.uniform(box.min.y(), box.max.y()),
                 rng.uniform(box.min.z(), box.max.z()));
    const bool ia = point_in_obb(p, a, 0.0), ib = point_in_obb(p, b, 0.0);
    in_a += ia;
    in_b += ib;
    in_both += ia && ib;
  }
  const int uni = in_a + in_b - in_both;
  return uni ? static_cast<double>(in_both) / uni : 0.0;
}

TEST(Iou, IdenticalDisjointAndSymmetric) {
  BBox3D a;
  a.dims = Vec3(1, 2, 0.5);
  a.yaw = 0.4;
  EXPECT_NEAR(iou_3d(a, a), 1.0, 1e-12);
  BBox3D far = a;
  far.center.x() = 10;
  EXPECT_EQ(iou_3d(a, far), 0.0);
  BBox3D b = a;
  b.center = Vec3(0.3, -0.2, 0.1);
  b.yaw = -1.1;
  EXPECT_EQ(iou_3d(a, b), iou_3d(b, a));
}

TEST(Iou, AxisAlignedClosedForm) {
  BBox3D a, b;
  a.dims = b.dims = Vec3(1, 1, 1);
  b.center.x() = 0.5;
  EXPECT_NEAR(iou_3d(a, b), 0.5 / 1.5, 1e-12);
}

TEST(Iou, MatchesMonteCarloOracle) {
  Rng rng(4);
  for (int k = 0; k < 5; ++k) {
    BBox3D a, b;
    a.dims = Vec3(rng.uniform(0.3, 1), rng.uniform(0.3, 1), rng.uniform(0.3, 1));
    b.dims = Vec3(rng.uniform(0.3, 1), rng.uniform(0.3, 1), rng.uniform(0.3, 1));
    a.yaw = rng.uniform(-kPi, kPi);
    b.yaw = rng.uniform(-kPi, kPi);
    b.center = Vec3(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2));
    EXPECT_NEAR(iou_3d(a, b), monte_carlo_iou(a, b, 400000, rng), 0.01);
  }
}

}  // namespace
}  // namespace tablescape

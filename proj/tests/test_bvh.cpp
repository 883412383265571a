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

#include <limits>

#include "tablescape/bvh.hpp"
#include "tablescape/rng.hpp"
#include "tablescape/shapes.hpp"
#include "test_util.hpp"

namespace tablescape {
namespace {

TriMesh triangle_soup(Rng& rng, int n) {
  TriMesh m;
  for (int i = 0; i < n; ++i) {
    const Vec3 c(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    for (int k = 0; k < 3; ++k) {
      m.vertices.push_back(c + Vec3(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2),
                                    rng.uniform(-0.2, 0.2)));
    }
    const auto b = static_cast<std::uint32_t>(3 * i);
    m.faces.push_back({b, b + 1, b + 2});
  }
  return m;
}

TEST(Bvh, RayHitsMatchBruteForce) {
  Rng rng(10);
  const TriMesh m = triangle_soup(rng, 300);
  const Bvh bvh(m);
  for (int r = 0; r < 500; ++r) {
    const Vec3 o(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    const Vec3 d = (Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)) - o);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : m.faces) {
      if (auto t = intersect_triangle(o, d, m.vertices[f[0]], m.vertices[f[1]],
                                      m.vertices[f[2]], 0.0, best)) {
        best = *t;
      }
    }
    const auto hit = bvh.intersect(o, d, 0.0);
    if (std::isinf(best)) {
      EXPECT_FALSE(hit.has_value());
    } else {
      ASSERT_TRUE(hit.has_value());
      EXPECT_NEAR(hit->t, best, 1e-12);
    }
  }
}

TEST(Bvh, ClosestPointMatchesBruteForce) {
  Rng rng(11);
  const TriMesh m = triangle_soup(rng, 200);
  const Bvh bvh(m);
  for (int q = 0; q < 300; ++q) {
    const Vec3 p(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : m.faces) {
      const Vec3 c = closest_point_on_triangle(p, m.vertices[f[0]], m.vertices[f[1]],
                                               m.vertices[f[2]]);
      best = std::min(best, (c - p).norm());
    }
    EXPECT_NEAR(bvh.closest_point(p).distance, best, 1e-12);
  }
}

TEST(Bvh, ClosestPointOnTriangleRegions) {
  const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
  EXPECT_LT((closest_point_on_triangle(Vec3(-1, -1, 0), a, b, c) - a).norm(), 1e-15);
  EXPECT_LT((closest_point_on_triangle(Vec3(0.5, -1, 0), a, b, c) - Vec3(0.5, 0, 0)).norm(), 1e-15);
  EXPECT_LT((closest_point_on_triangle(Vec3(0.2, 0.2, 3), a, b, c) - Vec3(0.2, 0.2, 0)).norm(), 1e-15);
  EXPECT_LT((closest_point_on_triangle(Vec3(1, 1, 0), a, b, c) - Vec3(0.5, 0.5, 0)).norm(), 1e-15);
}

TEST(Bvh, EmptyMeshNeverHits) {
  const Bvh bvh{TriMesh{}};
  EXPECT_TRUE(bvh.empty());
  EXPECT_FALSE(bvh.intersect(Vec3::Zero(), Vec3::UnitZ(), 0.0).has_value());
}

TEST(Bvh, BoxFaceDistance) {
  const Bvh bvh(shapes::box(Vec3(-1, -1, -1), Vec3(1, 1, 1)));
  const auto hit = bvh.intersect(Vec3(0.3, 0.2, 5), -Vec3::UnitZ(), 0.0);
  ASSERT_TRUE(hit.has_value());
  EXPECT_NEAR(hit->t, 4.0, 1e-12);
}

}  // namespace
}  // namespace tablescape

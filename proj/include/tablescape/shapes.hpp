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

#ifndef TABLESCAPE_SHAPES_HPP_
#define TABLESCAPE_SHAPES_HPP_

#include <cmath>
#include <numbers>

#include "tablescape/geometry.hpp"

// Closed primitive meshes with outward-facing triangles.
namespace tablescape::shapes {

inline TriMesh box(const Vec3& min, const Vec3& max) {
  TriMesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back((i & 1) ? max.x() : min.x(), (i & 2) ? max.y() : min.y(),
                            (i & 4) ? max.z() : min.z());
  }
  m.faces = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
             {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return m;
}

inline TriMesh unit_cube() { return box(Vec3::Zero(), Vec3::Ones()); }

// Axis-aligned rectangle at height z, facing +z.
inline TriMesh quad(double x0, double y0, double x1, double y1, double z) {
  TriMesh m;
  m.vertices = {{x0, y0, z}, {x1, y0, z}, {x1, y1, z}, {x0, y1, z}};
  m.faces = {{0, 1, 2}, {0, 2, 3}};
  return m;
}

// Cylinder along z with its base on z = z0.
inline TriMesh cylinder(double radius, double height, int segments = 24,
                        double z0 = 0.0, double top_radius = -1.0) {
  if (top_radius < 0.0) top_radius = radius;
  TriMesh m;
  const auto n = static_cast<std::uint32_t>(segments);
  for (std::uint32_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), z0);
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    m.vertices.emplace_back(top_radius * std::cos(a), top_radius * std::sin(a),
                            z0 + height);
  }
  const std::uint32_t bottom = 2 * n, top = 2 * n + 1;
  m.vertices.emplace_back(0.0, 0.0, z0);
  m.vertices.emplace_back(0.0, 0.0, z0 + height);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t j = (i + 1) % n;
    m.faces.push_back({i, j, n + j});
    m.faces.push_back({i, n + j, n + i});
    m.faces.push_back({bottom, j, i});
    m.faces.push_back({top, n + i, n + j});
  }
  return m;
}

// UV sphere.
inline TriMesh sphere(const Vec3& center, double radius, int rings = 24,
                      int sectors = 48) {
  TriMesh m;
  const auto r = static_cast<std::uint32_t>(rings);
  const auto s = static_cast<std::uint32_t>(sectors);
  m.vertices.push_back(center + Vec3(0, 0, -radius));
  for (std::uint32_t i = 1; i < r; ++i) {
    const double theta = std::numbers::pi * i / r - std::numbers::pi / 2.0;
    for (std::uint32_t j = 0; j < s; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / s;
      m.vertices.push_back(center + radius * Vec3(std::cos(theta) * std::cos(phi),
                                                  std::cos(theta) * std::sin(phi),
                                                  std::sin(theta)));
    }
  }
  m.vertices.push_back(center + Vec3(0, 0, radius));
  const std::uint32_t north = static_cast<std::uint32_t>(m.vertices.size()) - 1;
  auto at = [s](std::uint32_t ring, std::uint32_t j) { return 1 + (ring - 1) * s + j % s; };
  for (std::uint32_t j = 0; j < s; ++j) m.faces.push_back({0, at(1, j + 1), at(1, j)});
  for (std::uint32_t i = 1; i + 1 < r; ++i) {
    for (std::uint32_t j = 0; j < s; ++j) {
      m.faces.push_back({at(i, j), at(i, j + 1), at(i + 1, j + 1)});
      m.faces.push_back({at(i, j), at(i + 1, j + 1), at(i + 1, j)});
    }
  }
  for (std::uint32_t j = 0; j < s; ++j) {
    m.faces.push_back({north, at(r - 1, j), at(r - 1, j + 1)});
  }
  return m;
}

// Table with a slab top of the given size whose upper face is at `height`,
// centered at (cx, cy), plus four legs. `solid` makes a cabinet-like block.
inline TriMesh table(double cx, double cy, double width, double depth,
                     double height, double thickness = 0.03, bool solid = false) {
  const double x0 = cx - 0.5 * width, x1 = cx + 0.5 * width;
  const double y0 = cy - 0.5 * depth, y1 = cy + 0.5 * depth;
  if (solid) return box({x0, y0, 0.0}, {x1, y1, height});
  TriMesh m = box({x0, y0, height - thickness}, {x1, y1, height});
  const double leg = 0.04, inset = 0.03;
  for (int i = 0; i < 4; ++i) {
    const double lx = (i & 1) ? x1 - inset - leg : x0 + inset;
    const double ly = (i & 2) ? y1 - inset - leg : y0 + inset;
    m.append(box({lx, ly, 0.0}, {lx + leg, ly + leg, height - thickness}));
  }
  return m;
}

}  // namespace tablescape::shapes

#endif  // TABLESCAPE_SHAPES_HPP_

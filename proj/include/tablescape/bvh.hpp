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

#ifndef TABLESCAPE_BVH_HPP_
#define TABLESCAPE_BVH_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "tablescape/geometry.hpp"

namespace tablescape {

struct RayHit {
  double t = std::numeric_limits<double>::infinity();
  std::uint32_t triangle = 0;
};

struct ClosestPoint {
  Vec3 point = Vec3::Zero();
  double distance = std::numeric_limits<double>::infinity();
  std::uint32_t triangle = 0;
};

// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection).
inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a,
                                      const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    return a + ab * (d1 / (d1 - d3));
  }
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    return a + ac * (d2 / (d2 - d6));
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  }
  const double denom = va + vb + vc;
  if (denom == 0.0) {
    // Degenerate triangle: fall back to the closest of its edges' endpoints.
    const double da = (p - a).squaredNorm(), db = (p - b).squaredNorm(),
                 dc = (p - c).squaredNorm();
    return da <= db && da <= dc ? a : (db <= dc ? b : c);
  }
  const double v = vb / denom, w = vc / denom;
  return a + ab * v + ac * w;
}

// Two-sided Moller-Trumbore. Returns the ray parameter of the hit, if any,
// with t in (t_min, t_max).
inline std::optional<double> intersect_triangle(const Vec3& origin,
                                                const Vec3& dir, const Vec3& a,
                                                const Vec3& b, const Vec3& c,
                                                double t_min, double t_max) {
  const Vec3 e1 = b - a, e2 = c - a;
  const Vec3 pvec = dir.cross(e2);
  const double det = e1.dot(pvec);
  if (std::abs(det) < 1e-18) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 tvec = origin - a;
  const double u = tvec.dot(pvec) * inv;
  // Edges are inclusive within a small tolerance.
  constexpr double eps = 1e-9;
  if (u < -eps || u > 1.0 + eps) return std::nullopt;
  const Vec3 qvec = tvec.cross(e1);
  const double v = dir.dot(qvec) * inv;
  if (v < -eps || u + v > 1.0 + eps) return std::nullopt;
  const double t = e2.dot(qvec) * inv;
  if (t <= t_min || t >= t_max) return std::nullopt;
  return t;
}

// Bounding volume hierarchy over the triangles of a mesh. Immutable after
// construction and safe for concurrent queries.
class Bvh {
 public:
  Bvh() = default;

  explicit Bvh(const TriMesh& mesh) {
    const std::size_t n = mesh.faces.size();
    tris_.reserve(n);
    for (const auto& f : mesh.faces) {
      tris_.push_back({mesh.vertices[f[0]], mesh.vertices[f[1]],
                       mesh.vertices[f[2]]});
    }
    if (n == 0) return;
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0u);
    std::vector<Vec3> centroids(n);
    for (std::size_t i = 0; i < n; ++i) {
      centroids[i] = (tris_[i][0] + tris_[i][1] + tris_[i][2]) / 3.0;
    }
    nodes_.reserve(2 * n / kLeafSize + 1);
    nodes_.emplace_back();
    build(0, 0, static_cast<std::uint32_t>(n), centroids);
  }

  bool empty() const { return tris_.empty(); }
  std::size_t triangle_count() const { return tris_.size(); }

  // Nearest hit along origin + t * dir for t in (t_min, t_max).
  std::optional<RayHit> intersect(
      const Vec3& origin, const Vec3& dir, double t_min = 0.0,
      double t_max = std::numeric_limits<double>::infinity()) const {
    if (nodes_.empty()) return std::nullopt;
    const Vec3 inv_dir = dir.cwiseInverse();
    RayHit best;
    best.t = t_max;
    bool found = false;
    std::uint32_t stack[64];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
      const Node& node = nodes_[stack[--sp]];
      if (!slab_hit(node.box, origin, inv_dir, t_min, best.t)) continue;
      if (node.count > 0) {
        for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
          const auto& tri = tris_[order_[i]];
          if (auto t = intersect_triangle(origin, dir, tri[0], tri[1], tri[2],
                                          t_min, best.t)) {
            best.t = *t;
            best.triangle = order_[i];
            found = true;
          }
        }
      } else {
        stack[sp++] = node.first;
        stack[sp++] = node.first + 1;
      }
    }
    if (!found) return std::nullopt;
    return best;
  }

  ClosestPoint closest_point(const Vec3& p) const {
    ClosestPoint best;
    if (nodes_.empty()) return best;
    double best_sq = std::numeric_limits<double>::infinity();
    std::uint32_t stack[64];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
      const Node& node = nodes_[stack[--sp]];
      if (box_distance_sq(node.box, p) >= best_sq) continue;
      if (node.count > 0) {
        for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
          const auto& tri = tris_[order_[i]];
          const Vec3 q = closest_point_on_triangle(p, tri[0], tri[1], tri[2]);
          const double d = (q - p).squaredNorm();
          if (d < best_sq) {
            best_sq = d;
            best.point = q;
            best.triangle = order_[i];
          }
        }
      } else {
        // Visit the nearer child first.
        const double dl = box_distance_sq(nodes_[node.first].box, p);
        const double dr = box_distance_sq(nodes_[node.first + 1].box, p);
        if (dl < dr) {
          stack[sp++] = node.first + 1;
          stack[sp++] = node.first;
        } else {
          stack[sp++] = node.first;
          stack[sp++] = node.first + 1;
        }
      }
    }
    best.distance = std::sqrt(best_sq);
    return best;
  }

 private:
  static constexpr std::uint32_t kLeafSize = 4;

  struct Node {
    Aabb box;
    std::uint32_t first = 0;  // child index (inner) or order_ offset (leaf)
    std::uint32_t count = 0;  // 0 for inner nodes
  };

  void build(std::uint32_t slot, std::uint32_t begin, std::uint32_t end,
             const std::vector<Vec3>& centroids) {
    Aabb box, cbox;
    for (std::uint32_t i = begin; i < end; ++i) {
      for (const auto& v : tris_[order_[i]]) box.extend(v);
      cbox.extend(centroids[order_[i]]);
    }
    const std::uint32_t count = end - begin;
    int axis = 0;
    cbox.extents().maxCoeff(&axis);
    if (count <= kLeafSize || cbox.extents()[axis] <= 0.0) {
      nodes_[slot] = Node{box, begin, count};
      return;
    }
    const std::uint32_t mid = begin + count / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid,
                     order_.begin() + end, [&](std::uint32_t a, std::uint32_t b) {
                       return centroids[a][axis] < centroids[b][axis];
                     });
    // Children are stored adjacently so a single index addresses both.
    const auto left = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    nodes_.emplace_back();
    nodes_[slot] = Node{box, left, 0};
    build(left, begin, mid, centroids);
    build(left + 1, mid, end, centroids);
  }

  static bool slab_hit(const Aabb& box, const Vec3& o, const Vec3& inv_dir,
                       double t_min, double t_max) {
    for (int a = 0; a < 3; ++a) {
      double t0 = (box.min[a] - o[a]) * inv_dir[a];
      double t1 = (box.max[a] - o[a]) * inv_dir[a];
      if (t0 > t1) std::swap(t0, t1);
      // NaN (0 * inf) means the ray lies in the slab plane; keep it.
      if (!(t0 != t0)) t_min = std::max(t_min, t0);
      if (!(t1 != t1)) t_max = std::min(t_max, t1);
      if (t_max < t_min) return false;
    }
    return true;
  }

  static double box_distance_sq(const Aabb& box, const Vec3& p) {
    const Vec3 d = (box.min - p).cwiseMax(p - box.max).cwiseMax(Vec3::Zero());
    return d.squaredNorm();
  }

  std::vector<std::array<Vec3, 3>> tris_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace tablescape

#endif  // TABLESCAPE_BVH_HPP_

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

#ifndef TABLESCAPE_GEOMETRY_HPP_
#define TABLESCAPE_GEOMETRY_HPP_

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <tuple>
#include <vector>

#include "tablescape/error.hpp"

// Mesh, transform and box math shared by every module. Units are meters and
// radians; z is up and tables are horizontal planes z = const.
namespace tablescape {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct VertexLabel {
  int semantic = 0;
  int instance = -1;
  friend bool operator==(const VertexLabel&, const VertexLabel&) = default;
};

using Face = std::array<std::uint32_t, 3>;

// Indexed triangle surface. `labels` is either empty (unlabeled) or holds
// exactly one entry per vertex.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<VertexLabel> labels;

  bool has_labels() const { return !labels.empty(); }
  bool empty() const { return vertices.empty(); }

  // Throws InvalidArgument if an invariant is broken.
  void validate() const {
    for (const auto& v : vertices) {
      if (!v.allFinite()) throw InvalidArgument("non-finite vertex coordinate");
    }
    for (const auto& f : faces) {
      for (auto idx : f) {
        if (idx >= vertices.size()) {
          throw InvalidArgument("face index " + std::to_string(idx) +
                                " out of range");
        }
      }
    }
    if (has_labels() && labels.size() != vertices.size()) {
      throw InvalidArgument("label count does not match vertex count");
    }
  }

  // Appends `other`, offsetting its face indices. Unlabeled parts are
  // labeled {0, -1} when the other side carries labels.
  void append(const TriMesh& other) {
    const auto offset = static_cast<std::uint32_t>(vertices.size());
    if (other.has_labels() && !has_labels()) {
      labels.assign(vertices.size(), VertexLabel{});
    }
    vertices.insert(vertices.end(), other.vertices.begin(),
                    other.vertices.end());
    for (const auto& f : other.faces) {
      faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
    }
    if (has_labels()) {
      if (other.has_labels()) {
        labels.insert(labels.end(), other.labels.begin(), other.labels.end());
      } else {
        labels.resize(vertices.size(), VertexLabel{});
      }
    }
  }

  void set_labels(VertexLabel label) { labels.assign(vertices.size(), label); }
};

// Maps an angle to (-pi, pi].
inline double normalize_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  a = std::fmod(a, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

inline Mat3 rotation_z(double a) {
  return Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix();
}

// Similarity transform applied as scale, then rotation yaw(z)*pitch(y)*roll(x),
// then translation.
struct RigidPlacementTransform {
  Vec3 translation = Vec3::Zero();
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
  double scale = 1.0;

  Mat3 rotation() const {
    return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
            Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
            Eigen::AngleAxisd(roll, Vec3::UnitX()))
        .toRotationMatrix();
  }

  Vec3 apply(const Vec3& p) const { return rotation() * (scale * p) + translation; }

  RigidPlacementTransform normalized() const {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw InvalidArgument("transform scale must be positive");
    }
    RigidPlacementTransform t = *this;
    t.yaw = normalize_angle(yaw);
    t.pitch = normalize_angle(pitch);
    t.roll = normalize_angle(roll);
    return t;
  }

  friend bool operator==(const RigidPlacementTransform&,
                         const RigidPlacementTransform&) = default;
};

inline TriMesh apply_transform(const TriMesh& mesh,
                               const RigidPlacementTransform& t) {
  TriMesh out = mesh;
  const Mat3 r = t.rotation();
  for (auto& v : out.vertices) v = r * (t.scale * v) + t.translation;
  return out;
}

struct Aabb {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  bool valid() const { return (min.array() <= max.array()).all(); }
  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  void extend(const Aabb& o) {
    min = min.cwiseMin(o.min);
    max = max.cwiseMax(o.max);
  }
  Vec3 extents() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
  bool contains(const Vec3& p, double tol = 0.0) const {
    return (p.array() >= min.array() - tol).all() &&
           (p.array() <= max.array() + tol).all();
  }
  Aabb padded(double pad) const {
    return {min - Vec3::Constant(pad), max + Vec3::Constant(pad)};
  }
  friend bool operator==(const Aabb&, const Aabb&) = default;
};

inline Aabb aabb_of(std::span<const Vec3> points) {
  if (points.empty()) throw EmptyGeometry("bounding box of empty geometry");
  Aabb box;
  for (const auto& p : points) box.extend(p);
  return box;
}

inline Aabb aabb_of(const TriMesh& mesh) { return aabb_of(mesh.vertices); }

// Yaw-oriented box. `dims` are full extents along the box's local x, y, z.
struct BBox3D {
  Vec3 center = Vec3::Zero();
  Vec3 dims = Vec3::Ones();
  double yaw = 0.0;
  int semantic_id = 0;
  int instance_id = -1;

  double half_diagonal() const { return 0.5 * dims.norm(); }
  double volume() const { return dims.prod(); }

  // Point expressed in the box frame (origin at center, axes un-yawed).
  Vec3 to_local(const Vec3& p) const {
    const double c = std::cos(yaw), s = std::sin(yaw);
    const Vec3 d = p - center;
    return {c * d.x() + s * d.y(), -s * d.x() + c * d.y(), d.z()};
  }

  // Counter-clockwise footprint corners in the xy plane.
  std::array<Vec2, 4> footprint() const {
    const double c = std::cos(yaw), s = std::sin(yaw);
    const double hx = 0.5 * dims.x(), hy = 0.5 * dims.y();
    std::array<Vec2, 4> out;
    const double sx[4] = {-1, 1, 1, -1};
    const double sy[4] = {-1, -1, 1, 1};
    for (int i = 0; i < 4; ++i) {
      const double lx = sx[i] * hx, ly = sy[i] * hy;
      out[i] = Vec2(center.x() + c * lx - s * ly, center.y() + s * lx + c * ly);
    }
    return out;
  }

  void validate() const {
    if (!(dims.array() > 0.0).all() || !dims.allFinite() ||
        !center.allFinite() || !std::isfinite(yaw)) {
      throw InvalidArgument("box dims must be finite and strictly positive");
    }
  }
};

// Inclusive containment; `tol` absorbs rounding for points on a face.
inline constexpr double kObbTolerance = 1e-9;

inline bool point_in_obb(const Vec3& p, const BBox3D& b,
                         double tol = kObbTolerance) {
  const Vec3 local = b.to_local(p);
  const Vec3 half = 0.5 * b.dims;
  return std::abs(local.x()) <= half.x() + tol &&
         std::abs(local.y()) <= half.y() + tol &&
         std::abs(local.z()) <= half.z() + tol;
}

namespace detail {

inline double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

}  // namespace detail

inline double polygon_area(std::span<const Vec2> poly) {
  if (poly.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    twice += detail::cross2(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * std::abs(twice);
}

// Sutherland-Hodgman clipping of `subject` by a convex, counter-clockwise
// `clip` polygon. Exact for convex inputs up to rounding.
inline std::vector<Vec2> clip_convex(std::span<const Vec2> subject,
                                     std::span<const Vec2> clip) {
  std::vector<Vec2> out(subject.begin(), subject.end());
  for (std::size_t e = 0; e < clip.size() && !out.empty(); ++e) {
    const Vec2 a = clip[e];
    const Vec2 b = clip[(e + 1) % clip.size()];
    const Vec2 edge = b - a;
    auto side = [&](const Vec2& p) { return detail::cross2(edge, p - a); };
    std::vector<Vec2> in = std::move(out);
    out.clear();
    for (std::size_t i = 0; i < in.size(); ++i) {
      const Vec2& cur = in[i];
      const Vec2& prev = in[(i + in.size() - 1) % in.size()];
      const double sc = side(cur), sp = side(prev);
      if (sc >= 0.0) {
        if (sp < 0.0) out.push_back(prev + (cur - prev) * (sp / (sp - sc)));
        out.push_back(cur);
      } else if (sp >= 0.0) {
        out.push_back(prev + (cur - prev) * (sp / (sp - sc)));
      }
    }
  }
  return out;
}

// Footprint intersection area times vertical overlap, over the union volume.
inline double iou_3d(const BBox3D& a_in, const BBox3D& b_in) {
  // Evaluate in a canonical argument order so iou(a, b) == iou(b, a) bitwise.
  auto key = [](const BBox3D& b) {
    return std::make_tuple(b.center.x(), b.center.y(), b.center.z(),
                           b.dims.x(), b.dims.y(), b.dims.z(), b.yaw);
  };
  const bool swap = key(b_in) < key(a_in);
  const BBox3D& a = swap ? b_in : a_in;
  const BBox3D& b = swap ? a_in : b_in;

  const double zlo = std::max(a.center.z() - 0.5 * a.dims.z(),
                              b.center.z() - 0.5 * b.dims.z());
  const double zhi = std::min(a.center.z() + 0.5 * a.dims.z(),
                              b.center.z() + 0.5 * b.dims.z());
  const double dz = zhi - zlo;
  if (dz <= 0.0) return 0.0;
  const auto fa = a.footprint();
  const auto fb = b.footprint();
  const auto inter_poly = clip_convex(fa, fb);
  const double inter = polygon_area(inter_poly) * dz;
  if (inter <= 0.0) return 0.0;
  const double uni = a.volume() + b.volume() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace tablescape

#endif  // TABLESCAPE_GEOMETRY_HPP_

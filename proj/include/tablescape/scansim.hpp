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

#ifndef TABLESCAPE_SCANSIM_HPP_
#define TABLESCAPE_SCANSIM_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "tablescape/bvh.hpp"
#include "tablescape/catalog.hpp"
#include "tablescape/error.hpp"
#include "tablescape/geometry.hpp"
#include "tablescape/rng.hpp"

// Depth-camera emulation: viewpoint sampling around a table, z-buffer depth
// rendering by ray casting, and a structured-light noise model.
namespace tablescape {

// Pinhole model; pixel (u, v) has its center at integer coordinates.
// Defaults are Kinect-class values.
struct CameraIntrinsics {
  double fx = 585.0;
  double fy = 585.0;
  double cx = 319.5;
  double cy = 239.5;
  int width = 640;
  int height = 480;

  void validate() const {
    if (!(fx > 0.0 && fy > 0.0) || width <= 0 || height <= 0 || cx < 0.0 ||
        cx >= width || cy < 0.0 || cy >= height) {
      throw InvalidArgument("invalid camera intrinsics");
    }
  }

  // Same field of view at a different resolution.
  CameraIntrinsics scaled(double factor) const {
    CameraIntrinsics k;
    k.width = static_cast<int>(std::lround(width * factor));
    k.height = static_cast<int>(std::lround(height * factor));
    k.fx = fx * factor;
    k.fy = fy * factor;
    k.cx = (cx + 0.5) * factor - 0.5;
    k.cy = (cy + 0.5) * factor - 0.5;
    return k;
  }
};

// World <- camera. Camera axes: x right, y down, z forward.
struct CameraPose {
  Mat3 rotation = Mat3::Identity();
  Vec3 position = Vec3::Zero();

  Vec3 to_world(const Vec3& p_cam) const { return rotation * p_cam + position; }
  Vec3 to_camera(const Vec3& p_world) const {
    return rotation.transpose() * (p_world - position);
  }

  static CameraPose look_at(const Vec3& eye, const Vec3& target,
                            const Vec3& up = Vec3::UnitZ()) {
    const Vec3 forward = (target - eye).normalized();
    Vec3 right = forward.cross(up);
    if (right.norm() < 1e-9) right = forward.cross(Vec3::UnitX());
    right.normalize();
    const Vec3 down = forward.cross(right);
    CameraPose pose;
    pose.rotation.col(0) = right;
    pose.rotation.col(1) = down;
    pose.rotation.col(2) = forward;
    pose.position = eye;
    return pose;
  }
};

// Depth in meters along the optical axis; 0 marks an invalid pixel.
struct DepthFrame {
  CameraIntrinsics intrinsics;
  CameraPose pose;
  std::vector<float> depth;  // row-major, width * height

  float at(int u, int v) const {
    return depth[static_cast<std::size_t>(v) * intrinsics.width + u];
  }
  float& at(int u, int v) {
    return depth[static_cast<std::size_t>(v) * intrinsics.width + u];
  }

  Vec3 back_project(double u, double v, double d) const {
    const auto& k = intrinsics;
    return pose.to_world(Vec3((u - k.cx) / k.fx * d, (v - k.cy) / k.fy * d, d));
  }
};

// Projects a world point to (u, v, camera depth).
inline Vec3 project(const CameraIntrinsics& k, const CameraPose& pose, const Vec3& world) {
  const Vec3 c = pose.to_camera(world);
  return {k.fx * c.x() / c.z() + k.cx, k.fy * c.y() / c.z() + k.cy, c.z()};
}

// What the simulated operator circles around.
struct ScanTarget {
  Vec3 center = Vec3::Zero();   // look-at point (table top center)
  double bev_diagonal = 1.0;    // table footprint diagonal (m)
  AzimuthArc arc;
};

inline ScanTarget scan_target_of(const TriMesh& table, const AzimuthArc& arc) {
  const Aabb box = aabb_of(table);
  ScanTarget t;
  t.center = Vec3(box.center().x(), box.center().y(), box.max.z());
  t.bev_diagonal = std::hypot(box.extents().x(), box.extents().y());
  t.arc = arc;
  return t;
}

struct PoseSampling {
  double min_elevation_deg = 20.0;
  double max_elevation_deg = 60.0;
  double min_distance = 0.6;  // multiples of the table diagonal
  double max_distance = 1.6;
  double jitter = 0.05;       // look-at jitter half-width (m)
};

// Frames rendered per scene; midpoint of the 50-100 sequences averaged in
// the reference acquisition.
inline constexpr int kDefaultPoseCount = 75;
// Average fused frame count per scene in the reference acquisition.
inline constexpr double kTargetFusedFrames = 26.5;

inline std::vector<CameraPose> sample_poses(const ScanTarget& target, int n,
                                            std::uint64_t seed,
                                            const PoseSampling& params = {}) {
  if (n < 1) throw BadCount("need at least one pose");
  Rng rng(seed);
  std::vector<CameraPose> poses;
  poses.reserve(static_cast<std::size_t>(n));
  constexpr double kDeg = std::numbers::pi / 180.0;
  for (int i = 0; i < n; ++i) {
    const double az = rng.uniform(target.arc.lo_deg, target.arc.hi_deg) * kDeg;
    const double el = rng.uniform(params.min_elevation_deg, params.max_elevation_deg) * kDeg;
    const double dist =
        rng.uniform(params.min_distance, params.max_distance) * target.bev_diagonal;
    const Vec3 look = target.center + Vec3(rng.uniform(-params.jitter, params.jitter),
                                           rng.uniform(-params.jitter, params.jitter),
                                           rng.uniform(-params.jitter, params.jitter));
    const Vec3 dir(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
    poses.push_back(CameraPose::look_at(look + dist * dir, look));
  }
  return poses;
}

// Azimuth (degrees) of a camera around the look-at target.
inline double azimuth_deg(const CameraPose& pose, const Vec3& target) {
  const Vec3 d = pose.position - target;
  return std::atan2(d.y(), d.x()) * 180.0 / std::numbers::pi;
}

// Every k-th frame, k chosen so the kept count is close to `target`.
inline std::vector<int> select_frames(int n, double target = kTargetFusedFrames) {
  const int stride = std::max(1, static_cast<int>(std::lround(n / target)));
  std::vector<int> keep;
  for (int i = 0; i < n; i += stride) keep.push_back(i);
  return keep;
}

// Nearest-hit z-depth per pixel; rays that miss everything read 0.
inline DepthFrame render_depth(const Bvh& scene, const CameraIntrinsics& k,
                               const CameraPose& pose) {
  k.validate();
  DepthFrame frame;
  frame.intrinsics = k;
  frame.pose = pose;
  frame.depth.assign(static_cast<std::size_t>(k.width) * k.height, 0.0f);
  if (scene.empty()) return frame;
#pragma omp parallel for schedule(dynamic, 8)
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      // With a unit z component the ray parameter equals the z-depth.
      const Vec3 dir_cam((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
      if (auto hit = scene.intersect(pose.position, pose.rotation * dir_cam, 1e-6)) {
        frame.depth[static_cast<std::size_t>(v) * k.width + u] = static_cast<float>(hit->t);
      }
    }
  }
  return frame;
}

inline DepthFrame render_depth(const TriMesh& scene, const CameraIntrinsics& k,
                               const CameraPose& pose) {
  return render_depth(Bvh(scene), k, pose);
}

// sigma(z) = sigma0 + sigma1 * z^2, then rounding to `quantum`; depths past
// max_depth are dropped.
struct NoiseModel {
  double sigma0 = 0.001;    // m
  double sigma1 = 0.002;    // m per m^2
  double quantum = 0.001;   // m; 0 disables quantization
  double max_depth = 5.0;   // m
};

inline DepthFrame add_sensor_noise(const DepthFrame& frame, std::uint64_t seed,
                                   const NoiseModel& model = {}) {
  DepthFrame out = frame;
  Rng rng(seed);
  for (auto& d : out.depth) {
    if (d <= 0.0f) continue;
    const double z = d;
    if (z > model.max_depth) {
      d = 0.0f;
      continue;
    }
    double noisy = z;
    const double sigma = model.sigma0 + model.sigma1 * z * z;
    if (sigma > 0.0) noisy += sigma * rng.normal();
    if (model.quantum > 0.0) noisy = std::round(noisy / model.quantum) * model.quantum;
    d = (noisy > 0.0 && noisy <= model.max_depth) ? static_cast<float>(noisy) : 0.0f;
  }
  return out;
}

}  // namespace tablescape

#endif  // TABLESCAPE_SCANSIM_HPP_

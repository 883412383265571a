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

#ifndef TABLESCAPE_FUSION_HPP_
#define TABLESCAPE_FUSION_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tablescape/bvh.hpp"
#include "tablescape/catalog.hpp"
#include "tablescape/error.hpp"
#include "tablescape/geometry.hpp"
#include "tablescape/marching_cubes_tables.hpp"
#include "tablescape/placement.hpp"
#include "tablescape/rng.hpp"
#include "tablescape/scansim.hpp"

namespace tablescape {

// Truncated signed-distance grid. Voxel (i, j, k) is the sample point
// origin + voxel_size * (i, j, k). Storage is sparse: 8^3 blocks are created
// on demand, and a voxel in a missing block reads D = 1, W = 0.
class TsdfVolume {
 public:
  static constexpr int kBlock = 8;
  static constexpr int kBlockVoxels = kBlock * kBlock * kBlock;

  struct Block {
    std::array<double, kBlockVoxels> d;
    std::array<double, kBlockVoxels> w;
    Block() {
      d.fill(1.0);
      w.fill(0.0);
    }
  };

  TsdfVolume(const Vec3& origin, double voxel_size, std::array<int, 3> dims,
             double truncation)
      : origin_(origin), voxel_(voxel_size), dims_(dims), tau_(truncation) {
    if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
      throw BadVoxelSize("voxel size must be positive");
    }
    if (!(truncation >= voxel_size)) {
      throw InvalidArgument("truncation must be at least one voxel");
    }
    for (int n : dims) {
      if (n < 2 || n > kBlock * (1 << 20)) throw InvalidArgument("bad volume dimensions");
    }
  }

  // Grid covering `bounds` padded by 4 truncation widths.
  static TsdfVolume fit(const Aabb& bounds, double voxel_size, double truncation) {
    if (!(voxel_size > 0.0)) throw BadVoxelSize("voxel size must be positive");
    const Aabb box = bounds.padded(4.0 * truncation);
    std::array<int, 3> dims{};
    for (int a = 0; a < 3; ++a) {
      dims[a] = static_cast<int>(std::ceil(box.extents()[a] / voxel_size)) + 1;
    }
    return TsdfVolume(box.min, voxel_size, dims, truncation);
  }

  const Vec3& origin() const { return origin_; }
  double voxel_size() const { return voxel_; }
  double truncation() const { return tau_; }
  const std::array<int, 3>& dims() const { return dims_; }
  std::size_t block_count() const { return blocks_.size(); }

  bool in_bounds(int i, int j, int k) const {
    return i >= 0 && j >= 0 && k >= 0 && i < dims_[0] && j < dims_[1] && k < dims_[2];
  }

  Vec3 position(int i, int j, int k) const {
    return origin_ + voxel_ * Vec3(i, j, k);
  }

  double tsdf(int i, int j, int k) const {
    const Block* b = find_block(i, j, k);
    return b ? b->d[local_index(i, j, k)] : 1.0;
  }
  double weight(int i, int j, int k) const {
    const Block* b = find_block(i, j, k);
    return b ? b->w[local_index(i, j, k)] : 0.0;
  }

  // Direct write, for synthetic fields.
  void set(int i, int j, int k, double d, double w) {
    if (!in_bounds(i, j, k)) throw InvalidArgument("voxel out of bounds");
    Block& b = ensure_block(i >> 3, j >> 3, k >> 3);
    const int l = local_index(i, j, k);
    b.d[l] = std::clamp(d, -1.0, 1.0);
    b.w[l] = std::max(0.0, w);
  }

  // Materializes every block inside the grid (small volumes only).
  void allocate_all() {
    const auto nb = block_dims();
    for (int bz = 0; bz < nb[2]; ++bz)
      for (int by = 0; by < nb[1]; ++by)
        for (int bx = 0; bx < nb[0]; ++bx) ensure_block(bx, by, bz);
  }

  // Creates the blocks within one truncation band of each observed surface
  // point of `frame`.
  void allocate_band(const DepthFrame& frame) {
    const auto& k = frame.intrinsics;
    const auto nb = block_dims();
    std::unordered_set<std::uint64_t> keys;
    const double block_size = voxel_ * kBlock;
    std::uint64_t last = ~0ULL;
    for (int v = 0; v < k.height; ++v) {
      for (int u = 0; u < k.width; ++u) {
        const double z = frame.at(u, v);
        if (z <= 0.0) continue;
        const Vec3 a = frame.back_project(u, v, std::max(1e-6, z - tau_));
        const Vec3 b = frame.back_project(u, v, z + tau_);
        std::array<int, 3> lo{}, hi{};
        for (int ax = 0; ax < 3; ++ax) {
          const double mn = (std::min(a[ax], b[ax]) - origin_[ax]) / block_size;
          const double mx = (std::max(a[ax], b[ax]) - origin_[ax]) / block_size;
          lo[ax] = std::max(0, static_cast<int>(std::floor(mn)));
          hi[ax] = std::min(nb[ax] - 1, static_cast<int>(std::floor(mx)));
        }
        for (int bz = lo[2]; bz <= hi[2]; ++bz)
          for (int by = lo[1]; by <= hi[1]; ++by)
            for (int bx = lo[0]; bx <= hi[0]; ++bx) {
              const std::uint64_t key = pack(bx, by, bz);
              if (key == last) continue;
              last = key;
              keys.insert(key);
            }
      }
    }
    for (auto key : keys) {
      if (!blocks_.count(key)) blocks_.emplace(key, std::make_unique<Block>());
    }
  }

  // Running-average update of every allocated voxel seen by `frame`.
  void update(const DepthFrame& frame) {
    const auto& k = frame.intrinsics;
    k.validate();
    const auto keys = sorted_keys();
    const Mat3 rt = frame.pose.rotation.transpose();
    const Vec3 pos = frame.pose.position;
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t n = 0; n < static_cast<std::ptrdiff_t>(keys.size()); ++n) {
      const auto [bx, by, bz] = unpack(keys[n]);
      Block& blk = *blocks_.at(keys[n]);
      for (int lz = 0; lz < kBlock; ++lz) {
        for (int ly = 0; ly < kBlock; ++ly) {
          for (int lx = 0; lx < kBlock; ++lx) {
            const int i = bx * kBlock + lx, j = by * kBlock + ly, kk = bz * kBlock + lz;
            if (!in_bounds(i, j, kk)) continue;
            const Vec3 c = rt * (position(i, j, kk) - pos);
            if (c.z() <= 0.0) continue;
            const long u = std::lround(k.fx * c.x() / c.z() + k.cx);
            const long v = std::lround(k.fy * c.y() / c.z() + k.cy);
            if (u < 0 || v < 0 || u >= k.width || v >= k.height) continue;
            const double z = frame.at(static_cast<int>(u), static_cast<int>(v));
            if (z <= 0.0) continue;
            const double sdf = z - c.z();
            if (sdf < -tau_) continue;
            const double d = std::clamp(sdf / tau_, -1.0, 1.0);
            const int l = (lz * kBlock + ly) * kBlock + lx;
            const double w = blk.w[l];
            blk.d[l] = (w * blk.d[l] + d) / (w + 1.0);
            blk.w[l] = w + 1.0;
          }
        }
      }
    }
  }

  std::vector<std::uint64_t> sorted_keys() const {
    std::vector<std::uint64_t> keys;
    keys.reserve(blocks_.size());
    for (const auto& [key, _] : blocks_) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    return keys;
  }

  static std::uint64_t pack(int bx, int by, int bz) {
    return static_cast<std::uint64_t>(bx) | (static_cast<std::uint64_t>(by) << 21) |
           (static_cast<std::uint64_t>(bz) << 42);
  }
  static std::array<int, 3> unpack(std::uint64_t key) {
    constexpr std::uint64_t m = (1ULL << 21) - 1;
    return {static_cast<int>(key & m), static_cast<int>((key >> 21) & m),
            static_cast<int>((key >> 42) & m)};
  }

  const Block* block(std::uint64_t key) const {
    auto it = blocks_.find(key);
    return it == blocks_.end() ? nullptr : it->second.get();
  }

  std::array<int, 3> block_dims() const {
    return {(dims_[0] + kBlock - 1) / kBlock, (dims_[1] + kBlock - 1) / kBlock,
            (dims_[2] + kBlock - 1) / kBlock};
  }

  static int local_index(int i, int j, int k) {
    return ((k & 7) * kBlock + (j & 7)) * kBlock + (i & 7);
  }

  // Raw dump: magic, origin, voxel size, truncation, dims, block count, then
  // per block its coordinates followed by D and W (little-endian doubles).
  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    auto put = [&](const auto& v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
    out.write("TSDF0001", 8);
    for (int a = 0; a < 3; ++a) put(origin_[a]);
    put(voxel_);
    put(tau_);
    for (int n : dims_) put(static_cast<std::int32_t>(n));
    put(static_cast<std::uint64_t>(blocks_.size()));
    for (auto key : sorted_keys()) {
      for (int c : unpack(key)) put(static_cast<std::int32_t>(c));
      const Block& b = *blocks_.at(key);
      out.write(reinterpret_cast<const char*>(b.d.data()), sizeof b.d);
      out.write(reinterpret_cast<const char*>(b.w.data()), sizeof b.w);
    }
  }

 private:
  const Block* find_block(int i, int j, int k) const {
    if (!in_bounds(i, j, k)) return nullptr;
    return block(pack(i >> 3, j >> 3, k >> 3));
  }

  Block& ensure_block(int bx, int by, int bz) {
    auto& slot = blocks_[pack(bx, by, bz)];
    if (!slot) slot = std::make_unique<Block>();
    return *slot;
  }

  Vec3 origin_;
  double voxel_;
  std::array<int, 3> dims_;
  double tau_;
  std::unordered_map<std::uint64_t, std::unique_ptr<Block>> blocks_;
};

inline void integrate(TsdfVolume& volume, const DepthFrame& frame) {
  volume.allocate_band(frame);
  volume.update(frame);
}

// Allocates the union of all bands before updating, so the result does not
// depend on frame order.
inline void integrate_all(TsdfVolume& volume, const std::vector<DepthFrame>& frames) {
  for (const auto& f : frames) volume.allocate_band(f);
  for (const auto& f : frames) volume.update(f);
}

inline TriMesh extract_mesh(const TsdfVolume& volume) {
  TriMesh mesh;
  std::unordered_map<std::uint64_t, std::uint32_t> edge_vertex;
  const auto& dims = volume.dims();
  const std::uint64_t nx = dims[0], ny = dims[1];
  constexpr int B = TsdfVolume::kBlock;

  for (auto key : volume.sorted_keys()) {
    const auto [bx, by, bz] = TsdfVolume::unpack(key);
    const auto* blk = volume.block(key);
    for (int lz = 0; lz < B; ++lz) {
      for (int ly = 0; ly < B; ++ly) {
        for (int lx = 0; lx < B; ++lx) {
          const int i = bx * B + lx, j = by * B + ly, k = bz * B + lz;
          if (i + 1 >= dims[0] || j + 1 >= dims[1] || k + 1 >= dims[2]) continue;
          const bool interior = lx < B - 1 && ly < B - 1 && lz < B - 1;
          double d[8];
          bool observed = true;
          int cube = 0;
          for (int c = 0; c < 8 && observed; ++c) {
            const int ci = i + mc::kCornerOffset[c][0];
            const int cj = j + mc::kCornerOffset[c][1];
            const int ck = k + mc::kCornerOffset[c][2];
            double w;
            if (interior) {
              const int l = TsdfVolume::local_index(ci, cj, ck);
              d[c] = blk->d[l];
              w = blk->w[l];
            } else {
              d[c] = volume.tsdf(ci, cj, ck);
              w = volume.weight(ci, cj, ck);
            }
            observed = w > 0.0;
            if (d[c] < 0.0) cube |= 1 << c;
          }
          if (!observed || cube == 0 || cube == 255) continue;

          auto vertex_on = [&](int e) -> std::uint32_t {
            const int a = mc::kEdgeCorners[e][0], b = mc::kEdgeCorners[e][1];
            const int* oa = mc::kCornerOffset[a];
            const int* ob = mc::kCornerOffset[b];
            int axis = 0;
            while (oa[axis] == ob[axis]) ++axis;
            const int li = i + std::min(oa[0], ob[0]);
            const int lj = j + std::min(oa[1], ob[1]);
            const int lk = k + std::min(oa[2], ob[2]);
            const std::uint64_t id =
                ((static_cast<std::uint64_t>(lk) * ny + lj) * nx + li) * 3 + axis;
            auto [it, fresh] = edge_vertex.try_emplace(id, 0);
            if (fresh) {
              const double t = d[a] / (d[a] - d[b]);
              const Vec3 pa = volume.position(i + oa[0], j + oa[1], k + oa[2]);
              const Vec3 pb = volume.position(i + ob[0], j + ob[1], k + ob[2]);
              it->second = static_cast<std::uint32_t>(mesh.vertices.size());
              mesh.vertices.push_back(pa + t * (pb - pa));
            }
            return it->second;
          };

          const auto* row = mc::kTriangles[cube];
          for (int t = 0; row[t] != -1; t += 3) {
            Face f{vertex_on(row[t]), vertex_on(row[t + 1]), vertex_on(row[t + 2])};
            if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) continue;
            mesh.faces.push_back(f);
          }
        }
      }
    }
  }
  if (mesh.faces.empty()) throw EmptyVolume("no zero crossing in observed voxels");
  return mesh;
}

// ---------------------------------------------------------------------------
// Scan simulation driver.

struct ReconstructionParams {
  double voxel_size = 0.005;
  double truncation_voxels = 4.0;
  int pose_count = kDefaultPoseCount;
  double target_frames = kTargetFusedFrames;
  CameraIntrinsics intrinsics;
  PoseSampling poses;
  bool noise = true;
  NoiseModel noise_model;
  // Horizontal crop radius around the table, in table diagonals (single-table
  // variants only).
  double crop_factor = 1.5;

  double truncation() const { return truncation_voxels * voxel_size; }
};

struct ScanResult {
  TriMesh mesh;                     // reconstructed, unlabeled
  std::vector<CameraPose> poses;    // every sampled pose
  std::vector<int> kept;            // indices of fused poses
  std::vector<DepthFrame> frames;   // fused frames, after noise
  MaterializedScene scene;          // ground truth
  Aabb region;                      // reconstructed region (before padding)
};

// Region fused for a scene: the whole room, or a vertical column around the
// table for single-table variants.
inline Aabb scan_region(const SceneConfig& config, const AssetLibrary& lib,
                        const TriMesh& scene_mesh, double crop_factor) {
  Aabb full = aabb_of(scene_mesh);
  if (config.variant == Variant::kWholeRoom) return full;
  const Aabb table = aabb_of(lib.table_mesh(config.table_id));
  const double r = crop_factor * std::hypot(table.extents().x(), table.extents().y());
  Aabb roi = full;
  for (int a = 0; a < 2; ++a) {
    roi.min[a] = std::max(full.min[a], table.center()[a] - r);
    roi.max[a] = std::min(full.max[a], table.center()[a] + r);
  }
  return roi;
}

inline ScanResult reconstruct_scene(const SceneConfig& config, const AssetLibrary& lib,
                                    const ReconstructionParams& params,
                                    std::uint64_t seed) {
  if (!(params.voxel_size > 0.0)) throw BadVoxelSize("voxel size must be positive");
  ScanResult out;
  out.scene = materialize(config, lib);
  const Bvh bvh(out.scene.mesh);
  const TableAsset& table = lib.catalog().table(config.table_id);
  const ScanTarget target = scan_target_of(lib.table_mesh(config.table_id), table.arc);
  out.poses = sample_poses(target, params.pose_count, derive_seed(seed, 1), params.poses);
  out.kept = select_frames(params.pose_count, params.target_frames);
  for (int idx : out.kept) {
    DepthFrame f = render_depth(bvh, params.intrinsics, out.poses[idx]);
    if (params.noise) {
      f = add_sensor_noise(f, derive_seed(seed, 1000 + static_cast<std::uint64_t>(idx)),
                           params.noise_model);
    }
    out.frames.push_back(std::move(f));
  }
  out.region = scan_region(config, lib, out.scene.mesh, params.crop_factor);
  TsdfVolume volume =
      TsdfVolume::fit(out.region, params.voxel_size, params.truncation());
  integrate_all(volume, out.frames);
  out.mesh = extract_mesh(volume);
  return out;
}

}  // namespace tablescape

#endif  // TABLESCAPE_FUSION_HPP_

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

#ifndef TABLESCAPE_SAMPLING_HPP_
#define TABLESCAPE_SAMPLING_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "tablescape/annotate.hpp"
#include "tablescape/error.hpp"
#include "tablescape/geometry.hpp"
#include "tablescape/mesh_io.hpp"
#include "tablescape/rng.hpp"

namespace tablescape {

// Training-time point budget per scene.
inline constexpr int kPointBudget = 80000;
// Pre-voxelization cell for segmentation inputs (m).
inline constexpr double kGridVoxel = 0.004;
// Weight of the discriminator term in the joint loss.
inline constexpr double kDefaultLambda = 0.01;
// Share of the sampling weight that follows the scores.
inline constexpr double kDefaultAlpha = 0.8;

// Segmentation mIoU reported for each discriminator weight; the default above
// is the best row.
inline constexpr std::array<std::pair<double, double>, 5> kLambdaAblation = {{
    {0.0, 67.17}, {1.0, 66.12}, {0.1, 67.96}, {0.01, 69.09}, {0.001, 67.58}}};

struct ScoreField {
  std::vector<double> scores;

  void validate() const {
    for (double s : scores) {
      if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
        throw InvalidArgument("scores must be finite and within [0, 1]");
      }
    }
  }
};

// 1 at a box center, falling linearly to 0 at the half-diagonal; the maximum
// over boxes.
inline ScoreField soft_gt(std::span<const Vec3> points, std::span<const BBox3D> boxes) {
  for (const auto& b : boxes) b.validate();
  ScoreField f;
  f.scores.assign(points.size(), 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    double s = 0.0;
    for (const auto& b : boxes) {
      s = std::max(s, 1.0 - (points[i] - b.center).norm() / b.half_diagonal());
    }
    f.scores[i] = std::clamp(s, 0.0, 1.0);
  }
  return f;
}

struct LossTerms {
  double l_main = 0.0;
  double l_dis = 0.0;
  double lambda = kDefaultLambda;
};

inline double joint_loss(const LossTerms& t) {
  for (double v : {t.l_main, t.l_dis, t.lambda}) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("loss terms must be finite and >= 0");
  }
  return t.l_main + t.lambda * t.l_dis;
}

// Mean binary cross-entropy; predictions are clamped away from 0 and 1.
inline double bce_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) throw LengthMismatch("prediction and target differ");
  if (pred.empty()) return 0.0;
  constexpr double kEps = 1e-12;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = std::clamp(pred[i], kEps, 1.0 - kEps);
    sum -= target[i] * std::log(p) + (1.0 - target[i]) * std::log(1.0 - p);
  }
  return sum / static_cast<double>(pred.size());
}

inline double mse_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) throw LengthMismatch("prediction and target differ");
  if (pred.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    sum += d * d;
  }
  return sum / static_cast<double>(pred.size());
}

namespace detail {
inline void check_count(std::size_t n, std::size_t m) {
  if (m < 1 || m > n) {
    throw BadCount("sample count " + std::to_string(m) + " not in [1, " + std::to_string(n) + "]");
  }
}
}  // namespace detail

// Greedy max-min selection from a seeded start; ties go to the lower index.
inline std::vector<std::size_t> fps(std::span<const Vec3> points, std::size_t m,
                                    std::uint64_t seed) {
  detail::check_count(points.size(), m);
  Rng rng(seed);
  std::vector<double> dist(points.size(), std::numeric_limits<double>::infinity());
  std::vector<std::size_t> out;
  out.reserve(m);
  std::size_t cur = rng.below(points.size());
  for (std::size_t k = 0; k < m; ++k) {
    out.push_back(cur);
    const Vec3 c = points[cur];
    dist[cur] = -std::numeric_limits<double>::infinity();
    std::size_t next = 0;
    double far = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      dist[i] = std::min(dist[i], (points[i] - c).squaredNorm());
      if (dist[i] > far) {
        far = dist[i];
        next = i;
      }
    }
    cur = next;
  }
  return out;
}

// One point per occupied cell (cells are aligned to the origin): the point
// nearest the cell center, ties to the lower index. Output is ascending.
inline std::vector<std::size_t> grid_sample(std::span<const Vec3> points,
                                            double voxel_size = kGridVoxel) {
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
    throw BadVoxelSize("voxel size must be positive");
  }
  using Key = std::array<std::int64_t, 3>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return static_cast<std::size_t>(
          mix_seed(static_cast<std::uint64_t>(k[0]) ^
                   mix_seed(static_cast<std::uint64_t>(k[1]) ^
                            mix_seed(static_cast<std::uint64_t>(k[2])))));
    }
  };
  std::unordered_map<Key, std::pair<double, std::size_t>, KeyHash> best;
  for (std::size_t i = 0; i < points.size(); ++i) {
    Key key;
    Vec3 center;
    for (int a = 0; a < 3; ++a) {
      key[a] = static_cast<std::int64_t>(std::floor(points[i][a] / voxel_size));
      center[a] = (static_cast<double>(key[a]) + 0.5) * voxel_size;
    }
    const double d = (points[i] - center).squaredNorm();
    auto [it, fresh] = best.try_emplace(key, d, i);
    if (!fresh && d < it->second.first) it->second = {d, i};
  }
  std::vector<std::size_t> out;
  out.reserve(best.size());
  for (const auto& [_, v] : best) out.push_back(v.second);
  std::sort(out.begin(), out.end());
  return out;
}

// m distinct indices, uniformly, by a partial Fisher-Yates shuffle.
inline std::vector<std::size_t> random_sample(std::size_t n, std::size_t m,
                                              std::uint64_t seed) {
  detail::check_count(n, m);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < m; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
  idx.resize(m);
  return idx;
}

inline std::vector<std::size_t> random_sample(std::span<const Vec3> points, std::size_t m,
                                              std::uint64_t seed) {
  return random_sample(points.size(), m, seed);
}

// w_i = (1 - alpha) / N + alpha * s_i / sum(s); uniform when all scores are 0.
inline std::vector<double> sampling_weights(const ScoreField& scores, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must be in [0, 1]");
  scores.validate();
  const std::size_t n = scores.scores.size();
  std::vector<double> w(n, n ? 1.0 / static_cast<double>(n) : 0.0);
  const double total = std::accumulate(scores.scores.begin(), scores.scores.end(), 0.0);
  if (total <= 0.0) return w;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = (1.0 - alpha) / static_cast<double>(n) + alpha * scores.scores[i] / total;
  }
  return w;
}

// Weighted sampling without replacement: the m smallest keys -ln(u) / w_i.
// Output follows key order, so element 0 is the first draw.
inline std::vector<std::size_t> dynamic_sample(const ScoreField& scores, std::size_t m,
                                               double alpha, std::uint64_t seed) {
  const std::size_t n = scores.scores.size();
  detail::check_count(n, m);
  const std::vector<double> w = sampling_weights(scores, alpha);
  struct Key {
    double key;
    double tie;
    std::size_t index;
  };
  std::vector<Key> keys(n);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform_pos();
    const double tie = rng.uniform();
    const double k = w[i] > 0.0 ? -std::log(u) / w[i] : std::numeric_limits<double>::infinity();
    keys[i] = {k, tie, i};
  }
  auto less = [](const Key& a, const Key& b) {
    return std::tie(a.key, a.tie, a.index) < std::tie(b.key, b.tie, b.index);
  };
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(m), keys.end(),
                    less);
  std::vector<std::size_t> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = keys[i].index;
  return out;
}

inline std::vector<std::size_t> dynamic_sample(std::span<const Vec3> points,
                                               const ScoreField& scores, std::size_t m,
                                               double alpha, std::uint64_t seed) {
  if (points.size() != scores.scores.size()) throw LengthMismatch("one score per point");
  return dynamic_sample(scores, m, alpha, seed);
}

// Retained fraction per semantic class; classes with no points are omitted.
inline std::map<int, double> density_report(const LabeledCloud& cloud,
                                            std::span<const std::size_t> indices) {
  std::map<int, std::pair<std::size_t, std::size_t>> counts;
  for (int s : cloud.semantic) ++counts[s].second;
  for (std::size_t i : indices) {
    if (i >= cloud.size()) throw InvalidArgument("sample index out of range");
    ++counts[cloud.semantic[i]].first;
  }
  std::map<int, double> out;
  for (const auto& [cls, c] : counts) {
    out[cls] = static_cast<double>(c.first) / static_cast<double>(c.second);
  }
  return out;
}

inline void write_score_field(const std::filesystem::path& path, std::span<const Vec3> points,
                              const ScoreField& field) {
  if (points.size() != field.scores.size()) throw LengthMismatch("one score per point");
  std::vector<PlyVertexProperty> props(1);
  props[0].name = "score";
  props[0].values = field.scores;
  write_ply(path, points, {}, props);
}

inline ScoreField read_score_field(const std::filesystem::path& path) {
  PlyData ply = read_ply(path);
  auto it = ply.vertex_properties.find("score");
  if (it == ply.vertex_properties.end()) throw IoError(path.string() + ": no score property");
  ScoreField f{it->second};
  for (auto& s : f.scores) s = std::clamp(s, 0.0, 1.0);
  return f;
}

}  // namespace tablescape

#endif  // TABLESCAPE_SAMPLING_HPP_

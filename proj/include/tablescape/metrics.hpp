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

#ifndef TABLESCAPE_METRICS_HPP_
#define TABLESCAPE_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "tablescape/error.hpp"
#include "tablescape/geometry.hpp"

namespace tablescape {

struct MiouResult {
  double mean = 0.0;
  // Empty for classes absent from both prediction and ground truth.
  std::vector<std::optional<double>> per_class;
};

inline MiouResult miou(std::span<const int> pred, std::span<const int> gt, int num_classes) {
  if (pred.size() != gt.size()) throw LengthMismatch("prediction and label counts differ");
  if (num_classes < 1) throw InvalidArgument("need at least one class");
  std::vector<std::uint64_t> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const int p = pred[i], g = gt[i];
    if (p < 0 || p >= num_classes || g < 0 || g >= num_classes) {
      throw InvalidArgument("label out of range");
    }
    if (p == g) {
      ++tp[p];
    } else {
      ++fp[p];
      ++fn[g];
    }
  }
  MiouResult out;
  out.per_class.resize(num_classes);
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < num_classes; ++c) {
    const std::uint64_t denom = tp[c] + fp[c] + fn[c];
    if (denom == 0) continue;
    out.per_class[c] = static_cast<double>(tp[c]) / static_cast<double>(denom);
    sum += *out.per_class[c];
    ++present;
  }
  out.mean = present ? sum / present : 0.0;
  return out;
}

struct Detection {
  BBox3D box;
  int label = 0;
  double score = 0.0;
  int scene = 0;
};

struct GroundTruth {
  BBox3D box;
  int label = 0;
  int scene = 0;
};

struct MapResult {
  double map = 0.0;
  std::map<int, double> per_class;  // classes with at least one ground truth
};

// Area under the precision envelope, all recall points.
inline double average_precision(std::span<const int> tp_flags, std::size_t num_gt) {
  if (num_gt == 0) return 0.0;
  const std::size_t n = tp_flags.size();
  std::vector<double> recall(n), precision(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    tp += tp_flags[i] ? 1 : 0;
    recall[i] = static_cast<double>(tp) / static_cast<double>(num_gt);
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  for (std::size_t i = n; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);
  double ap = 0.0, prev_recall = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

// Per class: detections by descending score, each matched to its best-IoU
// ground truth of that class and scene; a match needs IoU >= iou_thresh and
// an unclaimed ground truth.
inline MapResult map_at(std::span<const Detection> dets, std::span<const GroundTruth> gts,
                        double iou_thresh) {
  for (const auto& d : dets) {
    if (!std::isfinite(d.score)) throw InvalidArgument("detection score must be finite");
  }
  std::map<int, std::vector<std::size_t>> gt_by_class;
  for (std::size_t i = 0; i < gts.size(); ++i) gt_by_class[gts[i].label].push_back(i);

  MapResult out;
  for (const auto& [label, gt_idx] : gt_by_class) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (dets[i].label == label) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return dets[a].score > dets[b].score;
    });
    std::vector<bool> claimed(gts.size(), false);
    std::vector<int> flags;
    for (std::size_t di : order) {
      const auto& d = dets[di];
      double best = -1.0;
      std::size_t best_gt = 0;
      for (std::size_t gi : gt_idx) {
        if (gts[gi].scene != d.scene) continue;
        const double iou = iou_3d(d.box, gts[gi].box);
        if (iou > best) {
          best = iou;
          best_gt = gi;
        }
      }
      const bool hit = best >= iou_thresh && !claimed[best_gt];
      if (hit) claimed[best_gt] = true;
      flags.push_back(hit ? 1 : 0);
    }
    out.per_class[label] = average_precision(flags, gt_idx.size());
  }
  double sum = 0.0;
  for (const auto& [_, ap] : out.per_class) sum += ap;
  out.map = out.per_class.empty() ? 0.0 : sum / static_cast<double>(out.per_class.size());
  return out;
}

}  // namespace tablescape

#endif  // TABLESCAPE_METRICS_HPP_

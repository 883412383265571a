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

#ifndef TABLESCAPE_PIPELINE_HPP_
#define TABLESCAPE_PIPELINE_HPP_

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "tablescape/annotate.hpp"
#include "tablescape/catalog.hpp"
#include "tablescape/depth_io.hpp"
#include "tablescape/error.hpp"
#include "tablescape/fusion.hpp"
#include "tablescape/metrics.hpp"
#include "tablescape/placement.hpp"
#include "tablescape/sampling.hpp"
#include "tablescape/scansim.hpp"

// Batch drivers behind the command-line tool. Output layout under a root:
//   configs/<variant>_<index>.json     scene configs
//   frames/<scene>/<frame>.png|json    fused depth frames
//   scenes/<scene>.ply                 labeled reconstruction
//   labels/<scene>.boxes.json          tabletop boxes
//   splits/{train,test}.txt, split.json
namespace tablescape::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

// Structured progress events: name plus fields.
using LogFn = std::function<void(const std::string&, const json&)>;

inline void no_log(const std::string&, const json&) {}

// Train share of each variant's published split.
inline double default_split_ratio(Variant v) {
  switch (v) {
    case Variant::kCrowd: return 3350.0 / 3999.0;
    case Variant::kWholeRoom: return 3852.0 / (3852.0 + 811.0);
    default: return 10003.0 / 12078.0;
  }
}

inline constexpr int kMinPoseCount = 50;
inline constexpr int kMaxPoseCount = 100;

inline json recon_params_to_json(const ReconstructionParams& p) {
  return {{"voxel_size", p.voxel_size},
          {"truncation_voxels", p.truncation_voxels},
          {"pose_count", p.pose_count},
          {"target_frames", p.target_frames},
          {"noise", p.noise},
          {"crop_factor", p.crop_factor},
          {"image_width", p.intrinsics.width},
          {"image_height", p.intrinsics.height}};
}

// Overrides from a JSON object; `image_scale` rescales the default camera.
inline ReconstructionParams recon_params_from_json(const json& j,
                                                   ReconstructionParams p = {}) {
  p.voxel_size = j.value("voxel_size", p.voxel_size);
  p.truncation_voxels = j.value("truncation_voxels", p.truncation_voxels);
  p.pose_count = j.value("pose_count", p.pose_count);
  p.target_frames = j.value("target_frames", p.target_frames);
  p.noise = j.value("noise", p.noise);
  p.crop_factor = j.value("crop_factor", p.crop_factor);
  if (j.contains("image_scale")) p.intrinsics = CameraIntrinsics{}.scaled(j["image_scale"].get<double>());
  if (!(p.voxel_size > 0.0)) throw BadVoxelSize("voxel size must be positive");
  if (p.pose_count < 1) throw BadCount("pose count must be at least 1");
  return p;
}

inline std::string scene_name(Variant v, int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%05d", index);
  return to_string(v) + "_" + buf;
}

inline void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

inline std::vector<fs::path> list_files(const fs::path& dir, const std::string& suffix) {
  std::vector<fs::path> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (e.is_regular_file() && name.size() >= suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Runs fn(0..n-1) on `jobs` threads; the first failure (by index) is rethrown.
inline void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(n, 0)));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, std::max(n, 1));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ---------------------------------------------------------------------------
// gen

// Scene i uses table i mod T (tables in catalog order) and seed
// derive_seed(seed, i); a table that cannot take the variant's minimum count
// is retried with fresh seeds.
inline std::vector<fs::path> generate(const AssetLibrary& lib, Variant variant, int count,
                                      std::uint64_t seed, const fs::path& out_root,
                                      const LogFn& log = no_log) {
  if (count < 1) throw BadCount("scene count must be at least 1");
  const auto& tables = lib.catalog().tables;
  if (tables.empty()) throw InvalidArgument("catalog has no tables");
  const CountRange range = default_count_range(variant);
  std::vector<fs::path> written;
  for (int i = 0; i < count; ++i) {
    const std::string& table_id = tables[static_cast<std::size_t>(i) % tables.size()].id;
    std::uint64_t scene_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    std::optional<SceneConfig> config;
    for (int attempt = 0; attempt < 8 && !config; ++attempt) {
      try {
        config = procedural_place(new_scene(lib, table_id, variant, scene_seed), lib, range,
                                  scene_seed);
      } catch (const PlacementExhausted&) {
        scene_seed = mix_seed(scene_seed);
      }
    }
    if (!config) throw PlacementExhausted("table " + table_id + " cannot hold the scene");
    const fs::path path = out_root / "configs" / (scene_name(variant, i) + ".json");
    write_text(path, to_json(*config).dump(2) + "\n");
    log("generated", {{"scene", path.stem().string()},
                      {"table", table_id},
                      {"objects", config->placements.size()}});
    written.push_back(path);
  }
  return written;
}

// ---------------------------------------------------------------------------
// scan

struct ScanOptions {
  ReconstructionParams recon;
  bool write_frames = true;
  int jobs = 1;
};

// Simulates, fuses and labels every config under configs_dir.
inline std::vector<std::string> scan(const AssetLibrary& lib, const fs::path& configs_dir,
                                     const fs::path& out_root, const ScanOptions& opt,
                                     const LogFn& log = no_log) {
  const auto configs = list_files(configs_dir, ".json");
  if (configs.empty()) throw InvalidArgument("no configs in " + configs_dir.string());
  std::vector<std::string> names(configs.size());
  std::mutex log_mutex;
  parallel_for(static_cast<int>(configs.size()), opt.jobs, [&](int i) {
    const std::string name = configs[i].stem().string();
    const SceneConfig config = scene_config_from_json(read_json_file(configs[i]));
    const std::uint64_t seed = derive_seed(config.seed, 0x5ca9);
    ScanResult result = reconstruct_scene(config, lib, opt.recon, seed);
    LabeledCloud cloud = label_points(result.mesh.vertices, result.scene.boxes);
    if (config.variant == Variant::kWholeRoom) {
      transfer_furniture_labels(cloud, result.scene.mesh);
    }
    write_labeled_cloud(out_root / "scenes" / (name + ".ply"), cloud, result.mesh.faces);
    write_text(out_root / "labels" / (name + ".boxes.json"),
               boxes_to_json(result.scene.boxes).dump(2) + "\n");
    if (opt.write_frames) {
      for (std::size_t f = 0; f < result.frames.size(); ++f) {
        char stem[16];
        std::snprintf(stem, sizeof stem, "%03d", result.kept[f]);
        write_depth_frame(out_root / "frames" / name / stem, result.frames[f]);
      }
    }
    names[i] = name;
    std::lock_guard lock(log_mutex);
    log("scanned", {{"scene", name},
                    {"frames", result.frames.size()},
                    {"vertices", result.mesh.vertices.size()},
                    {"boxes", result.scene.boxes.size()}});
  });
  return names;
}

// ---------------------------------------------------------------------------
// split

// Partitions the generated scenes, grouping by table.
inline DatasetSplit split(const fs::path& out_root, double ratio, std::uint64_t seed,
                          const LogFn& log = no_log) {
  const auto configs = list_files(out_root / "configs", ".json");
  if (configs.empty()) throw InvalidArgument("no configs under " + out_root.string());
  std::vector<std::string> tables;
  std::vector<std::string> names;
  for (const auto& c : configs) {
    tables.push_back(read_json_file(c).at("table_id").get<std::string>());
    names.push_back(c.stem().string());
  }
  DatasetSplit s = split_dataset(tables, ratio, seed);
  auto listing = [&](const std::vector<std::size_t>& idx) {
    std::string text;
    for (auto i : idx) text += names[i] + "\n";
    return text;
  };
  write_text(out_root / "splits" / "train.txt", listing(s.train));
  write_text(out_root / "splits" / "test.txt", listing(s.test));
  json meta = {{"ratio", ratio}, {"seed", seed}, {"train", s.train.size()},
               {"test", s.test.size()}};
  if (!s.warning.empty()) meta["warning"] = s.warning;
  write_text(out_root / "splits" / "split.json", meta.dump(2) + "\n");
  log("split", meta);
  return s;
}

// ---------------------------------------------------------------------------
// eval

// A file, or every file with `suffix` in a directory.
inline std::vector<fs::path> resolve_inputs(const fs::path& p, const std::string& suffix) {
  std::error_code ec;
  if (fs::is_directory(p, ec)) return list_files(p, suffix);
  if (!fs::exists(p, ec)) throw IoError("no such file " + p.string());
  return {p};
}

inline json per_class_json(const std::map<int, double>& values) {
  json out = json::object();
  for (const auto& [cls, v] : values) out[taxonomy::class_name(cls)] = v;
  return out;
}

// Point-wise mIoU over labeled PLYs (matched by position in sorted order).
inline json eval_miou(const fs::path& pred, const fs::path& gt) {
  const auto pf = resolve_inputs(pred, ".ply");
  const auto gf = resolve_inputs(gt, ".ply");
  if (pf.size() != gf.size()) throw LengthMismatch("prediction and label file counts differ");
  std::vector<int> p_all, g_all;
  for (std::size_t i = 0; i < pf.size(); ++i) {
    const LabeledCloud p = read_labeled_cloud(pf[i]);
    const LabeledCloud g = read_labeled_cloud(gf[i]);
    if (p.size() != g.size()) throw LengthMismatch(pf[i].string() + ": point counts differ");
    p_all.insert(p_all.end(), p.semantic.begin(), p.semantic.end());
    g_all.insert(g_all.end(), g.semantic.begin(), g.semantic.end());
  }
  const MiouResult r = miou(p_all, g_all, taxonomy::kNumClasses);
  std::map<int, double> per;
  for (int c = 0; c < taxonomy::kNumClasses; ++c) {
    if (r.per_class[c]) per[c] = *r.per_class[c];
  }
  return {{"metric", "miou"}, {"value", r.mean}, {"per_class", per_class_json(per)}};
}

// Detections: box JSON entries with an extra "score". Ground truth: box JSON.
inline json eval_map(const fs::path& pred, const fs::path& gt, double iou_thresh = 0.25) {
  const auto pf = resolve_inputs(pred, ".json");
  const auto gf = resolve_inputs(gt, ".json");
  if (pf.size() != gf.size()) throw LengthMismatch("prediction and label file counts differ");
  std::vector<Detection> dets;
  std::vector<GroundTruth> gts;
  for (std::size_t i = 0; i < pf.size(); ++i) {
    const int scene = static_cast<int>(i);
    const json pj = read_json_file(pf[i]);
    const auto pboxes = boxes_from_json(pj);
    for (std::size_t k = 0; k < pboxes.size(); ++k) {
      dets.push_back({pboxes[k], pboxes[k].semantic_id, pj[k].value("score", 1.0), scene});
    }
    for (const auto& b : boxes_from_json(read_json_file(gf[i]))) {
      gts.push_back({b, b.semantic_id, scene});
    }
  }
  const MapResult r = map_at(dets, gts, iou_thresh);
  return {{"metric", "map25"},
          {"iou_threshold", iou_thresh},
          {"value", r.map},
          {"per_class", per_class_json(r.per_class)}};
}

// ---------------------------------------------------------------------------
// stats

inline json defaults_json() {
  const ReconstructionParams recon;
  return {{"lambda", kDefaultLambda},
          {"point_budget", kPointBudget},
          {"pose_count", kDefaultPoseCount},
          {"pose_count_range", {kMinPoseCount, kMaxPoseCount}},
          {"target_fused_frames", kTargetFusedFrames},
          {"grid_voxel_m", kGridVoxel},
          {"tsdf_voxel_m", recon.voxel_size},
          {"tsdf_truncation_m", recon.truncation()},
          {"dynamic_alpha", kDefaultAlpha},
          {"iou_threshold", 0.25},
          {"split_ratio",
           {{"vanilla", default_split_ratio(Variant::kVanilla)},
            {"crowd", default_split_ratio(Variant::kCrowd)},
            {"whole_room", default_split_ratio(Variant::kWholeRoom)}}}};
}

// Defaults plus, when out_root holds a dataset, scene and instance counts.
inline json stats(const AssetLibrary* lib, const fs::path& out_root) {
  json out = {{"defaults", defaults_json()}};
  json lambda_rows = json::array();
  for (const auto& [l, m] : kLambdaAblation) lambda_rows.push_back({{"lambda", l}, {"miou", m}});
  out["lambda_ablation"] = lambda_rows;
  const auto configs = list_files(out_root / "configs", ".json");
  if (configs.empty()) return out;
  std::map<std::string, int> scenes, instances;
  int total = 0;
  for (const auto& c : configs) {
    const SceneConfig config = scene_config_from_json(read_json_file(c));
    ++scenes[to_string(config.variant)];
    for (const auto& p : config.placements) {
      const ObjectAsset* o = lib ? lib->catalog().find_object(p.asset_id) : nullptr;
      ++instances[o ? o->category : p.asset_id];
      ++total;
    }
  }
  out["scenes"] = scenes;
  // Per category when a catalog is at hand, per asset otherwise.
  out[lib ? "instances" : "instances_by_asset"] = instances;
  out["instance_total"] = total;
  return out;
}

}  // namespace tablescape::pipeline

#endif  // TABLESCAPE_PIPELINE_HPP_

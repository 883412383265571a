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

// Command-line driver: catalog setup, gen -> scan -> split -> eval, stats and
// the placement server. Exit codes: 0 ok, 2 invalid input, 3 pipeline failure.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <set>
#include <string>

#include "tablescape/tablescape.hpp"
#include "tablescape/pipeline.hpp"
#include "tablescape/service.hpp"

namespace ts = tablescape;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitFailed = 3;

bool g_json_logs = false;

void log_event(const std::string& event, const json& fields) {
  if (g_json_logs) {
    json line = fields.is_object() ? fields : json{{"value", fields}};
    line["event"] = event;
    std::cerr << line.dump() << "\n";
    return;
  }
  std::cerr << event;
  if (fields.is_object()) {
    for (const auto& [k, v] : fields.items()) {
      std::cerr << " " << k << "=" << (v.is_string() ? v.get<std::string>() : v.dump());
    }
  }
  std::cerr << "\n";
}

int exit_code_for(const ts::Error& e) {
  static const std::set<std::string> kInvalid = {
      "InvalidArgument", "BadCount",     "BadVoxelSize",   "ParseError",
      "UnsupportedFormat", "UnknownTable", "UnknownAsset", "VariantMismatch",
      "LengthMismatch",  "IncompatibleCategory"};
  return kInvalid.count(e.kind()) ? kExitInvalid : kExitFailed;
}

ts::AssetLibrary open_catalog(const std::string& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw ts::InvalidArgument("catalog not found: " + path);
  return ts::AssetLibrary::open(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabletop scene synthesis, scan simulation and annotation"};
  app.set_config("--config", "", "TOML/INI file with option values; flags win");
  app.add_flag("--json", g_json_logs, "Log events as JSON lines on stderr");
  app.require_subcommand(1);

  // init-catalog
  auto* init = app.add_subcommand("init-catalog", "Write the built-in synthetic catalog");
  std::string init_out = "catalog";
  ts::synthetic::Options syn;
  init->add_option("--out", init_out, "Catalog directory")->capture_default_str();
  init->add_option("--tables-per-category", syn.tables_per_category)->capture_default_str();
  init->add_option("--objects-per-category", syn.objects_per_category)->capture_default_str();
  init->add_option("--seed", syn.seed)->capture_default_str();

  // validate-catalog
  auto* vcat = app.add_subcommand("validate-catalog", "Check a catalog manifest");
  std::string catalog_path = "catalog/catalog.json";
  vcat->add_option("--catalog", catalog_path, "catalog.json")->capture_default_str();

  // gen
  auto* gen = app.add_subcommand("gen", "Generate scene configs");
  std::string variant_name = "vanilla";
  int count = 1;
  std::uint64_t seed = 0;
  std::string out_root = "out";
  gen->add_option("--catalog", catalog_path)->capture_default_str();
  gen->add_option("--variant", variant_name)
      ->check(CLI::IsMember({"vanilla", "crowd", "whole_room"}))
      ->capture_default_str();
  gen->add_option("--count", count)->capture_default_str();
  gen->add_option("--seed", seed)->capture_default_str();
  gen->add_option("--out", out_root, "Output root")->capture_default_str();

  // scan
  auto* scan = app.add_subcommand("scan", "Simulate scans, fuse and label");
  std::string scan_in;
  ts::pipeline::ScanOptions scan_opt;
  double image_scale = 1.0;
  bool no_noise = false, no_frames = false;
  scan->add_option("--catalog", catalog_path)->capture_default_str();
  scan->add_option("--in", scan_in, "Config directory (default <out>/configs)");
  scan->add_option("--out", out_root, "Output root")->capture_default_str();
  scan->add_option("--voxel", scan_opt.recon.voxel_size, "TSDF voxel size (m)")
      ->capture_default_str();
  scan->add_option("--truncation-voxels", scan_opt.recon.truncation_voxels)
      ->capture_default_str();
  scan->add_option("--poses", scan_opt.recon.pose_count, "Sampled camera poses")
      ->capture_default_str();
  scan->add_option("--target-frames", scan_opt.recon.target_frames, "Fused frames per scene")
      ->capture_default_str();
  scan->add_option("--image-scale", image_scale, "Camera resolution factor")
      ->capture_default_str();
  scan->add_option("--crop-factor", scan_opt.recon.crop_factor)->capture_default_str();
  scan->add_flag("--no-noise", no_noise, "Disable sensor noise");
  scan->add_flag("--no-frames", no_frames, "Do not write depth frames");
  scan->add_option("--jobs", scan_opt.jobs, "Parallel scenes")->capture_default_str();

  // split
  auto* split = app.add_subcommand("split", "Train/test split at table level");
  std::optional<double> ratio;
  split->add_option("--out", out_root, "Output root")->capture_default_str();
  split->add_option("--ratio", ratio, "Train share (default: published ratio of the variant)");
  split->add_option("--seed", seed)->capture_default_str();

  // eval
  auto* eval = app.add_subcommand("eval", "Score predictions");
  std::string pred, gt, metric = "miou";
  eval->add_option("--pred", pred)->required();
  eval->add_option("--gt", gt)->required();
  eval->add_option("--metric", metric)
      ->check(CLI::IsMember({"miou", "map25"}))
      ->capture_default_str();

  // stats
  auto* stats = app.add_subcommand("stats", "Defaults and dataset counts");
  std::string stats_catalog;
  stats->add_option("--catalog", stats_catalog);
  stats->add_option("--out", out_root, "Output root")->capture_default_str();

  // serve
  auto* serve = app.add_subcommand("serve", "Run the placement server");
  ts::ServiceOptions svc_opt;
  std::string store = "store", host = "0.0.0.0", ui_dir;
  int port = 8080;
  serve->add_option("--catalog", catalog_path)->capture_default_str();
  serve->add_option("--store", store)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--seed", svc_opt.seed)->capture_default_str();
  serve->add_option("--ui", ui_dir, "Static UI bundle served under /ui");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*init) {
      const auto lib = ts::synthetic::make_library(syn);
      const auto manifest = ts::synthetic::write_library(init_out, lib);
      log_event("catalog_written", {{"manifest", manifest.string()},
                                    {"tables", lib.catalog().tables.size()},
                                    {"objects", lib.catalog().objects.size()}});
    } else if (*vcat) {
      const auto lib = open_catalog(catalog_path);
      const auto findings =
          ts::validate_catalog(lib.catalog(), lib.compatibility(), lib.root());
      json out = json::array();
      for (const auto& f : findings) {
        out.push_back({{"kind", f.kind}, {"subject", f.subject}, {"detail", f.detail}});
      }
      std::cout << out.dump(2) << "\n";
      if (!findings.empty()) return kExitInvalid;
    } else if (*gen) {
      const auto lib = open_catalog(catalog_path);
      ts::pipeline::generate(lib, ts::variant_from_string(variant_name), count, seed, out_root,
                             log_event);
    } else if (*scan) {
      const auto lib = open_catalog(catalog_path);
      if (image_scale != 1.0) scan_opt.recon.intrinsics = ts::CameraIntrinsics{}.scaled(image_scale);
      scan_opt.recon.noise = !no_noise;
      scan_opt.write_frames = !no_frames;
      const fs::path in = scan_in.empty() ? fs::path(out_root) / "configs" : fs::path(scan_in);
      log_event("scan_params", ts::pipeline::recon_params_to_json(scan_opt.recon));
      ts::pipeline::scan(lib, in, out_root, scan_opt, log_event);
    } else if (*split) {
      double r = 0.0;
      if (ratio) {
        r = *ratio;
      } else {
        const auto configs = ts::pipeline::list_files(fs::path(out_root) / "configs", ".json");
        ts::Variant v = ts::Variant::kVanilla;
        if (!configs.empty()) {
          v = ts::variant_from_string(ts::read_json_file(configs.front()).value("variant", "vanilla"));
        }
        r = ts::pipeline::default_split_ratio(v);
      }
      const auto s = ts::pipeline::split(out_root, r, seed, log_event);
      if (!s.warning.empty()) log_event("warning", {{"message", s.warning}});
    } else if (*eval) {
      const json result = metric == "miou" ? ts::pipeline::eval_miou(pred, gt)
                                           : ts::pipeline::eval_map(pred, gt, 0.25);
      std::cout << result.dump(2) << "\n";
    } else if (*stats) {
      std::optional<ts::AssetLibrary> lib;
      if (!stats_catalog.empty()) {
        lib = open_catalog(stats_catalog);
      } else if (fs::exists(catalog_path)) {
        lib = open_catalog(catalog_path);
      }
      std::cout << ts::pipeline::stats(lib ? &*lib : nullptr, out_root).dump(2) << "\n";
    } else if (*serve) {
      const auto lib = open_catalog(catalog_path);
      svc_opt.store = store;
      ts::PlacementService service(lib, svc_opt);
      httplib::Server server;
      ts::register_routes(server, service);
      if (!ui_dir.empty() && !server.set_mount_point("/ui", ui_dir)) {
        log_event("error", {{"message", "ui directory not found: " + ui_dir}});
        return kExitInvalid;
      }
      log_event("listening", {{"host", host}, {"port", port}});
      if (!server.listen(host, port)) {
        log_event("error", {{"message", "cannot bind " + host + ":" + std::to_string(port)}});
        return kExitFailed;
      }
    }
  } catch (const ts::Error& e) {
    log_event("error", {{"kind", e.kind()}, {"message", e.what()}});
    return exit_code_for(e);
  } catch (const std::exception& e) {
    log_event("error", {{"kind", "Internal"}, {"message", e.what()}});
    return kExitFailed;
  }
  return 0;
}

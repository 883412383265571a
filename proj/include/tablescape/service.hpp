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

#ifndef TABLESCAPE_SERVICE_HPP_
#define TABLESCAPE_SERVICE_HPP_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tablescape/bvh.hpp"
#include "tablescape/catalog.hpp"
#include "tablescape/depth_io.hpp"
#include "tablescape/error.hpp"
#include "tablescape/gltf.hpp"
#include "tablescape/placement.hpp"
#include "tablescape/rng.hpp"

// After Eigen: a system header pulled in by httplib defines macros that
// collide with Eigen internals.
#include <httplib.h>

// Placement backend for the browser UI: sessions, placement transactions,
// submissions into a file store, progress reporting.
//
// Store layout:
//   <store>/configs/<variant>/<fnv1a-64 of the file>.json   submitted configs
//   <store>/telemetry.jsonl                                  one line per submit
namespace tablescape {

using nlohmann::json;

struct ServiceOptions {
  std::filesystem::path store = "store";
  std::uint64_t seed = 0;
  Variant default_variant = Variant::kVanilla;
  int bev_max_pixels = 512;  // longest BEV image side
};

struct ServiceResponse {
  int status = 200;
  json body = json::object();
};

struct BevImage {
  BevRect extents;  // pixel (0, 0) is the (x0, y1) corner; rows run toward -y
  int width = 0;
  int height = 0;
  std::string png;
};

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = kDigits[v & 15];
  return s;
}

// Top-down orthographic height map of the table and its placed objects,
// shaded from dark (low) to white (high); empty pixels stay black.
inline BevImage render_bev(const TriMesh& table, const std::vector<TriMesh>& objects,
                           int max_pixels) {
  TriMesh scene = table;
  for (const auto& o : objects) scene.append(o);
  const Aabb box = aabb_of(table);
  BevImage img;
  img.extents = BevRect::of(box);
  const double px = std::max(img.extents.width(), img.extents.depth()) / max_pixels;
  img.width = std::max(1, static_cast<int>(std::ceil(img.extents.width() / px)));
  img.height = std::max(1, static_cast<int>(std::ceil(img.extents.depth() / px)));
  img.extents.x1 = img.extents.x0 + img.width * px;
  img.extents.y0 = img.extents.y1 - img.height * px;
  const Aabb all = aabb_of(scene);
  const double top = all.max.z() + 1.0;
  const double span = std::max(1e-6, all.max.z() - box.min.z());
  const Bvh bvh(scene);
  std::vector<std::uint16_t> pixels(static_cast<std::size_t>(img.width) * img.height, 0);
  for (int v = 0; v < img.height; ++v) {
    for (int u = 0; u < img.width; ++u) {
      const Vec3 origin(img.extents.x0 + (u + 0.5) * px, img.extents.y1 - (v + 0.5) * px, top);
      if (auto hit = bvh.intersect(origin, -Vec3::UnitZ(), 0.0)) {
        const double z = top - hit->t;
        pixels[static_cast<std::size_t>(v) * img.width + u] =
            static_cast<std::uint16_t>(std::lround(40.0 + 215.0 * (z - box.min.z()) / span));
      }
    }
  }
  img.png = detail::encode_gray_png(img.width, img.height, pixels, 8);
  return img;
}

class PlacementService {
 public:
  PlacementService(const AssetLibrary& lib, ServiceOptions options)
      : lib_(lib), options_(std::move(options)) {}

  ServiceResponse create_session(const json& body) {
    const auto& tables = lib_.catalog().tables;
    if (tables.empty()) return error(503, "EmptyCatalog", "catalog has no tables");
    try {
      Variant variant = options_.default_variant;
      if (body.contains("variant")) variant = variant_from_string(body["variant"].get<std::string>());
      const std::uint64_t n = next_session_.fetch_add(1);
      std::string table_id;
      if (body.contains("table_id")) {
        table_id = body["table_id"].get<std::string>();
        lib_.catalog().table(table_id);
      } else {
        Rng rng(derive_seed(options_.seed, n));
        table_id = tables[rng.below(tables.size())].id;
      }
      auto s = std::make_shared<Session>();
      s->id = std::to_string(n + 1);
      s->categories = lib_.candidates(table_id);
      s->config = new_scene(lib_, table_id, variant, derive_seed(options_.seed, n));
      s->started = std::chrono::steady_clock::now();
      {
        std::unique_lock lock(sessions_mutex_);
        sessions_[s->id] = s;
      }
      std::lock_guard lock(s->mutex);
      return {201, state(*s)};
    } catch (const Error& e) {
      return error_from(e);
    } catch (const json::exception& e) {
      return error(400, "BadRequest", e.what());
    }
  }

  ServiceResponse get_session(const std::string& id) {
    auto s = find(id);
    if (!s) return not_found(id);
    std::lock_guard lock(s->mutex);
    return {200, state(*s)};
  }

  ServiceResponse instances(const std::string& id, const std::string& category) {
    auto s = find(id);
    if (!s) return not_found(id);
    std::lock_guard lock(s->mutex);
    if (!std::binary_search(s->categories.begin(), s->categories.end(), category)) {
      return error(400, "IncompatibleCategory",
                   "category '" + category + "' is not offered for this table");
    }
    json list = json::array();
    for (const auto* o : lib_.catalog().objects_of(category)) {
      list.push_back({{"asset_id", o->id},
                      {"category", o->category},
                      {"dims", {o->size.x(), o->size.y(), o->size.z()}},
                      {"mesh", "/assets/" + o->id + "/mesh.gltf"}});
    }
    return {200, {{"category", category}, {"instances", list}}};
  }

  ServiceResponse place(const std::string& id, const json& body) {
    auto s = find(id);
    if (!s) return not_found(id);
    std::lock_guard lock(s->mutex);
    if (s->submitted) return closed(id);
    try {
      PlacementRequest req;
      req.asset_id = body.at("asset_id").get<std::string>();
      req.bev_xy = Vec2(body.at("bev_xy").at(0).get<double>(), body.at("bev_xy").at(1).get<double>());
      req.yaw = body.value("yaw", 0.0);
      req.scale = body.value("scale", 1.0);
      req.pitch = body.value("pitch", 0.0);
      req.roll = body.value("roll", 0.0);
      const Placement p = tablescape::place(s->config, lib_, req);
      return {201, {{"placement_id", p.id}, {"placement", to_json(p)}}};
    } catch (const Error& e) {
      return error_from(e);
    } catch (const json::exception& e) {
      return error(400, "BadRequest", e.what());
    }
  }

  // Fine-tuning: absolute yaw/pitch/roll/scale and a relative (dx, dy) shift.
  // The height is re-calibrated; on any failure the placement is untouched.
  ServiceResponse patch(const std::string& id, int pid, const json& body) {
    auto s = find(id);
    if (!s) return not_found(id);
    std::lock_guard lock(s->mutex);
    if (s->submitted) return closed(id);
    Placement* current = s->config.find(pid);
    if (!current) return error(404, "NotFound", "no placement " + std::to_string(pid));
    try {
      PlacementRequest req;
      req.asset_id = current->asset_id;
      req.bev_xy = current->footprint.center() +
                   Vec2(body.value("dx", 0.0), body.value("dy", 0.0));
      req.yaw = body.value("yaw", current->transform.yaw);
      req.pitch = body.value("pitch", current->transform.pitch);
      req.roll = body.value("roll", current->transform.roll);
      req.scale = body.value("scale", current->transform.scale);
      Placement next =
          resolve_placement(lib_.table_mesh(s->config.table_id), lib_, req, current->id);
      const auto hit =
          check_collision(next, s->config.placements, pack_tolerance(s->config.variant));
      if (!hit.ok()) throw Collision(hit.ids);
      *current = next;
      return {200, {{"placement_id", next.id}, {"placement", to_json(next)}}};
    } catch (const Error& e) {
      return error_from(e);
    } catch (const json::exception& e) {
      return error(400, "BadRequest", e.what());
    }
  }

  ServiceResponse remove(const std::string& id, int pid) {
    auto s = find(id);
    if (!s) return not_found(id);
    std::lock_guard lock(s->mutex);
    if (s->submitted) return closed(id);
    auto& ps = s->config.placements;
    auto it = std::find_if(ps.begin(), ps.end(), [&](const Placement& p) { return p.id == pid; });
    if (it == ps.end()) return error(404, "NotFound", "no placement " + std::to_string(pid));
    ps.erase(it);
    return {200, {{"deleted", pid}}};
  }

  ServiceResponse submit(const std::string& id) {
    auto s = find(id);
    if (!s) return not_found(id);
    std::lock_guard lock(s->mutex);
    if (s->submitted) return closed(id);
    if (s->config.placements.empty()) return error(409, "EmptyScene", "nothing placed yet");
    try {
      const std::string text = to_json(s->config).dump(2) + "\n";
      const std::string config_id = hex64(fnv1a64(text));
      const auto rel = std::filesystem::path("configs") / to_string(s->config.variant) /
                       (config_id + ".json");
      const auto path = options_.store / rel;
      std::filesystem::create_directories(path.parent_path());
      {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write " + path.string());
        out << text;
      }
      const double seconds = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - s->started).count();
      {
        std::lock_guard tlock(telemetry_mutex_);
        std::ofstream log(options_.store / "telemetry.jsonl", std::ios::app);
        log << json{{"session_id", s->id},
                    {"config_id", config_id},
                    {"variant", to_string(s->config.variant)},
                    {"placements", s->config.placements.size()},
                    {"seconds", seconds}}
                   .dump()
            << "\n";
      }
      s->submitted = true;
      s->stored = rel.generic_string();
      return {200, {{"config_id", config_id}, {"path", s->stored}}};
    } catch (const Error& e) {
      return error_from(e);
    } catch (const std::filesystem::filesystem_error& e) {
      return error(500, "IoError", e.what());
    }
  }

  // Submitted counts come from the store on disk; open counts from memory.
  ServiceResponse progress() const {
    json variants = json::object();
    for (Variant v : {Variant::kVanilla, Variant::kCrowd, Variant::kWholeRoom}) {
      variants[to_string(v)] = {{"open", 0}, {"submitted", 0}};
    }
    std::size_t total = 0;
    const auto root = options_.store / "configs";
    std::error_code ec;
    if (std::filesystem::is_directory(root, ec)) {
      for (const auto& dir : std::filesystem::directory_iterator(root)) {
        if (!dir.is_directory()) continue;
        std::size_t n = 0;
        for (const auto& f : std::filesystem::directory_iterator(dir.path())) {
          if (f.is_regular_file() && f.path().extension() == ".json") ++n;
        }
        auto& slot = variants[dir.path().filename().string()];
        slot["submitted"] = n;
        if (!slot.contains("open")) slot["open"] = 0;
        total += n;
      }
    }
    std::shared_lock lock(sessions_mutex_);
    for (const auto& [_, s] : sessions_) {
      std::lock_guard slock(s->mutex);
      if (s->submitted) continue;
      auto& slot = variants[to_string(s->config.variant)]["open"];
      slot = slot.get<int>() + 1;
    }
    return {200, {{"variants", variants}, {"submitted_total", total}}};
  }

  std::optional<BevImage> bev(const std::string& id) {
    auto s = find(id);
    if (!s) return std::nullopt;
    std::lock_guard lock(s->mutex);
    std::vector<TriMesh> objects;
    for (const auto& p : s->config.placements) objects.push_back(object_world_mesh(p, lib_));
    return render_bev(lib_.table_mesh(s->config.table_id), objects, options_.bev_max_pixels);
  }

  // glTF of a canonical object asset; converted once, then cached.
  std::optional<std::string> gltf(const std::string& asset_id) {
    std::lock_guard lock(gltf_mutex_);
    if (auto it = gltf_cache_.find(asset_id); it != gltf_cache_.end()) return it->second;
    if (!lib_.catalog().find_object(asset_id)) return std::nullopt;
    std::string doc = mesh_to_gltf(lib_.object_mesh(asset_id)).dump();
    return gltf_cache_.emplace(asset_id, std::move(doc)).first->second;
  }

  const ServiceOptions& options() const { return options_; }

 private:
  struct Session {
    std::string id;
    std::vector<std::string> categories;
    SceneConfig config;
    bool submitted = false;
    std::string stored;
    std::chrono::steady_clock::time_point started;
    mutable std::mutex mutex;
  };

  std::shared_ptr<Session> find(const std::string& id) const {
    std::shared_lock lock(sessions_mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

  json state(const Session& s) const {
    const TableAsset& table = lib_.catalog().table(s.config.table_id);
    const Aabb box = aabb_of(lib_.table_mesh(table.id));
    const BevRect ext = BevRect::of(box);
    return {{"session_id", s.id},
            {"status", s.submitted ? "submitted" : "open"},
            {"variant", to_string(s.config.variant)},
            {"table",
             {{"id", table.id},
              {"category", table.category},
              {"room", table.room},
              {"top_z", box.max.z()},
              {"bev", "/session/" + s.id + "/bev.png"}}},
            {"bev_image_extents", {{"x0", ext.x0}, {"y0", ext.y0}, {"x1", ext.x1}, {"y1", ext.y1}}},
            {"categories", s.categories},
            {"config", to_json(s.config)},
            {"stored", s.stored.empty() ? json(nullptr) : json(s.stored)}};
  }

  static ServiceResponse error(int status, const std::string& kind, const std::string& msg) {
    return {status, {{"error", kind}, {"message", msg}}};
  }
  static ServiceResponse not_found(const std::string& id) {
    return error(404, "NotFound", "no session " + id);
  }
  static ServiceResponse closed(const std::string& id) {
    return error(409, "SessionClosed", "session " + id + " was already submitted");
  }
  static ServiceResponse error_from(const Error& e) {
    const std::string kind = e.kind();
    if (kind == "Collision") {
      ServiceResponse r = error(409, kind, e.what());
      r.body["colliding"] = static_cast<const Collision&>(e).ids();
      return r;
    }
    if (kind == "OffTable") return error(422, kind, e.what());
    if (kind == "IoError") return error(500, kind, e.what());
    if (kind == "UnknownTable") return error(404, kind, e.what());
    return error(400, kind, e.what());
  }

  const AssetLibrary& lib_;
  ServiceOptions options_;
  std::atomic<std::uint64_t> next_session_{0};
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mutex telemetry_mutex_;
  std::mutex gltf_mutex_;
  std::map<std::string, std::string> gltf_cache_;
};

// Cold re-validation of every stored config; maps store paths to issues
// (only failing configs appear).
inline std::map<std::string, std::vector<std::string>> revalidate_store(
    const std::filesystem::path& store, const AssetLibrary& lib) {
  std::map<std::string, std::vector<std::string>> failures;
  const auto root = store / "configs";
  std::error_code ec;
  if (!std::filesystem::is_directory(root, ec)) return failures;
  for (const auto& f : std::filesystem::recursive_directory_iterator(root)) {
    if (!f.is_regular_file() || f.path().extension() != ".json") continue;
    std::vector<std::string> issues;
    try {
      issues = validate_config(scene_config_from_json(read_json_file(f.path())), lib);
    } catch (const std::exception& e) {
      issues.push_back(e.what());
    }
    if (!issues.empty()) failures[f.path().generic_string()] = issues;
  }
  return failures;
}

inline void register_routes(httplib::Server& server, PlacementService& svc) {
  auto reply = [](httplib::Response& res, const ServiceResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  auto parse = [](const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    return json::parse(req.body, nullptr, false);
  };
  auto bad_json = [&](httplib::Response& res) {
    reply(res, {400, {{"error", "BadRequest"}, {"message", "body is not valid JSON"}}});
  };
  auto pid_of = [](const httplib::Request& req) -> std::optional<int> {
    try {
      return std::stoi(req.path_params.at("pid"));
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };

  server.Post("/session", [=, &svc](const httplib::Request& req, httplib::Response& res) {
    const json body = parse(req);
    if (body.is_discarded()) return bad_json(res);
    reply(res, svc.create_session(body));
  });
  server.Get("/session/:id", [=, &svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.get_session(req.path_params.at("id")));
  });
  server.Get("/session/:id/instances",
             [=, &svc](const httplib::Request& req, httplib::Response& res) {
               reply(res, svc.instances(req.path_params.at("id"),
                                        req.get_param_value("category")));
             });
  server.Post("/session/:id/place", [=, &svc](const httplib::Request& req, httplib::Response& res) {
    const json body = parse(req);
    if (body.is_discarded()) return bad_json(res);
    reply(res, svc.place(req.path_params.at("id"), body));
  });
  server.Patch("/session/:id/placement/:pid",
               [=, &svc](const httplib::Request& req, httplib::Response& res) {
                 const json body = parse(req);
                 const auto pid = pid_of(req);
                 if (body.is_discarded() || !pid) return bad_json(res);
                 reply(res, svc.patch(req.path_params.at("id"), *pid, body));
               });
  server.Delete("/session/:id/placement/:pid",
                [=, &svc](const httplib::Request& req, httplib::Response& res) {
                  const auto pid = pid_of(req);
                  if (!pid) return bad_json(res);
                  reply(res, svc.remove(req.path_params.at("id"), *pid));
                });
  server.Post("/session/:id/submit", [=, &svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.submit(req.path_params.at("id")));
  });
  server.Get("/session/:id/bev.png", [=, &svc](const httplib::Request& req, httplib::Response& res) {
    const auto img = svc.bev(req.path_params.at("id"));
    if (!img) return reply(res, {404, {{"error", "NotFound"}, {"message", "no such session"}}});
    const auto& e = img->extents;
    res.set_header("X-Bev-Extents", json{e.x0, e.y0, e.x1, e.y1}.dump());
    res.set_content(img->png, "image/png");
  });
  server.Get("/assets/:asset/mesh.gltf",
             [=, &svc](const httplib::Request& req, httplib::Response& res) {
               const auto doc = svc.gltf(req.path_params.at("asset"));
               if (!doc) return reply(res, {404, {{"error", "UnknownAsset"}, {"message", "no such asset"}}});
               res.set_content(*doc, "model/gltf+json");
             });
  server.Get("/admin/progress", [=, &svc](const httplib::Request&, httplib::Response& res) {
    reply(res, svc.progress());
  });
}

}  // namespace tablescape

#endif  // TABLESCAPE_SERVICE_HPP_

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

// Compares how many tabletop points survive FPS, random, grid and
// score-weighted downsampling of a cloud dominated by furniture points.

#include <cstdio>

#include "tablescape/tablescape.hpp"

using namespace tablescape;

int main() {
  Rng rng(3);
  LabeledCloud cloud;
  for (int i = 0; i < 20000; ++i) {  // a floor patch
    cloud.points.emplace_back(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), 0.0);
    cloud.semantic.push_back(taxonomy::furniture_id("floor"));
    cloud.instance.push_back(-1);
  }
  BBox3D mug;
  mug.center = Vec3(0.2, 0.1, 0.05);
  mug.dims = Vec3(0.08, 0.08, 0.1);
  mug.semantic_id = taxonomy::tabletop_id("mug");
  mug.instance_id = 0;
  for (int i = 0; i < 400; ++i) {
    cloud.points.push_back(mug.center + Vec3(rng.uniform(-0.04, 0.04), rng.uniform(-0.04, 0.04),
                                             rng.uniform(-0.05, 0.05)));
    cloud.semantic.push_back(mug.semantic_id);
    cloud.instance.push_back(0);
  }

  const std::size_t m = 2000;
  const ScoreField scores = soft_gt(cloud.points, std::span(&mug, 1));
  auto report = [&](const char* name, const std::vector<std::size_t>& idx) {
    const auto frac = density_report(cloud, idx);
    std::printf("%-8s kept %5zu points, mug fraction %.3f, floor fraction %.3f\n", name,
                idx.size(), frac.at(mug.semantic_id), frac.at(taxonomy::furniture_id("floor")));
  };
  report("fps", fps(cloud.points, m, 1));
  report("random", random_sample(cloud.points, m, 1));
  report("grid", grid_sample(cloud.points, 0.02));
  report("dynamic", dynamic_sample(scores, m, kDefaultAlpha, 1));
  return 0;
}

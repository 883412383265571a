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

#ifndef TABLESCAPE_TESTS_TEST_UTIL_HPP_
#define TABLESCAPE_TESTS_TEST_UTIL_HPP_

#include <unistd.h>

#include <filesystem>
#include <string>

#include "tablescape/tablescape.hpp"

namespace tablescape::testing {

inline const AssetLibrary& library() {
  static const AssetLibrary lib = synthetic::make_library();
  return lib;
}

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("tablescape_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Quarter-resolution camera and 1 cm voxels keep scene scans fast.
inline ReconstructionParams fast_recon() {
  ReconstructionParams p;
  p.intrinsics = CameraIntrinsics{}.scaled(0.25);
  p.voxel_size = 0.01;
  p.pose_count = 50;
  return p;
}

inline Mat3 yaw_matrix(double yaw) {
  return Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
}

}  // namespace tablescape::testing

#endif  // TABLESCAPE_TESTS_TEST_UTIL_HPP_

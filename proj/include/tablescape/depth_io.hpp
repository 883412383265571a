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

#ifndef TABLESCAPE_DEPTH_IO_HPP_
#define TABLESCAPE_DEPTH_IO_HPP_

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tablescape/catalog.hpp"
#include "tablescape/error.hpp"
#include "tablescape/scansim.hpp"

// Depth frames on disk: 16-bit grayscale PNG in millimeters plus a JSON
// sidecar carrying the world<-camera pose (row-major 4x4) and intrinsics.
namespace tablescape {

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Encodes a grayscale PNG; `bit_depth` is 8 or 16. Samples are given as
// 16-bit values and truncated for 8-bit output.
inline std::string encode_gray_png(int width, int height,
                                   const std::vector<std::uint16_t>& pixels, int bit_depth) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialization failed");
  }
  std::string out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng failed encoding an image");
  }
  png_set_write_fn(
      png, &out,
      [](png_structp p, png_bytep data, png_size_t n) {
        static_cast<std::string*>(png_get_io_ptr(p))->append(reinterpret_cast<char*>(data), n);
      },
      nullptr);
  png_set_IHDR(png, info, width, height, bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const int bytes = bit_depth / 8;
  std::vector<png_byte> row(static_cast<std::size_t>(width) * bytes);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::uint16_t v = pixels[static_cast<std::size_t>(y) * width + x];
      if (bytes == 2) {
        row[2 * x] = static_cast<png_byte>(v >> 8);  // PNG is big-endian
        row[2 * x + 1] = static_cast<png_byte>(v & 0xff);
      } else {
        row[x] = static_cast<png_byte>(v);
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

inline void write_gray_png(const std::filesystem::path& path, int width, int height,
                           const std::vector<std::uint16_t>& pixels, int bit_depth) {
  const std::string bytes = encode_gray_png(width, height, pixels, bit_depth);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

inline std::vector<std::uint16_t> read_gray_png16(const std::filesystem::path& path,
                                                  int& width, int& height) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ParseError("corrupt PNG " + path.string(), 0, 0);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));
  if (png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY ||
      png_get_bit_depth(png, info) != 16) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw UnsupportedFormat("expected a 16-bit grayscale PNG");
  }
  std::vector<std::uint16_t> pixels(static_cast<std::size_t>(width) * height);
  std::vector<png_byte> row(static_cast<std::size_t>(width) * 2);
  for (int y = 0; y < height; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (int x = 0; x < width; ++x) {
      pixels[static_cast<std::size_t>(y) * width + x] =
          static_cast<std::uint16_t>((row[2 * x] << 8) | row[2 * x + 1]);
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return pixels;
}

}  // namespace detail

inline nlohmann::json frame_sidecar(const DepthFrame& frame) {
  nlohmann::json pose = nlohmann::json::array();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      double v = 0.0;
      if (r < 3 && c < 3) v = frame.pose.rotation(r, c);
      else if (r < 3 && c == 3) v = frame.pose.position[r];
      else if (r == 3 && c == 3) v = 1.0;
      pose.push_back(v);
    }
  }
  const auto& k = frame.intrinsics;
  return {{"pose", pose},
          {"intrinsics",
           {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy},
            {"width", k.width}, {"height", k.height}}},
          {"depth_unit", "mm"}};
}

// Writes <stem>.png and <stem>.json.
inline void write_depth_frame(const std::filesystem::path& stem, const DepthFrame& frame) {
  const auto& k = frame.intrinsics;
  std::vector<std::uint16_t> mm(frame.depth.size());
  for (std::size_t i = 0; i < mm.size(); ++i) {
    const double v = std::round(static_cast<double>(frame.depth[i]) * 1000.0);
    mm[i] = static_cast<std::uint16_t>(std::clamp(v, 0.0, 65535.0));
  }
  auto png_path = stem;
  png_path += ".png";
  auto json_path = stem;
  json_path += ".json";
  detail::write_gray_png(png_path, k.width, k.height, mm, 16);
  write_json_file(json_path, frame_sidecar(frame));
}

inline DepthFrame read_depth_frame(const std::filesystem::path& stem) {
  auto png_path = stem;
  png_path += ".png";
  auto json_path = stem;
  json_path += ".json";
  const auto side = read_json_file(json_path);
  DepthFrame frame;
  const auto& ki = side.at("intrinsics");
  frame.intrinsics = {ki.at("fx").get<double>(), ki.at("fy").get<double>(),
                      ki.at("cx").get<double>(), ki.at("cy").get<double>(),
                      ki.at("width").get<int>(), ki.at("height").get<int>()};
  const auto& pose = side.at("pose");
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) frame.pose.rotation(r, c) = pose.at(4 * r + c).get<double>();
    frame.pose.position[r] = pose.at(4 * r + 3).get<double>();
  }
  int w = 0, h = 0;
  const auto mm = detail::read_gray_png16(png_path, w, h);
  if (w != frame.intrinsics.width || h != frame.intrinsics.height) {
    throw ParseError("depth image size does not match sidecar", 0, 0);
  }
  frame.depth.resize(mm.size());
  for (std::size_t i = 0; i < mm.size(); ++i) frame.depth[i] = static_cast<float>(mm[i] / 1000.0);
  return frame;
}

}  // namespace tablescape

#endif  // TABLESCAPE_DEPTH_IO_HPP_

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

#ifndef TABLESCAPE_ERROR_HPP_
#define TABLESCAPE_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tablescape {

// Base of every error thrown by the library. `kind()` is a stable
// machine-readable tag used by the CLI and the HTTP service.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define TABLESCAPE_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(#Name, what) {}     \
  };

TABLESCAPE_DEFINE_ERROR(EmptyGeometry)
TABLESCAPE_DEFINE_ERROR(UnsupportedFormat)
TABLESCAPE_DEFINE_ERROR(UnknownTable)
TABLESCAPE_DEFINE_ERROR(UnknownAsset)
TABLESCAPE_DEFINE_ERROR(OffTable)
TABLESCAPE_DEFINE_ERROR(IncompatibleCategory)
TABLESCAPE_DEFINE_ERROR(PlacementExhausted)
TABLESCAPE_DEFINE_ERROR(EmptyVolume)
TABLESCAPE_DEFINE_ERROR(VariantMismatch)
TABLESCAPE_DEFINE_ERROR(LengthMismatch)
TABLESCAPE_DEFINE_ERROR(BadCount)
TABLESCAPE_DEFINE_ERROR(BadVoxelSize)
TABLESCAPE_DEFINE_ERROR(InvalidArgument)
TABLESCAPE_DEFINE_ERROR(IoError)

#undef TABLESCAPE_DEFINE_ERROR

// Malformed mesh/config input. Carries the 1-based line (text formats) or
// byte offset (binary formats) where parsing stopped.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t offset)
      : Error("ParseError", what + " (line " + std::to_string(line) +
                                ", offset " + std::to_string(offset) + ")"),
        line_(line),
        offset_(offset) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

// A placement overlaps already committed placements.
class Collision : public Error {
 public:
  explicit Collision(std::vector<int> ids)
      : Error("Collision", describe(ids)), ids_(std::move(ids)) {}
  const std::vector<int>& ids() const noexcept { return ids_; }

 private:
  static std::string describe(const std::vector<int>& ids) {
    std::string s = "collides with placement(s)";
    for (int id : ids) s += " " + std::to_string(id);
    return s;
  }
  std::vector<int> ids_;
};

}  // namespace tablescape

#endif  // TABLESCAPE_ERROR_HPP_

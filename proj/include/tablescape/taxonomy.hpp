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

#ifndef TABLESCAPE_TAXONOMY_HPP_
#define TABLESCAPE_TAXONOMY_HPP_

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

// Semantic label spaces. Id 0 is unannotated background; big-furniture
// classes occupy [1, 20]; the 52 tabletop classes start at kTabletopOffset.
namespace tablescape::taxonomy {

inline constexpr int kBackground = 0;
inline constexpr int kTabletopOffset = 32;
// Size of the joint label space (background, furniture, tabletop).
inline constexpr int kNumClasses = kTabletopOffset + 52;

inline constexpr std::array<std::string_view, 20> kFurniture = {
    "wall",    "floor",     "cabinet",      "bed",            "chair",
    "sofa",    "table",     "door",         "window",         "bookshelf",
    "picture", "counter",   "desk",         "curtain",        "refrigerator",
    "shower_curtain", "toilet", "sink",     "bathtub",        "other_furniture"};

inline constexpr std::array<std::string_view, 52> kTabletop = {
    "bag",        "bottle",     "bowl",          "camera",     "can",
    "cap",        "clock",      "keyboard",      "display",    "earphone",
    "jar",        "knife",      "lamp",          "laptop",     "microphone",
    "microwave",  "mug",        "printer",       "remote_control", "phone",
    "alarm",      "book",       "cake",          "calculator", "candle",
    "charger",    "chessboard", "coffee_machine", "comb",      "cutting_board",
    "dishes",     "doll",       "eraser",        "eye_glasses", "file_box",
    "fork",       "fruit",      "globe",         "hat",        "mirror",
    "notebook",   "pencil",     "plant",         "plate",      "radio",
    "ruler",      "saucepan",   "spoon",         "tea_pot",    "toaster",
    "vase",       "vegetables"};

inline constexpr std::array<std::string_view, 5> kTableCategories = {
    "dining_table", "coffee_table", "writing_desk", "kitchen_table",
    "bathroom_counter"};

inline bool is_tabletop(int id) {
  return id >= kTabletopOffset &&
         id < kTabletopOffset + static_cast<int>(kTabletop.size());
}

inline bool is_furniture(int id) {
  return id >= 1 && id <= static_cast<int>(kFurniture.size());
}

inline int furniture_id(std::string_view name) {
  for (std::size_t i = 0; i < kFurniture.size(); ++i) {
    if (kFurniture[i] == name) return static_cast<int>(i) + 1;
  }
  return -1;
}

inline int tabletop_id(std::string_view name) {
  for (std::size_t i = 0; i < kTabletop.size(); ++i) {
    if (kTabletop[i] == name) return kTabletopOffset + static_cast<int>(i);
  }
  return -1;
}

inline std::string class_name(int id) {
  if (id == kBackground) return "background";
  if (is_furniture(id)) return std::string(kFurniture[id - 1]);
  if (is_tabletop(id)) return std::string(kTabletop[id - kTabletopOffset]);
  return "unknown_" + std::to_string(id);
}

// Furniture class used to label a table mesh of the given table category.
inline int table_furniture_id(std::string_view table_category) {
  if (table_category == "writing_desk") return furniture_id("desk");
  if (table_category == "bathroom_counter") return furniture_id("counter");
  return furniture_id("table");
}

// Commonsense table-type -> object-category map. The published examples
// (mugs on coffee tables, pencils on writing desks) are honored; the rest is
// our own grouping and covers all 52 tabletop classes.
inline std::map<std::string, std::vector<std::string>> default_compatibility() {
  return {
      {"dining_table",
       {"bottle", "bowl", "cake", "can", "candle", "dishes", "fork", "fruit",
        "jar", "knife", "mug", "phone", "plate", "saucepan", "spoon",
        "tea_pot", "vase", "vegetables"}},
      {"coffee_table",
       {"alarm", "bag", "book", "bottle", "bowl", "cake", "can", "candle",
        "cap", "chessboard", "clock", "dishes", "doll", "earphone",
        "eye_glasses", "fruit", "hat", "laptop", "mug", "phone", "plant",
        "plate", "remote_control", "tea_pot", "vase"}},
      {"writing_desk",
       {"alarm", "bag", "book", "bottle", "calculator", "camera", "can",
        "charger", "clock", "display", "doll", "earphone", "eraser",
        "eye_glasses", "file_box", "globe", "keyboard", "lamp", "laptop",
        "microphone", "mug", "notebook", "pencil", "phone", "plant",
        "printer", "radio", "ruler"}},
      {"kitchen_table",
       {"bottle", "bowl", "can", "coffee_machine", "cutting_board", "dishes",
        "fork", "fruit", "jar", "knife", "microwave", "mug", "plate",
        "saucepan", "spoon", "tea_pot", "toaster", "vegetables"}},
      {"bathroom_counter",
       {"bottle", "candle", "comb", "cap", "eye_glasses", "jar", "mirror",
        "phone", "plant", "vase"}},
  };
}

}  // namespace tablescape::taxonomy

#endif  // TABLESCAPE_TAXONOMY_HPP_

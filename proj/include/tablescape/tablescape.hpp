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

#ifndef TABLESCAPE_TABLESCAPE_HPP_
#define TABLESCAPE_TABLESCAPE_HPP_

#include "tablescape/annotate.hpp"
#include "tablescape/bvh.hpp"
#include "tablescape/catalog.hpp"
#include "tablescape/depth_io.hpp"
#include "tablescape/error.hpp"
#include "tablescape/fusion.hpp"
#include "tablescape/geometry.hpp"
#include "tablescape/gltf.hpp"
#include "tablescape/mesh_io.hpp"
#include "tablescape/metrics.hpp"
#include "tablescape/placement.hpp"
#include "tablescape/rng.hpp"
#include "tablescape/sampling.hpp"
#include "tablescape/scansim.hpp"
#include "tablescape/shapes.hpp"
#include "tablescape/synthetic.hpp"
#include "tablescape/taxonomy.hpp"

#endif  // TABLESCAPE_TABLESCAPE_HPP_

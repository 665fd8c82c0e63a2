// Copyright 2026 the obmap authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "obmap/cluster.hpp"
#include "obmap/config.hpp"
#include "obmap/core.hpp"
#include "obmap/detection_io.hpp"
#include "obmap/errors.hpp"
#include "obmap/kdtree.hpp"
#include "obmap/map_filter.hpp"
#include "obmap/map_io.hpp"
#include "obmap/obb.hpp"
#include "obmap/occupancy_grid.hpp"
#include "obmap/pcd_io.hpp"
#include "obmap/pipeline.hpp"
#include "obmap/ransac.hpp"
#include "obmap/render.hpp"
#include "obmap/scene.hpp"
#include "obmap/voxel.hpp"

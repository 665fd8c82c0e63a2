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

#include "obmap/core.hpp"
#include "obmap/errors.hpp"
#include "obmap/occupancy_grid.hpp"

namespace obmap {

/// What to do with points that fall outside the grid bounds. Default keeps
/// them: the sensor sees beyond a partial map and dropping such points would
/// hide obstacles.
enum class OutOfBoundsPolicy { keep, drop };

/// Remove every point whose map cell is occupied. Unknown cells are treated
/// like free ones so that observations in unexplored space survive to
/// clustering. The z coordinate is ignored; the map is planar. Output is a
/// subsequence of the input.
inline PointCloud filter_by_map(const PointCloud& cloud, const OccupancyGrid& grid,
                                OutOfBoundsPolicy policy = OutOfBoundsPolicy::keep) {
  if (cloud.frame_id != grid.frame_id()) {
    throw FrameMismatch("filter_by_map: cloud frame '" + cloud.frame_id +
                        "' does not match map frame '" + grid.frame_id() + "'");
  }
  PointCloud out = cloud.empty_like();
  out.reserve(cloud.size());
  for (const Point3& p : cloud) {
    const auto cell = world_to_cell(grid, p.x, p.y);
    if (!cell) {
      if (policy == OutOfBoundsPolicy::keep) out.push_back(p);
      continue;
    }
    if (grid.at(static_cast<std::size_t>(cell->col), static_cast<std::size_t>(cell->row)) !=
        CellState::occupied) {
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace obmap

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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "obmap/core.hpp"
#include "obmap/errors.hpp"

namespace obmap {

enum class CellState : std::uint8_t { free = 0, occupied = 1, unknown = 2 };

/// Pose of the corner of cell (0,0) in the map frame.
struct GridOrigin {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

struct CellIndex {
  std::int64_t col = 0;
  std::int64_t row = 0;
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Planar trinary occupancy raster. Cells are stored row-major with row 0 at
/// the grid's own south edge (smallest y in grid-local coordinates). Grids
/// are immutable in the pipeline sense: map updates return new values.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(std::size_t width, std::size_t height, double resolution, GridOrigin origin,
                CellState fill = CellState::unknown, std::string frame = "map")
      : width_(width),
        height_(height),
        resolution_(resolution),
        origin_(origin),
        frame_id_(std::move(frame)),
        cells_(width * height, fill) {
    if (!(resolution > 0.0)) throw InvalidArgument("OccupancyGrid: resolution must be > 0");
  }

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  double resolution() const { return resolution_; }
  const GridOrigin& origin() const { return origin_; }
  const std::string& frame_id() const { return frame_id_; }
  void set_frame_id(std::string frame) { frame_id_ = std::move(frame); }

  bool empty() const { return cells_.empty(); }
  std::size_t cell_count() const { return cells_.size(); }

  CellState at(std::size_t col, std::size_t row) const { return cells_[row * width_ + col]; }
  void set(std::size_t col, std::size_t row, CellState s) { cells_[row * width_ + col] = s; }
  const std::vector<CellState>& cells() const { return cells_; }

  bool same_geometry(const OccupancyGrid& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           resolution_ == other.resolution_ && origin_.x == other.origin_.x &&
           origin_.y == other.origin_.y && origin_.yaw == other.origin_.yaw;
  }

  friend bool operator==(const OccupancyGrid& a, const OccupancyGrid& b) {
    return a.same_geometry(b) && a.frame_id_ == b.frame_id_ && a.cells_ == b.cells_;
  }

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  double resolution_ = 1.0;
  GridOrigin origin_;
  std::string frame_id_ = "map";
  std::vector<CellState> cells_;
};

/// Map a world coordinate to the cell containing it, floor convention on
/// both axes (a point exactly on a cell boundary belongs to the upper cell).
/// The origin yaw is applied inversely. Returns nullopt outside the grid.
inline std::optional<CellIndex> world_to_cell(const OccupancyGrid& grid, double x, double y) {
  const GridOrigin& o = grid.origin();
  const double dx = x - o.x;
  const double dy = y - o.y;
  const double c = std::cos(o.yaw);
  const double s = std::sin(o.yaw);
  const double gx = c * dx + s * dy;
  const double gy = -s * dx + c * dy;
  const double col_f = std::floor(gx / grid.resolution());
  const double row_f = std::floor(gy / grid.resolution());
  if (col_f < 0.0 || row_f < 0.0 || col_f >= static_cast<double>(grid.width()) ||
      row_f >= static_cast<double>(grid.height())) {
    return std::nullopt;
  }
  return CellIndex{static_cast<std::int64_t>(col_f), static_cast<std::int64_t>(row_f)};
}

/// World coordinates of a cell's center.
inline Vec2 cell_center(const OccupancyGrid& grid, std::int64_t col, std::int64_t row) {
  const GridOrigin& o = grid.origin();
  const double gx = (static_cast<double>(col) + 0.5) * grid.resolution();
  const double gy = (static_cast<double>(row) + 0.5) * grid.resolution();
  const double c = std::cos(o.yaw);
  const double s = std::sin(o.yaw);
  return {o.x + c * gx - s * gy, o.y + s * gx + c * gy};
}

/// Mark as occupied every cell whose center lies inside any detection's
/// footprint rectangle. Footprints reaching past the grid edge are clipped,
/// never an error. Returns a new grid; the input is untouched.
inline OccupancyGrid mark_detections(const OccupancyGrid& grid,
                                     std::span<const Detection> detections) {
  OccupancyGrid out = grid;
  if (grid.empty()) return out;
  for (const Detection& det : detections) {
    // Candidate cell range from the footprint corners mapped into grid coords.
    const GridOrigin& o = grid.origin();
    const double c = std::cos(o.yaw);
    const double s = std::sin(o.yaw);
    double gx_min = 0.0, gx_max = 0.0, gy_min = 0.0, gy_max = 0.0;
    bool first = true;
    for (const Vec2& corner : det.footprint_corners()) {
      const double dx = corner.x - o.x;
      const double dy = corner.y - o.y;
      const double gx = c * dx + s * dy;
      const double gy = -s * dx + c * dy;
      if (first) {
        gx_min = gx_max = gx;
        gy_min = gy_max = gy;
        first = false;
      } else {
        gx_min = std::min(gx_min, gx);
        gx_max = std::max(gx_max, gx);
        gy_min = std::min(gy_min, gy);
        gy_max = std::max(gy_max, gy);
      }
    }
    const double res = grid.resolution();
    const auto lo_col = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(gx_min / res)));
    const auto lo_row = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(gy_min / res)));
    const auto hi_col = std::min<std::int64_t>(static_cast<std::int64_t>(grid.width()) - 1,
                                               static_cast<std::int64_t>(std::floor(gx_max / res)));
    const auto hi_row = std::min<std::int64_t>(static_cast<std::int64_t>(grid.height()) - 1,
                                               static_cast<std::int64_t>(std::floor(gy_max / res)));
    for (std::int64_t row = lo_row; row <= hi_row; ++row) {
      for (std::int64_t col = lo_col; col <= hi_col; ++col) {
        if (det.footprint_contains(cell_center(grid, col, row))) {
          out.set(static_cast<std::size_t>(col), static_cast<std::size_t>(row),
                  CellState::occupied);
        }
      }
    }
  }
  return out;
}

/// Local map of the sensed region only: template geometry, all cells unknown
/// except those containing at least one obstacle point, which become
/// occupied. No free-space carving. Points outside the grid are ignored.
inline OccupancyGrid build_local_map(const OccupancyGrid& tmpl, const PointCloud& obstacle_cloud) {
  if (obstacle_cloud.frame_id != tmpl.frame_id()) {
    throw FrameMismatch("build_local_map: cloud frame '" + obstacle_cloud.frame_id +
                        "' does not match map frame '" + tmpl.frame_id() + "'");
  }
  OccupancyGrid out(tmpl.width(), tmpl.height(), tmpl.resolution(), tmpl.origin(),
                    CellState::unknown, tmpl.frame_id());
  for (const Point3& p : obstacle_cloud) {
    if (const auto cell = world_to_cell(out, p.x, p.y)) {
      out.set(static_cast<std::size_t>(cell->col), static_cast<std::size_t>(cell->row),
              CellState::occupied);
    }
  }
  return out;
}

/// Discard all runtime markings by returning the baseline map. The two grids
/// must share geometry.
inline OccupancyGrid reset_map(const OccupancyGrid& grid, const OccupancyGrid& baseline) {
  if (!grid.same_geometry(baseline)) {
    throw GeometryMismatch("reset_map: grid and baseline geometry differ");
  }
  return baseline;
}

}  // namespace obmap

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
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "obmap/core.hpp"
#include "obmap/errors.hpp"
#include "obmap/occupancy_grid.hpp"

namespace obmap {

struct RenderOptions {
  std::size_t scale = 4;            ///< pixels per map cell when a grid is present
  std::size_t canvas_size = 400;    ///< square canvas when no grid is present
  double world_half_extent = 10.0;  ///< half window size around the origin when no grid
};

namespace detail {

struct Rgb {
  std::uint8_t r, g, b;
};

inline constexpr Rgb kFreeColor{255, 255, 255};
inline constexpr Rgb kUnknownColor{205, 205, 205};
inline constexpr Rgb kOccupiedColor{54, 54, 54};
inline constexpr Rgb kPointColor{31, 119, 180};
inline constexpr Rgb kBoxColor{214, 39, 40};

class Raster {
 public:
  Raster(std::size_t width, std::size_t height, Rgb fill)
      : width_(width), height_(height), data_(width * height * 3) {
    for (std::size_t i = 0; i < width * height; ++i) put_index(i, fill);
  }

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }

  void put(std::int64_t x, std::int64_t y, Rgb color) {
    if (x < 0 || y < 0 || x >= static_cast<std::int64_t>(width_) ||
        y >= static_cast<std::int64_t>(height_)) {
      return;
    }
    put_index(static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x), color);
  }

  /// DDA line, clipped per pixel; step count bounded for far-out endpoints.
  void line(std::int64_t x0, std::int64_t y0, std::int64_t x1, std::int64_t y1, Rgb color) {
    const std::int64_t steps =
        std::min<std::int64_t>(std::max(std::abs(x1 - x0), std::abs(y1 - y0)), 1 << 20);
    if (steps == 0) {
      put(x0, y0, color);
      return;
    }
    for (std::int64_t i = 0; i <= steps; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(steps);
      put(x0 + static_cast<std::int64_t>(std::llround(t * static_cast<double>(x1 - x0))),
          y0 + static_cast<std::int64_t>(std::llround(t * static_cast<double>(y1 - y0))), color);
    }
  }

  std::vector<std::uint8_t> to_ppm() const {
    const std::string header =
        "P6\n" + std::to_string(width_) + " " + std::to_string(height_) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), data_.begin(), data_.end());
    return out;
  }

 private:
  void put_index(std::size_t pixel, Rgb color) {
    data_[pixel * 3] = color.r;
    data_[pixel * 3 + 1] = color.g;
    data_[pixel * 3 + 2] = color.b;
  }

  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> data_;
};

}  // namespace detail

/// Render a deterministic top-down view: map cells as background shades,
/// cloud points as dots, detection footprints as outlines. Identical inputs
/// produce byte-identical PPM output.
inline std::vector<std::uint8_t> render_topdown(const PointCloud& cloud,
                                                std::span<const Detection> detections,
                                                const OccupancyGrid& grid,
                                                const RenderOptions& options = {}) {
  const bool has_grid = !grid.empty();
  const std::size_t width = has_grid ? grid.width() * options.scale : options.canvas_size;
  const std::size_t height = has_grid ? grid.height() * options.scale : options.canvas_size;
  detail::Raster raster(std::max<std::size_t>(width, 1), std::max<std::size_t>(height, 1),
                        detail::kUnknownColor);

  // World position to pixel, y flipped so larger y is higher in the image.
  const auto to_pixel = [&](double x, double y) {
    double px, py;
    if (has_grid) {
      const GridOrigin& o = grid.origin();
      const double dx = x - o.x;
      const double dy = y - o.y;
      const double c = std::cos(o.yaw);
      const double s = std::sin(o.yaw);
      const double gx = (c * dx + s * dy) / grid.resolution();
      const double gy = (-s * dx + c * dy) / grid.resolution();
      px = gx * static_cast<double>(options.scale);
      py = gy * static_cast<double>(options.scale);
    } else {
      const double h = options.world_half_extent;
      px = (x + h) / (2.0 * h) * static_cast<double>(raster.width());
      py = (y + h) / (2.0 * h) * static_cast<double>(raster.height());
    }
    return std::pair<std::int64_t, std::int64_t>(
        static_cast<std::int64_t>(std::floor(px)),
        static_cast<std::int64_t>(raster.height()) - 1 - static_cast<std::int64_t>(std::floor(py)));
  };

  if (has_grid) {
    for (std::size_t row = 0; row < grid.height(); ++row) {
      for (std::size_t col = 0; col < grid.width(); ++col) {
        detail::Rgb color = detail::kUnknownColor;
        switch (grid.at(col, row)) {
          case CellState::free: color = detail::kFreeColor; break;
          case CellState::occupied: color = detail::kOccupiedColor; break;
          case CellState::unknown: color = detail::kUnknownColor; break;
        }
        for (std::size_t dy = 0; dy < options.scale; ++dy) {
          for (std::size_t dx = 0; dx < options.scale; ++dx) {
            raster.put(static_cast<std::int64_t>(col * options.scale + dx),
                       static_cast<std::int64_t>((grid.height() - 1 - row) * options.scale + dy),
                       color);
          }
        }
      }
    }
  }

  for (const Point3& p : cloud) {
    const auto [px, py] = to_pixel(p.x, p.y);
    raster.put(px, py, detail::kPointColor);
    raster.put(px + 1, py, detail::kPointColor);
    raster.put(px, py + 1, detail::kPointColor);
    raster.put(px + 1, py + 1, detail::kPointColor);
  }

  for (const Detection& det : detections) {
    const auto corners = det.footprint_corners();
    std::array<std::pair<std::int64_t, std::int64_t>, 4> px;
    for (std::size_t i = 0; i < 4; ++i) px[i] = to_pixel(corners[i].x, corners[i].y);
    for (std::size_t i = 0; i < 4; ++i) {
      const auto& a = px[i];
      const auto& b = px[(i + 1) % 4];
      raster.line(a.first, a.second, b.first, b.second, detail::kBoxColor);
    }
  }
  return raster.to_ppm();
}

inline void render_topdown_file(const PointCloud& cloud, std::span<const Detection> detections,
                                const OccupancyGrid& grid, const std::filesystem::path& path,
                                const RenderOptions& options = {}) {
  const std::vector<std::uint8_t> bytes = render_topdown(cloud, detections, grid, options);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UnwritablePath("cannot write image: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw UnwritablePath("short write to image: " + path.string());
}

}  // namespace obmap

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
#include <unordered_map>
#include <vector>

#include "obmap/core.hpp"
#include "obmap/errors.hpp"

namespace obmap {

enum class VoxelRepresentative { centroid, cell_center };

struct VoxelParams {
  double leaf_size = 0.05;                ///< cubic cell edge, meters
  std::size_t min_points_per_voxel = 1;   ///< cells below this count emit nothing
  VoxelRepresentative representative = VoxelRepresentative::centroid;
};

namespace detail {

struct VoxelKey {
  std::int64_t ix = 0;
  std::int64_t iy = 0;
  std::int64_t iz = 0;
  friend bool operator==(const VoxelKey&, const VoxelKey&) = default;
  friend bool operator<(const VoxelKey& a, const VoxelKey& b) {
    if (a.ix != b.ix) return a.ix < b.ix;
    if (a.iy != b.iy) return a.iy < b.iy;
    return a.iz < b.iz;
  }
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    auto mix = [](std::uint64_t v) {
      v += 0x9e3779b97f4a7c15ULL;
      v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
      v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
      return v ^ (v >> 31);
    };
    std::uint64_t h = mix(static_cast<std::uint64_t>(k.ix));
    h = mix(h ^ static_cast<std::uint64_t>(k.iy));
    h = mix(h ^ static_cast<std::uint64_t>(k.iz));
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

/// Per-axis cell index of a coordinate for a grid anchored at the world origin.
inline std::int64_t voxel_index(double coord, double leaf_size) {
  return static_cast<std::int64_t>(std::floor(coord / leaf_size));
}

/// Reduce a cloud to one representative point per occupied cubic cell.
///
/// Cells are anchored at the world origin (index = floor(coord / leaf) per
/// axis), which makes the reduction translation-consistent with map cells and
/// idempotent for min_points_per_voxel == 1. Cells holding fewer than
/// min_points_per_voxel points emit nothing, which doubles as sparse-outlier
/// suppression. Output is ordered by (ix, iy, iz) lexicographic.
inline PointCloud voxel_downsample(const PointCloud& cloud, const VoxelParams& params) {
  if (!(params.leaf_size > 0.0)) throw InvalidArgument("voxel_downsample: leaf_size must be > 0");
  if (params.min_points_per_voxel < 1) {
    throw InvalidArgument("voxel_downsample: min_points_per_voxel must be >= 1");
  }

  struct Acc {
    double sx = 0.0, sy = 0.0, sz = 0.0;
    std::size_t count = 0;
  };
  std::unordered_map<detail::VoxelKey, Acc, detail::VoxelKeyHash> cells;
  cells.reserve(cloud.size());
  for (const Point3& p : cloud) {
    const detail::VoxelKey key{voxel_index(p.x, params.leaf_size),
                               voxel_index(p.y, params.leaf_size),
                               voxel_index(p.z, params.leaf_size)};
    Acc& acc = cells[key];
    acc.sx += p.x;
    acc.sy += p.y;
    acc.sz += p.z;
    acc.count += 1;
  }

  std::vector<std::pair<detail::VoxelKey, Acc>> kept;
  kept.reserve(cells.size());
  for (const auto& [key, acc] : cells) {
    if (acc.count >= params.min_points_per_voxel) kept.emplace_back(key, acc);
  }
  std::sort(kept.begin(), kept.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  PointCloud out = cloud.empty_like();
  out.reserve(kept.size());
  for (const auto& [key, acc] : kept) {
    if (params.representative == VoxelRepresentative::centroid) {
      const double inv = 1.0 / static_cast<double>(acc.count);
      out.push_back({acc.sx * inv, acc.sy * inv, acc.sz * inv});
    } else {
      out.push_back({(static_cast<double>(key.ix) + 0.5) * params.leaf_size,
                     (static_cast<double>(key.iy) + 0.5) * params.leaf_size,
                     (static_cast<double>(key.iz) + 0.5) * params.leaf_size});
    }
  }
  return out;
}

}  // namespace obmap

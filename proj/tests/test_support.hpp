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

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "obmap/core.hpp"
#include "obmap/occupancy_grid.hpp"

namespace obmap::test {

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline PointCloud random_cloud(std::mt19937_64& rng, std::size_t n, double lo, double hi,
                               std::string frame = "lidar", std::uint64_t stamp = 0) {
  PointCloud cloud(std::move(frame), stamp);
  cloud.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    cloud.push_back({uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)});
  }
  return cloud;
}

inline Quaternion random_rotation(std::mt19937_64& rng) {
  // Uniformly random unit quaternion (Shoemake).
  const double u1 = uniform(rng, 0.0, 1.0);
  const double u2 = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double u3 = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  return Quaternion{a * std::sin(u2), a * std::cos(u2), b * std::sin(u3), b * std::cos(u3)}
      .normalized();
}

inline RigidTransform random_transform(std::mt19937_64& rng, std::string parent,
                                       std::string child) {
  return RigidTransform(random_rotation(rng),
                        {uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0)},
                        std::move(parent), std::move(child));
}

inline OccupancyGrid random_grid(std::mt19937_64& rng, std::size_t width, std::size_t height,
                                 double resolution, GridOrigin origin = {}) {
  OccupancyGrid grid(width, height, resolution, origin, CellState::unknown, "map");
  std::uniform_int_distribution<int> state(0, 2);
  for (std::size_t row = 0; row < height; ++row) {
    for (std::size_t col = 0; col < width; ++col) {
      grid.set(col, row, static_cast<CellState>(state(rng)));
    }
  }
  return grid;
}

/// Brute-force union-find partition over the O(n^2) distance graph; the
/// independent oracle for euclidean_cluster.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

inline std::vector<std::vector<std::size_t>> brute_force_components(const PointCloud& cloud,
                                                                    double tolerance) {
  const std::size_t n = cloud.size();
  UnionFind uf(n);
  const double tol2 = tolerance * tolerance;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (squared_norm(cloud[i] - cloud[j]) <= tol2) uf.unite(i, j);
    }
  }
  std::vector<std::vector<std::size_t>> by_root(n);
  for (std::size_t i = 0; i < n; ++i) by_root[uf.find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> components;
  for (auto& members : by_root) {
    if (!members.empty()) components.push_back(std::move(members));
  }
  std::sort(components.begin(), components.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return components;
}

inline std::vector<std::size_t> linear_scan_radius(const PointCloud& cloud, const Point3& query,
                                                   double radius) {
  std::vector<std::size_t> out;
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (squared_norm(cloud[i] - query) <= r2) out.push_back(i);
  }
  return out;
}

}  // namespace obmap::test

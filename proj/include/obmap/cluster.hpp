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
#include <vector>

#include "obmap/core.hpp"
#include "obmap/errors.hpp"
#include "obmap/kdtree.hpp"

namespace obmap {

struct ClusterParams {
  double tolerance = 0.3;               ///< neighbor linkage distance, meters
  std::size_t min_cluster_size = 10;
  std::size_t max_cluster_size = 25000;
};

/// Group points into the connected components of the graph whose edges join
/// pairs within `tolerance`. Components smaller than min_cluster_size or
/// larger than max_cluster_size are discarded after extraction. Each cluster
/// is an ascending index sequence; clusters are ordered by smallest member.
inline std::vector<std::vector<std::size_t>> euclidean_cluster(const PointCloud& cloud,
                                                               const ClusterParams& params) {
  if (!(params.tolerance > 0.0)) throw InvalidArgument("euclidean_cluster: tolerance must be > 0");
  if (params.min_cluster_size < 1 || params.min_cluster_size > params.max_cluster_size) {
    throw InvalidArgument("euclidean_cluster: need 1 <= min_cluster_size <= max_cluster_size");
  }

  const std::size_t n = cloud.size();
  std::vector<std::vector<std::size_t>> clusters;
  if (n == 0) return clusters;

  const KdTree tree(cloud);
  std::vector<bool> visited(n, false);
  std::vector<std::size_t> frontier;
  std::vector<std::size_t> neighbors;
  neighbors.reserve(64);

  for (std::size_t seed = 0; seed < n; ++seed) {
    if (visited[seed]) continue;
    visited[seed] = true;
    std::vector<std::size_t> members{seed};
    frontier.assign(1, seed);
    while (!frontier.empty()) {
      const std::size_t current = frontier.back();
      frontier.pop_back();
      neighbors.clear();
      tree.radius_search_append(cloud[current], params.tolerance, neighbors);
      for (const std::size_t neighbor : neighbors) {
        if (!visited[neighbor]) {
          visited[neighbor] = true;
          members.push_back(neighbor);
          frontier.push_back(neighbor);
        }
      }
    }
    if (members.size() < params.min_cluster_size || members.size() > params.max_cluster_size) {
      continue;
    }
    std::sort(members.begin(), members.end());
    clusters.push_back(std::move(members));
  }
  return clusters;
}

}  // namespace obmap

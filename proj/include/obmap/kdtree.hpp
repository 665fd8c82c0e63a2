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
#include <cstdint>
#include <numeric>
#include <vector>

#include "obmap/core.hpp"
#include "obmap/errors.hpp"

namespace obmap {

/// Immutable balanced 3-d tree over the indices of a source cloud.
///
/// Each node splits on the axis of largest extent of its subset (ties broken
/// x, y, z) at the median, with equal coordinates ordered by original index.
/// Radius queries are exact: they return precisely the brute-force result
/// set, never an approximation. Safe for concurrent queries after build.
class KdTree {
 public:
  KdTree() = default;

  explicit KdTree(const PointCloud& cloud) : pts_(cloud.points()) {
    const std::size_t n = pts_.size();
    if (n == 0) return;
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    nodes_.reserve(n);
    root_ = build(order, 0, n);
  }

  std::size_t size() const { return pts_.size(); }
  bool empty() const { return pts_.empty(); }

  /// Indices i with |p_i - query| <= radius, ascending. The query's own index
  /// is included when it satisfies the predicate. radius must be >= 0.
  std::vector<std::size_t> radius_search(const Point3& query, double radius) const {
    std::vector<std::size_t> result;
    radius_search_append(query, radius, result);
    std::sort(result.begin(), result.end());
    return result;
  }

  /// Append the same result set unsorted into a caller-owned buffer; the
  /// allocation-free variant for hot loops.
  void radius_search_append(const Point3& query, double radius,
                            std::vector<std::size_t>& out) const {
    if (radius < 0.0) throw InvalidArgument("radius_search: radius must be >= 0");
    if (root_ >= 0) search(root_, query, radius * radius, radius, out);
  }

 private:
  struct Node {
    std::uint32_t point = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint8_t axis = 0;
  };

  static double coord(const Point3& p, std::uint8_t axis) {
    return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
  }

  std::int32_t build(std::vector<std::uint32_t>& order, std::size_t lo, std::size_t hi) {
    if (lo >= hi) return -1;
    Point3 min = pts_[order[lo]];
    Point3 max = min;
    for (std::size_t i = lo + 1; i < hi; ++i) {
      const Point3& p = pts_[order[i]];
      min = {std::min(min.x, p.x), std::min(min.y, p.y), std::min(min.z, p.z)};
      max = {std::max(max.x, p.x), std::max(max.y, p.y), std::max(max.z, p.z)};
    }
    const double ex = max.x - min.x;
    const double ey = max.y - min.y;
    const double ez = max.z - min.z;
    std::uint8_t axis = 0;
    if (ey > ex || ez > ex) axis = (ey >= ez) ? 1 : 2;

    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(order.begin() + static_cast<std::ptrdiff_t>(lo),
                     order.begin() + static_cast<std::ptrdiff_t>(mid),
                     order.begin() + static_cast<std::ptrdiff_t>(hi),
                     [this, axis](std::uint32_t a, std::uint32_t b) {
                       const double ca = coord(pts_[a], axis);
                       const double cb = coord(pts_[b], axis);
                       return ca < cb || (ca == cb && a < b);
                     });

    const auto node_index = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{order[mid], -1, -1, axis});
    const std::int32_t left = build(order, lo, mid);
    const std::int32_t right = build(order, mid + 1, hi);
    nodes_[static_cast<std::size_t>(node_index)].left = left;
    nodes_[static_cast<std::size_t>(node_index)].right = right;
    return node_index;
  }

  void search(std::int32_t node_index, const Point3& query, double r2, double r,
              std::vector<std::size_t>& out) const {
    const Node& node = nodes_[static_cast<std::size_t>(node_index)];
    const Point3& p = pts_[node.point];
    if (squared_norm(p - query) <= r2) out.push_back(node.point);
    const double delta = coord(query, node.axis) - coord(p, node.axis);
    if (node.left >= 0 && delta <= r) search(node.left, query, r2, r, out);
    if (node.right >= 0 && delta >= -r) search(node.right, query, r2, r, out);
  }

  std::vector<Point3> pts_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

inline KdTree build_kdtree(const PointCloud& cloud) { return KdTree(cloud); }

}  // namespace obmap

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
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "obmap/core.hpp"
#include "obmap/errors.hpp"

namespace obmap {

struct ObbParams {
  double angle_step = 0.5 * std::numbers::pi / 180.0;  ///< rotation search step, radians, (0, pi/4]
  /// When true, box height and center z come from the members' z range.
  /// When false the box is a flat footprint (height floored, z = 0).
  bool z_from_cluster = true;
};

/// Minimal rectangle extents never collapse below this, so detections always
/// have strictly positive extents even for collinear or single-point input.
inline constexpr double kMinRectExtent = 1e-6;

/// A fitted floor-plane rectangle. Same footprint convention as Detection:
/// `length` spans (cos yaw, sin yaw), yaw in [0, pi/2).
struct RectFit {
  double yaw = 0.0;
  double length = kMinRectExtent;
  double width = kMinRectExtent;
  double area = kMinRectExtent * kMinRectExtent;
  Vec2 center;
};

namespace detail {

/// Reduce an axis direction to [0, pi/2), swapping the extents when the
/// reduction moves the length axis onto the width axis.
inline void canonicalize_rect_axes(double& yaw, double& length, double& width) {
  constexpr double half_pi = std::numbers::pi / 2.0;
  double a = std::fmod(yaw, std::numbers::pi);
  if (a < 0.0) a += std::numbers::pi;
  if (a >= half_pi) {
    a -= half_pi;
    std::swap(length, width);
  }
  if (a >= half_pi) a = 0.0;
  yaw = a;
}

}  // namespace detail

/// Strict convex hull (collinear boundary points excluded), counter-clockwise,
/// by the monotone chain method. Duplicates and single points collapse
/// naturally; the result may have fewer than 3 vertices for degenerate input.
inline std::vector<Vec2> convex_hull(std::span<const Vec2> points) {
  std::vector<Vec2> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), [](const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  sorted.erase(std::unique(sorted.begin(), sorted.end(),
                           [](const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }),
               sorted.end());
  const std::size_t n = sorted.size();
  if (n <= 2) return sorted;

  std::vector<Vec2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower hull
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], sorted[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = sorted[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {  // upper hull
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], sorted[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = sorted[i];
  }
  hull.resize(k - 1);  // last point repeats the first
  return hull;
}

/// Exact minimal-area enclosing rectangle: the optimum shares a side with a
/// convex-hull edge, so sweeping the hull edges and taking the tightest
/// edge-aligned box is exact. Degenerate inputs (single point, collinear)
/// yield rectangles with extents floored at kMinRectExtent.
inline RectFit min_area_rect_calipers(std::span<const Vec2> points) {
  if (points.empty()) throw InvalidArgument("min_area_rect_calipers: need at least 1 point");
  const std::vector<Vec2> hull = convex_hull(points);

  RectFit fit;
  if (hull.size() == 1) {
    fit.center = hull[0];
    return fit;
  }
  if (hull.size() == 2) {
    const Vec2 d = hull[1] - hull[0];
    fit.yaw = std::atan2(d.y, d.x);
    fit.length = std::max(norm(d), kMinRectExtent);
    fit.width = kMinRectExtent;
    detail::canonicalize_rect_axes(fit.yaw, fit.length, fit.width);
    fit.area = fit.length * fit.width;
    fit.center = 0.5 * (hull[0] + hull[1]);
    return fit;
  }

  double best_area = std::numeric_limits<double>::infinity();
  double best_theta = 0.0;
  double best_du = 0.0, best_dv = 0.0;
  Vec2 best_mid;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2 edge = hull[(i + 1) % hull.size()] - hull[i];
    const double theta = std::atan2(edge.y, edge.x);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    double umin = std::numeric_limits<double>::infinity(), umax = -umin;
    double vmin = umin, vmax = -umin;
    for (const Vec2& p : hull) {
      const double u = c * p.x + s * p.y;
      const double v = -s * p.x + c * p.y;
      umin = std::min(umin, u);
      umax = std::max(umax, u);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    const double area = (umax - umin) * (vmax - vmin);
    if (area < best_area) {
      best_area = area;
      best_theta = theta;
      best_du = umax - umin;
      best_dv = vmax - vmin;
      best_mid = {(umin + umax) / 2.0, (vmin + vmax) / 2.0};
    }
  }

  fit.yaw = best_theta;
  fit.length = std::max(best_du, kMinRectExtent);
  fit.width = std::max(best_dv, kMinRectExtent);
  detail::canonicalize_rect_axes(fit.yaw, fit.length, fit.width);
  fit.area = fit.length * fit.width;
  fit.center = rotate(best_mid, best_theta);
  return fit;
}

/// Fit an oriented box to a cluster by rotation search.
///
/// Members are projected to the floor plane. For every angle theta on the
/// grid {0, step, 2*step, ...} below pi/2, the members are rotated by -theta
/// about their centroid and the axis-aligned bounding rectangle area is
/// recorded; the smallest area wins, ties to the smaller angle. Height comes
/// from the members' z range (floored at kMinRectExtent). The grid search
/// overshoots the exact optimum by at most a factor that shrinks with
/// angle_step; min_area_rect_calipers gives the exact reference.
inline Detection fit_obb(const PointCloud& cloud, std::span<const std::size_t> cluster,
                         const ObbParams& params, std::uint32_t cluster_id = 0) {
  if (cluster.empty()) throw EmptyCluster("fit_obb: empty cluster");
  if (!(params.angle_step > 0.0) || params.angle_step > std::numbers::pi / 4.0 + 1e-12) {
    throw InvalidArgument("fit_obb: angle_step must be in (0, pi/4]");
  }

  Vec2 centroid;
  double z_min = std::numeric_limits<double>::infinity(), z_max = -z_min;
  for (const std::size_t idx : cluster) {
    if (idx >= cloud.size()) throw InvalidArgument("fit_obb: cluster index out of range");
    const Point3& p = cloud[idx];
    centroid.x += p.x;
    centroid.y += p.y;
    z_min = std::min(z_min, p.z);
    z_max = std::max(z_max, p.z);
  }
  const double inv = 1.0 / static_cast<double>(cluster.size());
  centroid.x *= inv;
  centroid.y *= inv;

  std::vector<Vec2> local;
  local.reserve(cluster.size());
  for (const std::size_t idx : cluster) {
    local.push_back({cloud[idx].x - centroid.x, cloud[idx].y - centroid.y});
  }

  double best_area = std::numeric_limits<double>::infinity();
  double best_theta = 0.0;
  double best_du = 0.0, best_dv = 0.0;
  Vec2 best_mid;
  constexpr double half_pi = std::numbers::pi / 2.0;
  for (std::size_t k = 0;; ++k) {
    const double theta = static_cast<double>(k) * params.angle_step;  // exact grid multiples
    if (theta >= half_pi) break;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    double umin = std::numeric_limits<double>::infinity(), umax = -umin;
    double vmin = umin, vmax = -umin;
    for (const Vec2& p : local) {
      const double u = c * p.x + s * p.y;   // rotate by -theta
      const double v = -s * p.x + c * p.y;
      umin = std::min(umin, u);
      umax = std::max(umax, u);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    const double area = (umax - umin) * (vmax - vmin);
    if (area < best_area) {
      best_area = area;
      best_theta = theta;
      best_du = umax - umin;
      best_dv = vmax - vmin;
      best_mid = {(umin + umax) / 2.0, (vmin + vmax) / 2.0};
    }
  }

  const Vec2 center_xy = centroid + rotate(best_mid, best_theta);
  const double height =
      params.z_from_cluster ? std::max(z_max - z_min, kMinRectExtent) : kMinRectExtent;
  const double center_z = params.z_from_cluster ? (z_min + z_max) / 2.0 : 0.0;
  return Detection({center_xy.x, center_xy.y, center_z}, std::max(best_du, kMinRectExtent),
                   std::max(best_dv, kMinRectExtent), height, best_theta, cluster.size(),
                   cluster_id);
}

}  // namespace obmap

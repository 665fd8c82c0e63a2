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
#include <numbers>
#include <random>
#include <vector>

#include "obmap/core.hpp"
#include "obmap/errors.hpp"

namespace obmap {

struct RansacParams {
  double distance_threshold = 0.02;   ///< inlier distance tau, meters
  std::size_t max_iterations = 200;
  std::uint64_t seed = 0;
  /// Maximum angle between a candidate plane normal and the vertical axis;
  /// steeper candidates are discarded before scoring.
  double max_normal_tilt = 15.0 * std::numbers::pi / 180.0;
  /// Best model must cover at least this fraction of the cloud or the fit
  /// fails with NoFloorFound. 0 accepts any winner.
  double min_inlier_fraction = 0.0;
};

struct PlaneFit {
  Plane plane;
  std::vector<std::size_t> inliers;  ///< ascending indices within distance_threshold
};

/// Fit the floor plane by random sample consensus.
///
/// Runs exactly max_iterations iterations. Each iteration draws 3 distinct
/// indices from a std::mt19937_64 seeded with params.seed (indices by modulo
/// reduction of the raw 64-bit output), fits the exact plane through them,
/// discards candidates tilted more than max_normal_tilt from vertical, and
/// scores the rest by the number of points within distance_threshold. The
/// highest score wins, ties broken by earliest iteration, so the result is a
/// pure function of (cloud, params). The returned inliers are exactly the
/// points within the threshold of the winning plane.
inline PlaneFit fit_floor_ransac(const PointCloud& cloud, const RansacParams& params) {
  const std::size_t n = cloud.size();
  if (n < 3) throw DegenerateInput("fit_floor_ransac: need at least 3 points");
  if (!(params.distance_threshold > 0.0)) {
    throw InvalidArgument("fit_floor_ransac: distance_threshold must be > 0");
  }
  if (params.max_iterations < 1) {
    throw InvalidArgument("fit_floor_ransac: max_iterations must be >= 1");
  }

  std::mt19937_64 rng(params.seed);
  const auto draw = [&rng, n] { return static_cast<std::size_t>(rng() % n); };

  bool found = false;
  bool saw_plane = false;
  Plane best_plane;
  std::size_t best_score = 0;
  const double tau = params.distance_threshold;

  for (std::size_t iter = 0; iter < params.max_iterations; ++iter) {
    const std::size_t i = draw();
    std::size_t j = draw();
    while (j == i) j = draw();
    std::size_t k = draw();
    while (k == i || k == j) k = draw();

    const Point3 normal = cross(cloud[j] - cloud[i], cloud[k] - cloud[i]);
    if (norm(normal) < 1e-12) continue;  // collinear sample
    saw_plane = true;
    const Plane candidate = Plane::make(normal, -dot(normal, cloud[i]));
    if (candidate.tilt() > params.max_normal_tilt) continue;

    std::size_t score = 0;
    for (const Point3& p : cloud) {
      if (candidate.distance(p) <= tau) ++score;
    }
    if (!found || score > best_score) {
      found = true;
      best_score = score;
      best_plane = candidate;
    }
  }

  if (!saw_plane) {
    throw DegenerateInput("fit_floor_ransac: every sampled triple was collinear");
  }
  if (!found) {
    throw NoFloorFound("fit_floor_ransac: no candidate satisfied the normal tilt gate");
  }
  if (static_cast<double>(best_score) < params.min_inlier_fraction * static_cast<double>(n)) {
    throw NoFloorFound("fit_floor_ransac: best inlier fraction below minimum");
  }

  PlaneFit fit;
  fit.plane = best_plane;
  fit.inliers.reserve(best_score);
  for (std::size_t idx = 0; idx < n; ++idx) {
    if (best_plane.distance(cloud[idx]) <= tau) fit.inliers.push_back(idx);
  }
  return fit;
}

/// Keep only points strictly farther than tau from the plane, order preserved.
inline PointCloud remove_floor(const PointCloud& cloud, const Plane& plane, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("remove_floor: tau must be > 0");
  PointCloud out = cloud.empty_like();
  out.reserve(cloud.size());
  for (const Point3& p : cloud) {
    if (plane.distance(p) > tau) out.push_back(p);
  }
  return out;
}

}  // namespace obmap

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

#include <algorithm>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "obmap/cluster.hpp"
#include "obmap/kdtree.hpp"
#include "obmap/obb.hpp"
#include "test_support.hpp"

using namespace obmap;

TEST(KdTree, EmptyTreeAnswersEmpty) {
  const KdTree tree((PointCloud("lidar", 0)));
  EXPECT_TRUE(tree.empty());
  EXPECT_TRUE(tree.radius_search({0, 0, 0}, 100.0).empty());
}

TEST(KdTree, SinglePointTree) {
  PointCloud cloud("lidar", 0);
  cloud.push_back({1.0, 2.0, 3.0});
  const KdTree tree(cloud);
  EXPECT_EQ(tree.size(), 1u);
  const auto hit = tree.radius_search({1.0, 2.0, 3.0}, 0.0);
  ASSERT_EQ(hit.size(), 1u);
  EXPECT_EQ(hit[0], 0u);
  EXPECT_TRUE(tree.radius_search({2.0, 2.0, 3.0}, 0.5).empty());
}

TEST(KdTree, ZeroRadiusMatchesExactPoint) {
  auto rng = test::make_rng(201);
  const PointCloud cloud = test::random_cloud(rng, 100, -5.0, 5.0);
  const KdTree tree(cloud);
  const auto hits = tree.radius_search(cloud[37], 0.0);
  ASSERT_FALSE(hits.empty());
  EXPECT_TRUE(std::find(hits.begin(), hits.end(), 37u) != hits.end());
}

TEST(KdTree, RadiusSmallerThanNearestIsEmpty) {
  PointCloud cloud("lidar", 0);
  cloud.push_back({0.0, 0.0, 0.0});
  cloud.push_back({1.0, 0.0, 0.0});
  const KdTree tree(cloud);
  EXPECT_TRUE(tree.radius_search({0.4, 0.3, 0.0}, 0.2).empty());
}

TEST(KdTree, NegativeRadiusRejected) {
  const KdTree tree((PointCloud("lidar", 0)));
  EXPECT_THROW(tree.radius_search({0, 0, 0}, -1.0), InvalidArgument);
}

TEST(KdTree, MatchesLinearScan) {
  auto rng = test::make_rng(202);
  const PointCloud cloud = test::random_cloud(rng, 2000, -10.0, 10.0);
  const KdTree tree(cloud);
  for (int q = 0; q < 100; ++q) {
    const Point3 query{test::uniform(rng, -11.0, 11.0), test::uniform(rng, -11.0, 11.0),
                       test::uniform(rng, -11.0, 11.0)};
    const double radius = test::uniform(rng, 0.0, 4.0);
    EXPECT_EQ(tree.radius_search(query, radius), test::linear_scan_radius(cloud, query, radius));
  }
}

TEST(KdTree, DuplicatePointsAllReturned) {
  PointCloud cloud("lidar", 0);
  for (int i = 0; i < 5; ++i) cloud.push_back({1.0, 1.0, 1.0});
  const KdTree tree(cloud);
  const auto hits = tree.radius_search({1.0, 1.0, 1.0}, 0.0);
  EXPECT_EQ(hits, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(KdTree, WholeCloudQueryReturnsEveryIndexOnce) {
  auto rng = test::make_rng(203);
  const PointCloud cloud = test::random_cloud(rng, 777, -1.0, 1.0);
  const KdTree tree(cloud);
  const auto all = tree.radius_search({0, 0, 0}, 10.0);
  ASSERT_EQ(all.size(), cloud.size());
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
}

TEST(EuclideanCluster, FarApartPointsFormSingletons) {
  PointCloud cloud("map", 0);
  cloud.push_back({0.0, 0.0, 0.0});
  cloud.push_back({10.0, 0.0, 0.0});
  const auto clusters = euclidean_cluster(cloud, {1.0, 1, 100});
  ASSERT_EQ(clusters.size(), 2u);
  EXPECT_EQ(clusters[0], (std::vector<std::size_t>{0}));
  EXPECT_EQ(clusters[1], (std::vector<std::size_t>{1}));
}

TEST(EuclideanCluster, ChainLinksTransitively) {
  PointCloud cloud("map", 0);
  for (int i = 0; i < 30; ++i) cloud.push_back({0.9 * i, 0.0, 0.0});
  const auto clusters = euclidean_cluster(cloud, {1.0, 1, 100});
  ASSERT_EQ(clusters.size(), 1u);
  EXPECT_EQ(clusters[0].size(), 30u);
}

TEST(EuclideanCluster, SizeGatesDiscardComponents) {
  PointCloud cloud("map", 0);
  // A pair and a quad, well separated.
  cloud.push_back({0.0, 0.0, 0.0});
  cloud.push_back({0.1, 0.0, 0.0});
  for (int i = 0; i < 4; ++i) cloud.push_back({5.0 + 0.1 * i, 0.0, 0.0});
  const auto clusters = euclidean_cluster(cloud, {0.5, 3, 100});
  ASSERT_EQ(clusters.size(), 1u);
  EXPECT_EQ(clusters[0].size(), 4u);
  const auto none = euclidean_cluster(cloud, {0.5, 3, 3});
  EXPECT_TRUE(none.empty());
}

TEST(EuclideanCluster, MatchesUnionFindOracle) {
  auto rng = test::make_rng(211);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 50 + static_cast<std::size_t>(rng() % 450);
    const PointCloud cloud = test::random_cloud(rng, n, 0.0, 6.0, "map");
    const double tolerance = test::uniform(rng, 0.2, 1.0);
    const auto clusters = euclidean_cluster(cloud, {tolerance, 1, 100000});
    const auto expected = test::brute_force_components(cloud, tolerance);
    ASSERT_EQ(clusters.size(), expected.size());
    for (std::size_t i = 0; i < clusters.size(); ++i) EXPECT_EQ(clusters[i], expected[i]);
  }
}

TEST(EuclideanCluster, ClustersAreDisjointAndSeparated) {
  auto rng = test::make_rng(212);
  const PointCloud cloud = test::random_cloud(rng, 400, 0.0, 5.0, "map");
  const ClusterParams params{0.4, 1, 100000};
  const auto clusters = euclidean_cluster(cloud, params);
  std::set<std::size_t> seen;
  for (const auto& cluster : clusters) {
    EXPECT_TRUE(std::is_sorted(cluster.begin(), cluster.end()));
    for (const std::size_t idx : cluster) EXPECT_TRUE(seen.insert(idx).second);
  }
  EXPECT_EQ(seen.size(), cloud.size());  // min size 1: everything assigned
  // Merging any two clusters would need an edge longer than tolerance.
  for (std::size_t a = 0; a < clusters.size(); ++a) {
    for (std::size_t b = a + 1; b < clusters.size(); ++b) {
      double closest = 1e9;
      for (const std::size_t i : clusters[a]) {
        for (const std::size_t j : clusters[b]) {
          closest = std::min(closest, norm(cloud[i] - cloud[j]));
        }
      }
      EXPECT_GT(closest, params.tolerance);
    }
  }
}

TEST(MinAreaRect, SinglePointFloorsExtents) {
  const std::vector<Vec2> pts{{2.0, 3.0}};
  const RectFit fit = min_area_rect_calipers(pts);
  EXPECT_DOUBLE_EQ(fit.length, kMinRectExtent);
  EXPECT_DOUBLE_EQ(fit.width, kMinRectExtent);
  EXPECT_DOUBLE_EQ(fit.center.x, 2.0);
  EXPECT_DOUBLE_EQ(fit.center.y, 3.0);
}

TEST(MinAreaRect, CollinearSegment) {
  const std::vector<Vec2> pts{{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}, {3.0, 3.0}};
  const RectFit fit = min_area_rect_calipers(pts);
  EXPECT_NEAR(fit.length, 3.0 * std::numbers::sqrt2, 1e-12);
  EXPECT_DOUBLE_EQ(fit.width, kMinRectExtent);
  EXPECT_NEAR(fit.yaw, std::numbers::pi / 4.0, 1e-12);
  EXPECT_NEAR(fit.center.x, 1.5, 1e-12);
}

TEST(MinAreaRect, UnitSquare) {
  const std::vector<Vec2> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const RectFit fit = min_area_rect_calipers(pts);
  EXPECT_NEAR(fit.area, 1.0, 1e-12);
  EXPECT_NEAR(fit.center.x, 0.5, 1e-12);
  EXPECT_NEAR(fit.center.y, 0.5, 1e-12);
}

TEST(MinAreaRect, RotatedRectangleRecovered) {
  auto rng = test::make_rng(221);
  for (int trial = 0; trial < 50; ++trial) {
    const double yaw = test::uniform(rng, 0.0, std::numbers::pi);
    const double l = test::uniform(rng, 0.5, 4.0);
    const double w = test::uniform(rng, 0.2, l);
    const Vec2 c{test::uniform(rng, -3, 3), test::uniform(rng, -3, 3)};
    std::vector<Vec2> pts;
    // Dense points on the rectangle outline.
    for (int i = 0; i <= 40; ++i) {
      const double t = -0.5 + static_cast<double>(i) / 40.0;
      for (const double side : {-0.5, 0.5}) {
        pts.push_back(c + rotate({t * l, side * w}, yaw));
        pts.push_back(c + rotate({side * l, t * w}, yaw));
      }
    }
    const RectFit fit = min_area_rect_calipers(pts);
    EXPECT_NEAR(fit.area, l * w, 1e-9 * std::max(1.0, l * w));
    EXPECT_NEAR(fit.center.x, c.x, 1e-9);
    EXPECT_NEAR(fit.center.y, c.y, 1e-9);
  }
}

TEST(FitObb, AlignedUnitSquare) {
  PointCloud cloud("map", 0);
  cloud.push_back({0.0, 0.0, 0.0});
  cloud.push_back({1.0, 0.0, 0.0});
  cloud.push_back({1.0, 1.0, 0.2});
  cloud.push_back({0.0, 1.0, 0.2});
  const std::vector<std::size_t> cluster{0, 1, 2, 3};
  const Detection det = fit_obb(cloud, cluster, {});
  EXPECT_DOUBLE_EQ(det.yaw(), 0.0);
  EXPECT_NEAR(det.length(), 1.0, 1e-12);
  EXPECT_NEAR(det.width(), 1.0, 1e-12);
  EXPECT_NEAR(det.height(), 0.2, 1e-12);
  EXPECT_NEAR(det.center().x, 0.5, 1e-12);
  EXPECT_NEAR(det.center().y, 0.5, 1e-12);
  EXPECT_NEAR(det.center().z, 0.1, 1e-12);
  EXPECT_EQ(det.point_count(), 4u);
}

TEST(FitObb, RotatedSquareFindsTheAngle) {
  const double yaw = 30.0 * std::numbers::pi / 180.0;
  PointCloud cloud("map", 0);
  for (const Vec2 corner : {Vec2{0.5, 0.5}, Vec2{-0.5, 0.5}, Vec2{-0.5, -0.5}, Vec2{0.5, -0.5}}) {
    const Vec2 p = rotate(corner, yaw);
    cloud.push_back({p.x, p.y, 0.0});
  }
  const ObbParams params;
  const Detection det = fit_obb(cloud, std::vector<std::size_t>{0, 1, 2, 3}, params);
  EXPECT_NEAR(det.yaw(), yaw, params.angle_step + 1e-12);
  EXPECT_NEAR(det.length() * det.width(), 1.0, 0.01);
}

TEST(FitObb, EmptyClusterRejected) {
  const PointCloud cloud("map", 0);
  EXPECT_THROW(fit_obb(cloud, std::vector<std::size_t>{}, {}), EmptyCluster);
}

TEST(FitObb, DegenerateFlatClusterHasPositiveExtents) {
  PointCloud cloud("map", 0);
  for (int i = 0; i < 10; ++i) cloud.push_back({0.1 * i, 0.0, 0.0});
  std::vector<std::size_t> cluster(10);
  std::iota(cluster.begin(), cluster.end(), std::size_t{0});
  const Detection det = fit_obb(cloud, cluster, {});
  EXPECT_GT(det.length(), 0.0);
  EXPECT_GT(det.width(), 0.0);
  EXPECT_GT(det.height(), 0.0);
}

TEST(FitObb, RectangleContainsAllMembers) {
  auto rng = test::make_rng(222);
  for (int trial = 0; trial < 30; ++trial) {
    const PointCloud cloud = test::random_cloud(rng, 150, -2.0, 2.0, "map");
    std::vector<std::size_t> cluster(cloud.size());
    std::iota(cluster.begin(), cluster.end(), std::size_t{0});
    const Detection det = fit_obb(cloud, cluster, {});
    for (const Point3& p : cloud) {
      EXPECT_TRUE(det.footprint_contains({p.x, p.y}, 1e-9));
    }
  }
}

TEST(FitObb, AreaShrinksWithFinerSteps) {
  auto rng = test::make_rng(223);
  const PointCloud cloud = test::random_cloud(rng, 120, -1.5, 1.5, "map");
  std::vector<std::size_t> cluster(cloud.size());
  std::iota(cluster.begin(), cluster.end(), std::size_t{0});
  double previous = std::numeric_limits<double>::infinity();
  // Halving the step keeps every coarser angle in the grid, so the minimum
  // can only improve.
  for (const double step_deg : {4.0, 2.0, 1.0, 0.5, 0.25}) {
    ObbParams params;
    params.angle_step = step_deg * std::numbers::pi / 180.0;
    const Detection det = fit_obb(cloud, cluster, params);
    const double area = det.length() * det.width();
    EXPECT_LE(area, previous + 1e-12);
    previous = area;
  }
}

TEST(FitObb, CalipersNeverBeatenByGridSearch) {
  auto rng = test::make_rng(224);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(rng() % 200);
    PointCloud cloud("map", 0);
    std::vector<Vec2> pts;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 p{test::uniform(rng, -3, 3), test::uniform(rng, -3, 3)};
      pts.push_back(p);
      cloud.push_back({p.x, p.y, 0.0});
    }
    std::vector<std::size_t> cluster(n);
    std::iota(cluster.begin(), cluster.end(), std::size_t{0});
    const RectFit exact = min_area_rect_calipers(pts);
    for (const double step_deg : {2.0, 0.5}) {
      ObbParams params;
      params.angle_step = step_deg * std::numbers::pi / 180.0;
      const Detection det = fit_obb(cloud, cluster, params);
      EXPECT_LE(exact.area, det.length() * det.width() + 1e-12);
    }
  }
}

TEST(FitObb, GridSearchWithinTwoStepsOfOptimum) {
  auto rng = test::make_rng(225);
  ObbParams params;  // default 0.5 degree step
  for (int trial = 0; trial < 25; ++trial) {
    PointCloud cloud("map", 0);
    std::vector<Vec2> pts;
    const double yaw = test::uniform(rng, 0.0, std::numbers::pi);
    for (int i = 0; i < 200; ++i) {
      const Vec2 local{test::uniform(rng, -1.0, 1.0), test::uniform(rng, -0.4, 0.4)};
      const Vec2 p = rotate(local, yaw);
      pts.push_back(p);
      cloud.push_back({p.x, p.y, 0.0});
    }
    std::vector<std::size_t> cluster(pts.size());
    std::iota(cluster.begin(), cluster.end(), std::size_t{0});
    const Detection det = fit_obb(cloud, cluster, params);
    const RectFit exact = min_area_rect_calipers(pts);
    EXPECT_LE(det.length() * det.width(), (1.0 + 2.0 * params.angle_step) * exact.area);
  }
}

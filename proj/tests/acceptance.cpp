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

// End-to-end acceptance suite. Each test covers one release criterion at its
// stated tolerance and prints a single PASS/FAIL line with the measurement.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include <gtest/gtest.h>

#include "obmap/obmap.hpp"
#include "test_support.hpp"

using namespace obmap;
namespace fs = std::filesystem;

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int criterion, const char* name, bool pass, const std::string& detail) {
  std::printf("[CRITERION %d] %s — %s (%s)\n", criterion, pass ? "PASS" : "FAIL", name,
              detail.c_str());
  std::fflush(stdout);
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("obmap_accept_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> write_frames(const fs::path& dir, const SceneOutput& scene) {
  std::vector<std::string> paths;
  for (std::size_t i = 0; i < scene.frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04zu.pcd", i);
    const fs::path path = dir / name;
    write_pcd_file(path, scene.frames[i]);
    paths.push_back(path.string());
  }
  return paths;
}

/// Random cluster for the box-fit criterion: points sampled inside a rotated
/// rectangle of bounded aspect ratio, or an anisotropic Gaussian blob.
std::vector<Vec2> random_cluster(std::mt19937_64& rng, bool gaussian) {
  const double yaw = test::uniform(rng, 0.0, std::numbers::pi);
  const double length = test::uniform(rng, 0.5, 3.0);
  const double aspect = test::uniform(rng, 1.0, 1.4);
  const double width = length / aspect;
  const Vec2 center{test::uniform(rng, -5.0, 5.0), test::uniform(rng, -5.0, 5.0)};
  std::normal_distribution<double> normal(0.0, 0.25);
  std::vector<Vec2> points;
  points.reserve(400);
  for (int i = 0; i < 400; ++i) {
    Vec2 local;
    if (gaussian) {
      local = {normal(rng) * length, normal(rng) * width};
    } else {
      local = {test::uniform(rng, -0.5, 0.5) * length, test::uniform(rng, -0.5, 0.5) * width};
    }
    points.push_back(center + rotate(local, yaw));
  }
  return points;
}

}  // namespace

// Criterion 1: a 20,000-point frame with floor removal and map filtration on
// finishes with median latency <= 11 ms over 100 repetitions (hard bound
// 100 ms per frame), measured end to end including the frame load.
TEST(Acceptance, Criterion1_Latency) {
  Stopwatch watch;
  const SceneSpec spec = SceneSpec::defaults();  // 20k points, 3 boxes, wall
  const SceneOutput scene = gen_scene(spec);
  const fs::path dir = scratch_dir("latency");
  const auto paths = write_frames(dir, scene);

  PipelineConfig config;
  config.static_transform = scene.sensor_to_map;
  ASSERT_TRUE(config.floor_removal_enabled && config.map_filter_enabled);

  const BenchReport bench_report = bench(config, paths, 100, &scene.map);
  const double median_ms = bench_report.total.median_us / 1000.0;
  const double max_ms = bench_report.total.max_us / 1000.0;
  const double elapsed = watch.seconds();

  EXPECT_TRUE(bench_report.outputs_identical);
  EXPECT_EQ(bench_report.skipped, 0u);
  EXPECT_NEAR(bench_report.mean_points_per_frame, 20000.0, 1.0);
  EXPECT_LE(median_ms, 11.0);
  EXPECT_LE(max_ms, 100.0);
  EXPECT_LT(elapsed, 30.0);

  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "median %.2f ms (budget 11), max %.2f ms (budget 100), bench %.1f s (budget 30)",
                median_ms, max_ms, elapsed);
  report(1, "pipeline latency on 20k-point frame", !HasFailure(), detail);
}

// Criterion 2: euclidean_cluster equals the O(n^2) union-find oracle exactly
// on 100 seeded instances of up to 500 points.
TEST(Acceptance, Criterion2_ClusteringOracleEquivalence) {
  Stopwatch watch;
  std::size_t checked = 0;
  bool all_equal = true;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto rng = test::make_rng(1000 + seed);
    const std::size_t n = 20 + static_cast<std::size_t>(rng() % 481);
    const PointCloud cloud = test::random_cloud(rng, n, 0.0, 6.0, "map");
    const double tolerance = test::uniform(rng, 0.2, 0.9);
    const auto clusters = euclidean_cluster(cloud, {tolerance, 1, 1000000});
    const auto expected = test::brute_force_components(cloud, tolerance);
    if (clusters != expected) all_equal = false;
    EXPECT_EQ(clusters, expected) << "seed " << seed;
    ++checked;
  }
  const double elapsed = watch.seconds();
  EXPECT_LT(elapsed, 10.0);
  char detail[120];
  std::snprintf(detail, sizeof(detail), "%zu instances, partition equality %s, %.1f s (budget 10)",
                checked, all_equal ? "exact" : "BROKEN", elapsed);
  report(2, "clustering equals union-find oracle", !HasFailure(), detail);
}

// Criterion 3: KD-tree radius queries match the linear scan exactly, 100
// queries on a 2,000-point cloud for each of 20 seeds.
TEST(Acceptance, Criterion3_KdTreeExactness) {
  Stopwatch watch;
  std::size_t queries = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto rng = test::make_rng(2000 + seed);
    const PointCloud cloud = test::random_cloud(rng, 2000, -10.0, 10.0);
    const KdTree tree(cloud);
    for (int q = 0; q < 100; ++q) {
      const Point3 query{test::uniform(rng, -11, 11), test::uniform(rng, -11, 11),
                         test::uniform(rng, -11, 11)};
      const double radius = test::uniform(rng, 0.0, 5.0);
      EXPECT_EQ(tree.radius_search(query, radius),
                test::linear_scan_radius(cloud, query, radius))
          << "seed " << seed << " query " << q;
      ++queries;
    }
  }
  const double elapsed = watch.seconds();
  EXPECT_LT(elapsed, 5.0);
  char detail[120];
  std::snprintf(detail, sizeof(detail), "%zu queries across 20 seeds, %.1f s (budget 5)", queries,
                elapsed);
  report(3, "kd-tree radius search equals linear scan", !HasFailure(), detail);
}

// Criterion 4: on the 700-floor/300-clutter scene (noise +/-5 mm, tau 0.02,
// 200 iterations) the fit recovers a normal within 1 degree of vertical with
// >= 99% floor recall, in at least 95 of 100 seeds.
TEST(Acceptance, Criterion4_RansacFloorRecovery) {
  Stopwatch watch;
  int successes = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto rng = test::make_rng(3000 + seed);
    PointCloud cloud("lidar", 0);
    cloud.reserve(1000);
    for (int i = 0; i < 700; ++i) {
      cloud.push_back({test::uniform(rng, -5.0, 5.0), test::uniform(rng, -5.0, 5.0),
                       test::uniform(rng, -0.005, 0.005)});
    }
    for (int i = 0; i < 300; ++i) {
      cloud.push_back({test::uniform(rng, -5.0, 5.0), test::uniform(rng, -5.0, 5.0),
                       test::uniform(rng, 0.2, 2.0)});
    }
    RansacParams params;
    params.distance_threshold = 0.02;
    params.max_iterations = 200;
    params.seed = seed;
    const PlaneFit fit = fit_floor_ransac(cloud, params);
    std::size_t floor_recalled = 0;
    for (const std::size_t idx : fit.inliers) {
      if (idx < 700) ++floor_recalled;
    }
    const bool vertical = fit.plane.tilt() <= 1.0 * std::numbers::pi / 180.0;
    const bool recalled = floor_recalled >= 693;  // 99% of 700
    if (vertical && recalled) ++successes;
  }
  const double elapsed = watch.seconds();
  EXPECT_GE(successes, 95);
  EXPECT_LT(elapsed, 10.0);
  char detail[120];
  std::snprintf(detail, sizeof(detail), "%d/100 seeds recovered (need 95), %.1f s (budget 10)",
                successes, elapsed);
  report(4, "RANSAC floor recovery", !HasFailure(), detail);
}

// Criterion 5: the 0.5-degree rotation search lands within 1% of the exact
// rotating-calipers area on 100 random clusters and always contains every
// projected member (1e-9 slack).
TEST(Acceptance, Criterion5_ObbTightness) {
  Stopwatch watch;
  ObbParams params;  // 0.5 degree default step
  double worst_ratio = 1.0;
  bool all_contained = true;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto rng = test::make_rng(4000 + seed);
    const std::vector<Vec2> points = random_cluster(rng, seed % 2 == 0);
    PointCloud cloud("map", 0);
    for (const Vec2& p : points) cloud.push_back({p.x, p.y, 0.0});
    std::vector<std::size_t> cluster(points.size());
    std::iota(cluster.begin(), cluster.end(), std::size_t{0});

    const Detection det = fit_obb(cloud, cluster, params);
    const RectFit exact = min_area_rect_calipers(points);
    const double ratio = (det.length() * det.width()) / exact.area;
    worst_ratio = std::max(worst_ratio, ratio);
    EXPECT_LE(ratio, 1.01) << "seed " << seed;
    for (const Vec2& p : points) {
      if (!det.footprint_contains(p, 1e-9)) {
        all_contained = false;
        ADD_FAILURE() << "member escaped the footprint, seed " << seed;
      }
    }
  }
  const double elapsed = watch.seconds();
  EXPECT_TRUE(all_contained);
  EXPECT_LT(elapsed, 10.0);
  char detail[140];
  std::snprintf(detail, sizeof(detail),
                "worst area ratio %.5f (budget 1.01), containment %s, %.1f s (budget 10)",
                worst_ratio, all_contained ? "exact" : "BROKEN", elapsed);
  report(5, "rotation-search box within 1% of calipers optimum", !HasFailure(), detail);
}

// Criterion 6: filter_by_map equals the per-point lookup oracle exactly on 20
// random (map, cloud) pairs and never lets a point in an occupied cell through.
TEST(Acceptance, Criterion6_MapFiltration) {
  Stopwatch watch;
  std::size_t survivors_checked = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto rng = test::make_rng(5000 + seed);
    const OccupancyGrid grid = test::random_grid(
        rng, 64 + rng() % 65, 64 + rng() % 65, test::uniform(rng, 0.05, 0.3),
        {test::uniform(rng, -3, 3), test::uniform(rng, -3, 3), test::uniform(rng, -1.5, 1.5)});
    const PointCloud cloud = test::random_cloud(rng, 2000, -5.0, 15.0, "map");
    const PointCloud filtered = filter_by_map(cloud, grid, OutOfBoundsPolicy::keep);

    PointCloud expected("map", 0);
    const GridOrigin& o = grid.origin();
    for (const Point3& p : cloud) {
      const double dx = p.x - o.x;
      const double dy = p.y - o.y;
      const double gx = std::cos(o.yaw) * dx + std::sin(o.yaw) * dy;
      const double gy = -std::sin(o.yaw) * dx + std::cos(o.yaw) * dy;
      const auto col = static_cast<std::int64_t>(std::floor(gx / grid.resolution()));
      const auto row = static_cast<std::int64_t>(std::floor(gy / grid.resolution()));
      const bool inside = col >= 0 && row >= 0 &&
                          col < static_cast<std::int64_t>(grid.width()) &&
                          row < static_cast<std::int64_t>(grid.height());
      if (!inside || grid.at(static_cast<std::size_t>(col), static_cast<std::size_t>(row)) !=
                         CellState::occupied) {
        expected.push_back(p);
      }
    }
    ASSERT_EQ(filtered.size(), expected.size()) << "seed " << seed;
    for (std::size_t i = 0; i < filtered.size(); ++i) {
      EXPECT_EQ(filtered[i], expected[i]);
    }
    for (const Point3& p : filtered) {
      if (const auto cell = world_to_cell(grid, p.x, p.y)) {
        EXPECT_NE(
            grid.at(static_cast<std::size_t>(cell->col), static_cast<std::size_t>(cell->row)),
            CellState::occupied);
        ++survivors_checked;
      }
    }
  }
  const double elapsed = watch.seconds();
  EXPECT_LT(elapsed, 5.0);
  char detail[120];
  std::snprintf(detail, sizeof(detail),
                "20 map/cloud pairs exact, %zu in-bounds survivors audited, %.1f s (budget 5)",
                survivors_checked, elapsed);
  report(6, "map filtration equals lookup oracle", !HasFailure(), detail);
}

// Criterion 7: the default scene (3 boxes + pre-mapped wall) comes back as
// exactly 3 detections, each center within 2x map resolution and each yaw
// within 2x angle_step of truth modulo pi/2.
TEST(Acceptance, Criterion7_EndToEndSceneRecovery) {
  Stopwatch watch;
  const SceneSpec spec = SceneSpec::defaults();
  const SceneOutput scene = gen_scene(spec);
  const fs::path dir = scratch_dir("scene");
  const auto paths = write_frames(dir, scene);

  PipelineConfig config;
  config.static_transform = scene.sensor_to_map;
  const PipelineResult result = run_pipeline(config, paths, &scene.map);

  ASSERT_EQ(result.frames.size(), 1u);
  ASSERT_TRUE(result.frames[0].ok) << result.frames[0].error;
  const auto& detections = result.frames[0].detections;
  EXPECT_EQ(detections.size(), 3u);

  constexpr double half_pi = std::numbers::pi / 2.0;
  double worst_center = 0.0, worst_yaw = 0.0;
  for (const SceneBox& box : scene.truth) {
    double best_center = 1e9, yaw_at_best = 0.0;
    for (const DetectionRecord& rec : detections) {
      const Point3 truth_center{box.cx, box.cy, box.height / 2.0};
      const double d = norm(rec.detection.center() - truth_center);
      if (d < best_center) {
        best_center = d;
        double dyaw = std::fmod(std::abs(rec.detection.yaw() - box.yaw), half_pi);
        dyaw = std::min(dyaw, half_pi - dyaw);
        yaw_at_best = dyaw;
      }
    }
    EXPECT_LE(best_center, 2.0 * scene.map.resolution());
    EXPECT_LE(yaw_at_best, 2.0 * ObbParams{}.angle_step);
    worst_center = std::max(worst_center, best_center);
    worst_yaw = std::max(worst_yaw, yaw_at_best);
  }
  const double elapsed = watch.seconds();
  EXPECT_LT(elapsed, 5.0);
  char detail[180];
  std::snprintf(detail, sizeof(detail),
                "%zu detections (want 3), worst center error %.3f m (budget %.2f), worst yaw "
                "error %.3f rad (budget %.4f), %.1f s (budget 5)",
                detections.size(), worst_center, 2.0 * scene.map.resolution(), worst_yaw,
                2.0 * ObbParams{}.angle_step, elapsed);
  report(7, "end-to-end scene recovery with wall suppression", !HasFailure(), detail);
}

// Criterion 8: persistence round trips, property-tested over 1,000 random
// instances each: PCD binary bit-exact, map trinary states exact, detection
// records lossless.
TEST(Acceptance, Criterion8_IoRoundTrips) {
  Stopwatch watch;
  auto rng = test::make_rng(6000);

  for (int i = 0; i < 1000; ++i) {
    const PointCloud cloud = test::random_cloud(rng, rng() % 64, -200.0, 200.0);
    const PointCloud back = read_pcd(write_pcd(cloud));
    ASSERT_EQ(back.size(), cloud.size());
    for (std::size_t k = 0; k < cloud.size(); ++k) {
      ASSERT_EQ(back[k], cloud[k]) << "pcd instance " << i;
    }
  }

  for (int i = 0; i < 1000; ++i) {
    const OccupancyGrid grid =
        test::random_grid(rng, 1 + rng() % 24, 1 + rng() % 24, test::uniform(rng, 0.01, 1.0),
                          {test::uniform(rng, -10, 10), test::uniform(rng, -10, 10),
                           test::uniform(rng, -3, 3)});
    const SavedMap saved = save_occupancy_map(grid);
    const OccupancyGrid back =
        load_occupancy_map(parse_map_metadata(write_map_metadata(saved.metadata)), saved.image);
    ASSERT_EQ(back.cells(), grid.cells()) << "map instance " << i;
  }

  for (int i = 0; i < 1000; ++i) {
    const DetectionRecord rec{
        1, rng(),
        Detection({test::uniform(rng, -100, 100), test::uniform(rng, -100, 100),
                   test::uniform(rng, -5, 5)},
                  test::uniform(rng, 1e-6, 10.0), test::uniform(rng, 1e-6, 10.0),
                  test::uniform(rng, 1e-6, 4.0), test::uniform(rng, -7, 7),
                  1 + rng() % 100000, static_cast<std::uint32_t>(rng() % 256))};
    const std::vector<DetectionRecord> records{rec};
    const auto back = read_detections(write_detections(records));
    ASSERT_EQ(back.size(), 1u);
    ASSERT_EQ(back[0], rec) << "record instance " << i;
  }

  const double elapsed = watch.seconds();
  EXPECT_LT(elapsed, 10.0);
  char detail[120];
  std::snprintf(detail, sizeof(detail), "3000 round trips exact, %.1f s (budget 10)", elapsed);
  report(8, "persistence round trips", !HasFailure(), detail);
}

// Criterion 9: two runs over identical inputs produce byte-identical
// detection output and final map.
TEST(Acceptance, Criterion9_Determinism) {
  Stopwatch watch;
  SceneSpec spec = SceneSpec::defaults();
  spec.frame_count = 3;
  spec.points_per_frame = 8000;
  const SceneOutput scene = gen_scene(spec);
  const fs::path dir = scratch_dir("determinism");
  const auto paths = write_frames(dir, scene);

  PipelineConfig config;
  config.static_transform = scene.sensor_to_map;

  const PipelineResult a = run_pipeline(config, paths, &scene.map);
  const PipelineResult b = run_pipeline(config, paths, &scene.map);
  const std::string detections_a = write_detections(all_detections(a));
  const std::string detections_b = write_detections(all_detections(b));
  const SavedMap map_a = save_occupancy_map(a.map);
  const SavedMap map_b = save_occupancy_map(b.map);

  EXPECT_EQ(detections_a, detections_b);
  EXPECT_EQ(map_a.image, map_b.image);
  const double elapsed = watch.seconds();
  EXPECT_LT(elapsed, 10.0);
  char detail[140];
  std::snprintf(detail, sizeof(detail),
                "%zu detection bytes and %zu map bytes identical, %.1f s (budget 10)",
                detections_a.size(), map_a.image.size(), elapsed);
  report(9, "byte-identical reruns", !HasFailure(), detail);
}

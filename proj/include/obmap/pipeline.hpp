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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "obmap/cluster.hpp"
#include "obmap/config.hpp"
#include "obmap/core.hpp"
#include "obmap/detection_io.hpp"
#include "obmap/errors.hpp"
#include "obmap/map_filter.hpp"
#include "obmap/map_io.hpp"
#include "obmap/obb.hpp"
#include "obmap/occupancy_grid.hpp"
#include "obmap/pcd_io.hpp"
#include "obmap/ransac.hpp"
#include "obmap/voxel.hpp"

namespace obmap {

/// Per-stage wall-clock durations for one frame, microseconds. `total_us` is
/// measured around the whole frame, so it is at least the largest stage.
struct FrameTiming {
  std::uint64_t load_us = 0;
  std::uint64_t voxel_us = 0;
  std::uint64_t ransac_us = 0;
  std::uint64_t transform_us = 0;
  std::uint64_t map_filter_us = 0;
  std::uint64_t cluster_us = 0;
  std::uint64_t obb_us = 0;
  std::uint64_t total_us = 0;
};

struct FrameResult {
  std::size_t index = 0;
  std::string source;
  bool ok = true;
  std::string error;        ///< set when ok is false
  std::size_t input_points = 0;
  std::size_t clustered_points = 0;  ///< points surviving to clustering
  std::vector<DetectionRecord> detections;
  FrameTiming timing;
};

struct PipelineResult {
  std::vector<FrameResult> frames;
  OccupancyGrid map;          ///< working map after the last frame (empty when none configured)
  std::size_t skipped = 0;
};

struct RunOptions {
  /// Disable the map feedback (mark_detections between frames), making every
  /// frame independent of the frames before it.
  bool stateless = false;
};

/// Frames arrive at the sensor rate; stamps are assigned on a fixed 10 Hz
/// cadence since the frame files carry no clock.
inline constexpr std::uint64_t kFramePeriodNs = 100'000'000;

namespace detail {

class StageClock {
 public:
  StageClock() : last_(std::chrono::steady_clock::now()) {}

  std::uint64_t lap() {
    const auto now = std::chrono::steady_clock::now();
    const auto us = std::chrono::duration_cast<std::chrono::microseconds>(now - last_).count();
    last_ = now;
    return static_cast<std::uint64_t>(us);
  }

 private:
  std::chrono::steady_clock::time_point last_;
};

}  // namespace detail

/// Run the full stage graph over an ordered frame list:
/// read -> voxel -> floor fit/removal -> transform to map frame ->
/// map filtration -> clustering -> box fit -> map update.
///
/// A frame that throws is recorded and skipped; the pipeline never halts
/// mid-run. Only configuration and map loading are fatal. The result is a
/// pure function of (config, frame bytes, map bytes, options).
inline PipelineResult run_pipeline(const PipelineConfig& config,
                                   std::span<const std::string> frame_paths,
                                   const OccupancyGrid* initial_map = nullptr,
                                   const RunOptions& options = {}) {
  PipelineResult result;
  const std::string& map_frame = config.static_transform.parent_frame;
  const std::string& sensor_frame = config.static_transform.child_frame;

  bool has_map = false;
  if (initial_map != nullptr) {
    result.map = *initial_map;
    result.map.set_frame_id(map_frame);
    has_map = true;
  } else if (!config.map_metadata_path.empty()) {
    result.map = load_occupancy_map_file(config.map_metadata_path, map_frame);
    has_map = true;
  }
  if (config.map_filter_enabled && !has_map) {
    throw ConfigError("run_pipeline: map_filter_enabled but no map configured");
  }

  result.frames.reserve(frame_paths.size());
  for (std::size_t i = 0; i < frame_paths.size(); ++i) {
    FrameResult frame;
    frame.index = i;
    frame.source = frame_paths[i];
    const auto frame_start = std::chrono::steady_clock::now();
    try {
      detail::StageClock clock;
      PointCloud cloud =
          read_pcd_file(frame_paths[i], sensor_frame, static_cast<std::uint64_t>(i) * kFramePeriodNs);
      frame.timing.load_us = clock.lap();
      frame.input_points = cloud.size();

      cloud = voxel_downsample(cloud, config.voxel);
      frame.timing.voxel_us = clock.lap();

      if (config.floor_removal_enabled) {
        const PlaneFit floor = fit_floor_ransac(cloud, config.ransac);
        cloud = remove_floor(cloud, floor.plane, config.ransac.distance_threshold);
      }
      frame.timing.ransac_us = clock.lap();

      cloud = transform_cloud(cloud, config.static_transform);
      frame.timing.transform_us = clock.lap();

      if (config.map_filter_enabled) {
        cloud = filter_by_map(cloud, result.map, config.out_of_bounds_policy);
      }
      frame.timing.map_filter_us = clock.lap();
      frame.clustered_points = cloud.size();

      const std::vector<std::vector<std::size_t>> clusters =
          euclidean_cluster(cloud, config.cluster);
      frame.timing.cluster_us = clock.lap();

      std::vector<Detection> detections;
      detections.reserve(clusters.size());
      for (std::size_t c = 0; c < clusters.size(); ++c) {
        detections.push_back(
            fit_obb(cloud, clusters[c], config.obb, static_cast<std::uint32_t>(c)));
      }
      frame.timing.obb_us = clock.lap();

      frame.detections.reserve(detections.size());
      for (const Detection& det : detections) {
        frame.detections.push_back(DetectionRecord{kDetectionSchemaVersion, cloud.stamp, det});
      }
      if (has_map && !options.stateless) {
        result.map = mark_detections(result.map, detections);
      }
    } catch (const Error& e) {
      frame.ok = false;
      frame.error = e.what();
      frame.detections.clear();
      ++result.skipped;
    }
    frame.timing.total_us = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() -
                                                              frame_start)
            .count());
    result.frames.push_back(std::move(frame));
  }
  return result;
}

/// Collect all detection records of a run in frame order.
inline std::vector<DetectionRecord> all_detections(const PipelineResult& result) {
  std::vector<DetectionRecord> out;
  for (const FrameResult& frame : result.frames) {
    out.insert(out.end(), frame.detections.begin(), frame.detections.end());
  }
  return out;
}

struct StageStats {
  double mean_us = 0.0;
  double median_us = 0.0;
  double p95_us = 0.0;
  double max_us = 0.0;
};

struct BenchReport {
  std::size_t repetitions = 0;
  std::size_t frames = 0;
  double mean_points_per_frame = 0.0;
  StageStats load, voxel, ransac, transform, map_filter, cluster, obb, total;
  /// Detections and final map were byte-identical across repetitions.
  bool outputs_identical = true;
  std::size_t skipped = 0;

  std::string to_string() const;
};

namespace detail {

inline StageStats summarize(std::vector<std::uint64_t>& samples) {
  StageStats stats;
  if (samples.empty()) return stats;
  std::sort(samples.begin(), samples.end());
  const double sum = std::accumulate(samples.begin(), samples.end(), 0.0);
  stats.mean_us = sum / static_cast<double>(samples.size());
  const std::size_t n = samples.size();
  stats.median_us = (n % 2 == 1)
                        ? static_cast<double>(samples[n / 2])
                        : (static_cast<double>(samples[n / 2 - 1]) +
                           static_cast<double>(samples[n / 2])) /
                              2.0;
  const std::size_t p95_index = (n * 95 + 99) / 100;  // ceil(0.95 n), 1-based
  stats.p95_us = static_cast<double>(samples[std::min(n - 1, p95_index > 0 ? p95_index - 1 : 0)]);
  stats.max_us = static_cast<double>(samples.back());
  return stats;
}

}  // namespace detail

/// Run the pipeline `repetitions` times over the same frames and summarize
/// per-stage timing. Each repetition starts from the same initial map, so
/// outputs must be identical; only the timing varies.
inline BenchReport bench(const PipelineConfig& config, std::span<const std::string> frame_paths,
                         std::size_t repetitions, const OccupancyGrid* initial_map = nullptr,
                         const RunOptions& options = {}) {
  if (repetitions < 1) throw InvalidArgument("bench: repetitions must be >= 1");

  BenchReport report;
  report.repetitions = repetitions;
  report.frames = frame_paths.size();

  std::vector<std::uint64_t> load, voxel, ransac, transform, map_filter, cluster, obb, total;
  std::string reference_output;
  double point_sum = 0.0;
  std::size_t ok_frames = 0;

  for (std::size_t rep = 0; rep < repetitions; ++rep) {
    const PipelineResult result = run_pipeline(config, frame_paths, initial_map, options);
    std::string output = write_detections(all_detections(result));
    if (!result.map.empty()) {
      const SavedMap saved = save_occupancy_map(result.map);
      output.append(saved.image.begin(), saved.image.end());
    }
    if (rep == 0) {
      reference_output = std::move(output);
    } else if (output != reference_output) {
      report.outputs_identical = false;
    }
    for (const FrameResult& frame : result.frames) {
      if (!frame.ok) continue;
      load.push_back(frame.timing.load_us);
      voxel.push_back(frame.timing.voxel_us);
      ransac.push_back(frame.timing.ransac_us);
      transform.push_back(frame.timing.transform_us);
      map_filter.push_back(frame.timing.map_filter_us);
      cluster.push_back(frame.timing.cluster_us);
      obb.push_back(frame.timing.obb_us);
      total.push_back(frame.timing.total_us);
      point_sum += static_cast<double>(frame.input_points);
      ++ok_frames;
    }
    report.skipped += result.skipped;
  }

  report.mean_points_per_frame = ok_frames > 0 ? point_sum / static_cast<double>(ok_frames) : 0.0;
  report.load = detail::summarize(load);
  report.voxel = detail::summarize(voxel);
  report.ransac = detail::summarize(ransac);
  report.transform = detail::summarize(transform);
  report.map_filter = detail::summarize(map_filter);
  report.cluster = detail::summarize(cluster);
  report.obb = detail::summarize(obb);
  report.total = detail::summarize(total);
  return report;
}

inline std::string BenchReport::to_string() const {
  char buf[160];
  std::string out;
  std::snprintf(buf, sizeof(buf), "repetitions: %zu  frames: %zu  mean points/frame: %.0f\n",
                repetitions, frames, mean_points_per_frame);
  out += buf;
  if (skipped > 0) {
    std::snprintf(buf, sizeof(buf), "skipped frame runs: %zu\n", skipped);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "outputs identical across repetitions: %s\n",
                outputs_identical ? "yes" : "no");
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-11s %10s %10s %10s\n", "stage", "mean[us]", "median[us]",
                "p95[us]");
  out += buf;
  const auto row = [&](const char* name, const StageStats& s) {
    std::snprintf(buf, sizeof(buf), "%-11s %10.1f %10.1f %10.1f\n", name, s.mean_us, s.median_us,
                  s.p95_us);
    out += buf;
  };
  row("load", load);
  row("voxel", voxel);
  row("ransac", ransac);
  row("transform", transform);
  row("map_filter", map_filter);
  row("cluster", cluster);
  row("obb", obb);
  row("total", total);
  return out;
}

}  // namespace obmap

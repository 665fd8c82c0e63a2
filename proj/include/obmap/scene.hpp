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
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "obmap/core.hpp"
#include "obmap/errors.hpp"
#include "obmap/occupancy_grid.hpp"
#include "obmap/pipeline.hpp"

namespace obmap {

/// A box standing on the floor (z from 0 to height), the obstacle the
/// pipeline is expected to find.
struct SceneBox {
  double cx = 0.0;
  double cy = 0.0;
  double yaw = 0.0;  ///< radians, length axis direction
  double length = 0.5;
  double width = 0.5;
  double height = 0.5;
};

/// A pre-mapped vertical wall, entered into the scene's occupancy map.
struct WallSegment {
  double x0 = 0.0, y0 = 0.0;
  double x1 = 1.0, y1 = 0.0;
  double height = 2.0;
  double thickness = 0.1;
};

/// Deterministic synthetic scene: a noisy floor patch, boxes to detect,
/// pre-mapped walls, and a cone-FOV range sensor.
struct SceneSpec {
  std::uint64_t seed = 0;
  std::size_t points_per_frame = 20000;
  std::size_t frame_count = 1;
  double fov_deg = 70.0;
  Point3 sensor_position{0.0, 0.0, 1.2};
  double sensor_yaw = 0.0;    ///< cone axis heading
  double sensor_pitch = 0.0;  ///< positive pitches the cone axis downward
  double floor_size_x = 12.0;
  double floor_size_y = 12.0;
  double floor_noise = 0.005;  ///< uniform z jitter on floor hits, meters
  double max_range = 30.0;
  double min_range = 0.05;
  std::vector<SceneBox> boxes;
  std::vector<WallSegment> walls;
  double map_resolution = 0.05;
  std::size_t map_width = 240;
  std::size_t map_height = 240;
  GridOrigin map_origin{-6.0, -6.0, 0.0};
  std::size_t map_dilation_cells = 1;  ///< widen wall footprints in the map by this many cells

  /// Three boxes ahead of the sensor plus a mapped back wall; a 12 x 12 m
  /// floor fully covered by a 0.05 m map. Boxes sit fully inside the sensing
  /// cone with their tops below the sensor, so footprints are well observed.
  static SceneSpec defaults() {
    SceneSpec spec;
    spec.boxes = {{2.6, -0.8, 30.0 * std::numbers::pi / 180.0, 1.0, 0.7, 0.5},
                  {3.4, 0.9, 40.0 * std::numbers::pi / 180.0, 0.9, 0.6, 0.45},
                  {4.5, -0.35, 10.0 * std::numbers::pi / 180.0, 1.1, 0.6, 0.6}};
    spec.walls = {{5.5, -6.0, 5.5, 6.0, 2.0, 0.1}};
    return spec;
  }
};

struct SceneOutput {
  std::vector<PointCloud> frames;  ///< sensor frame, 10 Hz stamps
  OccupancyGrid map;               ///< walls occupied, everything else free
  std::vector<SceneBox> truth;     ///< the boxes, map frame
  RigidTransform sensor_to_map;
};

namespace detail {

struct ObbGeom {
  Vec2 center;
  double cos_yaw = 1.0, sin_yaw = 0.0;
  double half_length = 0.0, half_width = 0.0, half_height = 0.0;
  double center_z = 0.0;
};

inline ObbGeom make_obb_geom(double cx, double cy, double yaw, double length, double width,
                             double height) {
  return ObbGeom{{cx, cy}, std::cos(yaw), std::sin(yaw), length / 2.0, width / 2.0, height / 2.0,
                 height / 2.0};
}

/// Slab test; returns entry distance or infinity when the ray misses.
inline double ray_obb_entry(const Point3& origin, const Point3& dir, const ObbGeom& box) {
  // Ray in box coordinates.
  const double ox = origin.x - box.center.x;
  const double oy = origin.y - box.center.y;
  const double oz = origin.z - box.center_z;
  const double lx = box.cos_yaw * ox + box.sin_yaw * oy;
  const double ly = -box.sin_yaw * ox + box.cos_yaw * oy;
  const double ldx = box.cos_yaw * dir.x + box.sin_yaw * dir.y;
  const double ldy = -box.sin_yaw * dir.x + box.cos_yaw * dir.y;

  double t_enter = 0.0;
  double t_exit = std::numeric_limits<double>::infinity();
  const double pos[3] = {lx, ly, oz};
  const double vel[3] = {ldx, ldy, dir.z};
  const double half[3] = {box.half_length, box.half_width, box.half_height};
  for (int axis = 0; axis < 3; ++axis) {
    if (std::abs(vel[axis]) < 1e-15) {
      if (std::abs(pos[axis]) > half[axis]) return std::numeric_limits<double>::infinity();
      continue;
    }
    double t0 = (-half[axis] - pos[axis]) / vel[axis];
    double t1 = (half[axis] - pos[axis]) / vel[axis];
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
    if (t_enter > t_exit) return std::numeric_limits<double>::infinity();
  }
  return t_enter > 0.0 ? t_enter : std::numeric_limits<double>::infinity();
}

}  // namespace detail

inline void validate_scene_spec(const SceneSpec& spec) {
  if (spec.points_per_frame < 1) throw InvalidSpec("scene: points_per_frame must be >= 1");
  if (!(spec.fov_deg > 0.0) || spec.fov_deg > 180.0) {
    throw InvalidSpec("scene: fov_deg must be in (0, 180]");
  }
  if (!(spec.floor_size_x > 0.0) || !(spec.floor_size_y > 0.0)) {
    throw InvalidSpec("scene: floor extents must be > 0");
  }
  if (spec.floor_noise < 0.0) throw InvalidSpec("scene: floor_noise must be >= 0");
  if (!(spec.max_range > spec.min_range) || !(spec.min_range >= 0.0)) {
    throw InvalidSpec("scene: need 0 <= min_range < max_range");
  }
  if (!(spec.map_resolution > 0.0)) throw InvalidSpec("scene: map_resolution must be > 0");
  if (spec.map_width < 1 || spec.map_height < 1) throw InvalidSpec("scene: map dims must be >= 1");
  for (const SceneBox& box : spec.boxes) {
    if (!(box.length > 0.0) || !(box.width > 0.0) || !(box.height > 0.0)) {
      throw InvalidSpec("scene: box extents must be > 0");
    }
  }
  for (const WallSegment& wall : spec.walls) {
    if (!(wall.height > 0.0) || !(wall.thickness > 0.0)) {
      throw InvalidSpec("scene: wall height and thickness must be > 0");
    }
    if (wall.x0 == wall.x1 && wall.y0 == wall.y1) {
      throw InvalidSpec("scene: wall endpoints must differ");
    }
  }
}

/// Generate frames by casting rays from the sensor pose through a cone of the
/// configured FOV and keeping the nearest surface hit within range. Rays that
/// hit nothing are redrawn until the frame holds points_per_frame points (or
/// an attempt cap is reached for nearly empty scenes). Floor hits get uniform
/// z jitter of +/- floor_noise. Everything is driven by one seeded generator,
/// so output is a pure function of the spec.
inline SceneOutput gen_scene(const SceneSpec& spec) {
  validate_scene_spec(spec);

  SceneOutput out;
  const Quaternion orientation =
      Quaternion::from_yaw(spec.sensor_yaw) *
      Quaternion::from_axis_angle({0.0, 1.0, 0.0}, spec.sensor_pitch);
  out.sensor_to_map = RigidTransform(orientation, spec.sensor_position, "map", "lidar");
  out.truth = spec.boxes;

  // Pre-mapped walls: free map, wall footprints (dilated) occupied.
  OccupancyGrid base(spec.map_width, spec.map_height, spec.map_resolution, spec.map_origin,
                     CellState::free, "map");
  std::vector<Detection> wall_marks;
  const double dilation = static_cast<double>(spec.map_dilation_cells) * spec.map_resolution;
  for (const WallSegment& wall : spec.walls) {
    const Vec2 a{wall.x0, wall.y0};
    const Vec2 b{wall.x1, wall.y1};
    const Vec2 d = b - a;
    wall_marks.emplace_back(Point3{(a.x + b.x) / 2.0, (a.y + b.y) / 2.0, wall.height / 2.0},
                            norm(d) + 2.0 * dilation, wall.thickness + 2.0 * dilation, wall.height,
                            std::atan2(d.y, d.x), 1, 0);
  }
  out.map = mark_detections(base, wall_marks);

  // Scene geometry for the ray caster.
  std::vector<detail::ObbGeom> solids;
  solids.reserve(spec.boxes.size() + spec.walls.size());
  for (const SceneBox& box : spec.boxes) {
    solids.push_back(detail::make_obb_geom(box.cx, box.cy, box.yaw, box.length, box.width,
                                           box.height));
  }
  for (const WallSegment& wall : spec.walls) {
    const Vec2 d{wall.x1 - wall.x0, wall.y1 - wall.y0};
    solids.push_back(detail::make_obb_geom((wall.x0 + wall.x1) / 2.0, (wall.y0 + wall.y1) / 2.0,
                                           std::atan2(d.y, d.x), norm(Vec2{d.x, d.y}),
                                           wall.thickness, wall.height));
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double cos_half_fov = std::cos(spec.fov_deg * std::numbers::pi / 180.0 / 2.0);
  const std::array<double, 9> rot = orientation.to_matrix();
  const RigidTransform map_to_sensor = inverse(out.sensor_to_map);

  out.frames.reserve(spec.frame_count);
  for (std::size_t f = 0; f < spec.frame_count; ++f) {
    PointCloud world_hits("map", static_cast<std::uint64_t>(f) * kFramePeriodNs);
    world_hits.reserve(spec.points_per_frame);
    const std::size_t attempt_cap = spec.points_per_frame * 100;
    std::size_t attempts = 0;
    while (world_hits.size() < spec.points_per_frame && attempts < attempt_cap) {
      ++attempts;
      // Uniform direction within the cone, axis +x in sensor coordinates.
      const double cos_polar = cos_half_fov + (1.0 - cos_half_fov) * unit(rng);
      const double sin_polar = std::sqrt(std::max(0.0, 1.0 - cos_polar * cos_polar));
      const double azimuth = 2.0 * std::numbers::pi * unit(rng);
      const Point3 local_dir{cos_polar, sin_polar * std::cos(azimuth),
                             sin_polar * std::sin(azimuth)};
      const Point3 dir{rot[0] * local_dir.x + rot[1] * local_dir.y + rot[2] * local_dir.z,
                       rot[3] * local_dir.x + rot[4] * local_dir.y + rot[5] * local_dir.z,
                       rot[6] * local_dir.x + rot[7] * local_dir.y + rot[8] * local_dir.z};

      double t_best = std::numeric_limits<double>::infinity();
      bool hit_floor = false;
      if (dir.z < -1e-15) {
        const double t = -spec.sensor_position.z / dir.z;
        const double hx = spec.sensor_position.x + t * dir.x;
        const double hy = spec.sensor_position.y + t * dir.y;
        if (t > 0.0 && std::abs(hx) <= spec.floor_size_x / 2.0 &&
            std::abs(hy) <= spec.floor_size_y / 2.0) {
          t_best = t;
          hit_floor = true;
        }
      }
      for (const detail::ObbGeom& solid : solids) {
        const double t = detail::ray_obb_entry(spec.sensor_position, dir, solid);
        if (t < t_best) {
          t_best = t;
          hit_floor = false;
        }
      }
      if (!std::isfinite(t_best) || t_best < spec.min_range || t_best > spec.max_range) continue;

      Point3 hit = spec.sensor_position + t_best * dir;
      if (hit_floor && spec.floor_noise > 0.0) {
        hit.z += (2.0 * unit(rng) - 1.0) * spec.floor_noise;
      }
      world_hits.push_back(hit);
    }
    out.frames.push_back(transform_cloud(world_hits, map_to_sensor));
  }
  return out;
}

inline SceneSpec parse_scene_spec(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec(std::string("scene: ") + e.what());
  }
  SceneSpec spec;
  try {
    detail::read_if(j, "seed", spec.seed);
    detail::read_if(j, "points_per_frame", spec.points_per_frame);
    detail::read_if(j, "frame_count", spec.frame_count);
    detail::read_if(j, "fov_deg", spec.fov_deg);
    if (j.contains("sensor_position")) {
      const auto& p = j.at("sensor_position");
      spec.sensor_position = {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()};
    }
    detail::read_if(j, "sensor_yaw", spec.sensor_yaw);
    detail::read_if(j, "sensor_pitch", spec.sensor_pitch);
    detail::read_if(j, "floor_size_x", spec.floor_size_x);
    detail::read_if(j, "floor_size_y", spec.floor_size_y);
    detail::read_if(j, "floor_noise", spec.floor_noise);
    detail::read_if(j, "max_range", spec.max_range);
    detail::read_if(j, "min_range", spec.min_range);
    detail::read_if(j, "map_resolution", spec.map_resolution);
    detail::read_if(j, "map_width", spec.map_width);
    detail::read_if(j, "map_height", spec.map_height);
    if (j.contains("map_origin")) {
      const auto& o = j.at("map_origin");
      spec.map_origin = {o.at(0).get<double>(), o.at(1).get<double>(), o.at(2).get<double>()};
    }
    detail::read_if(j, "map_dilation_cells", spec.map_dilation_cells);
    if (j.contains("boxes")) {
      spec.boxes.clear();
      for (const auto& b : j.at("boxes")) {
        SceneBox box;
        detail::read_if(b, "cx", box.cx);
        detail::read_if(b, "cy", box.cy);
        detail::read_if(b, "yaw", box.yaw);
        detail::read_if(b, "length", box.length);
        detail::read_if(b, "width", box.width);
        detail::read_if(b, "height", box.height);
        spec.boxes.push_back(box);
      }
    }
    if (j.contains("walls")) {
      spec.walls.clear();
      for (const auto& w : j.at("walls")) {
        WallSegment wall;
        detail::read_if(w, "x0", wall.x0);
        detail::read_if(w, "y0", wall.y0);
        detail::read_if(w, "x1", wall.x1);
        detail::read_if(w, "y1", wall.y1);
        detail::read_if(w, "height", wall.height);
        detail::read_if(w, "thickness", wall.thickness);
        spec.walls.push_back(wall);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec(std::string("scene: ") + e.what());
  }
  validate_scene_spec(spec);
  return spec;
}

inline std::string write_scene_truth(const SceneOutput& scene) {
  nlohmann::ordered_json j;
  j["boxes"] = nlohmann::json::array();
  for (const SceneBox& box : scene.truth) {
    j["boxes"].push_back({{"cx", box.cx},
                          {"cy", box.cy},
                          {"yaw", box.yaw},
                          {"length", box.length},
                          {"width", box.width},
                          {"height", box.height}});
  }
  return j.dump(2) + "\n";
}

}  // namespace obmap

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

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "obmap/cluster.hpp"
#include "obmap/core.hpp"
#include "obmap/errors.hpp"
#include "obmap/map_filter.hpp"
#include "obmap/obb.hpp"
#include "obmap/ransac.hpp"
#include "obmap/voxel.hpp"

namespace obmap {

/// Everything the pipeline needs for one run. All stage parameters live in a
/// single configuration file; angles are radians throughout.
struct PipelineConfig {
  VoxelParams voxel;
  RansacParams ransac;
  ClusterParams cluster;
  ObbParams obb;
  /// Sensor-to-map motion; its child frame names the sensor frame assigned to
  /// loaded clouds and its parent frame names the map frame.
  RigidTransform static_transform = RigidTransform::identity("map", "lidar");
  std::string map_metadata_path;  ///< empty means no prior map
  bool floor_removal_enabled = true;
  bool map_filter_enabled = true;
  OutOfBoundsPolicy out_of_bounds_policy = OutOfBoundsPolicy::keep;
};

namespace detail {

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

inline PipelineConfig parse_pipeline_config(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  PipelineConfig config;
  try {
    if (j.contains("voxel")) {
      const auto& v = j.at("voxel");
      detail::read_if(v, "leaf_size", config.voxel.leaf_size);
      detail::read_if(v, "min_points_per_voxel", config.voxel.min_points_per_voxel);
      if (v.contains("representative")) {
        const auto name = v.at("representative").get<std::string>();
        if (name == "centroid") {
          config.voxel.representative = VoxelRepresentative::centroid;
        } else if (name == "cell_center") {
          config.voxel.representative = VoxelRepresentative::cell_center;
        } else {
          throw ConfigError("config: voxel.representative must be centroid or cell_center");
        }
      }
    }
    if (j.contains("ransac")) {
      const auto& r = j.at("ransac");
      detail::read_if(r, "distance_threshold", config.ransac.distance_threshold);
      detail::read_if(r, "max_iterations", config.ransac.max_iterations);
      detail::read_if(r, "seed", config.ransac.seed);
      detail::read_if(r, "max_normal_tilt", config.ransac.max_normal_tilt);
      detail::read_if(r, "min_inlier_fraction", config.ransac.min_inlier_fraction);
    }
    if (j.contains("cluster")) {
      const auto& c = j.at("cluster");
      detail::read_if(c, "tolerance", config.cluster.tolerance);
      detail::read_if(c, "min_cluster_size", config.cluster.min_cluster_size);
      detail::read_if(c, "max_cluster_size", config.cluster.max_cluster_size);
    }
    if (j.contains("obb")) {
      const auto& o = j.at("obb");
      detail::read_if(o, "angle_step", config.obb.angle_step);
      detail::read_if(o, "z_from_cluster", config.obb.z_from_cluster);
    }
    if (j.contains("static_transform")) {
      const auto& t = j.at("static_transform");
      Quaternion q;
      Point3 translation;
      std::string parent = "map", child = "lidar";
      if (t.contains("rotation_wxyz")) {
        const auto& r = t.at("rotation_wxyz");
        q = Quaternion{r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(),
                       r.at(3).get<double>()};
      }
      if (t.contains("translation")) {
        const auto& tr = t.at("translation");
        translation = {tr.at(0).get<double>(), tr.at(1).get<double>(), tr.at(2).get<double>()};
      }
      detail::read_if(t, "parent_frame", parent);
      detail::read_if(t, "child_frame", child);
      config.static_transform = RigidTransform(q, translation, parent, child);
    }
    detail::read_if(j, "map_metadata_path", config.map_metadata_path);
    detail::read_if(j, "floor_removal_enabled", config.floor_removal_enabled);
    detail::read_if(j, "map_filter_enabled", config.map_filter_enabled);
    if (j.contains("out_of_bounds_policy")) {
      const auto name = j.at("out_of_bounds_policy").get<std::string>();
      if (name == "keep") {
        config.out_of_bounds_policy = OutOfBoundsPolicy::keep;
      } else if (name == "drop") {
        config.out_of_bounds_policy = OutOfBoundsPolicy::drop;
      } else {
        throw ConfigError("config: out_of_bounds_policy must be keep or drop");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  // Validate the invariants the stages rely on, so failures happen at load.
  if (!(config.voxel.leaf_size > 0.0)) throw ConfigError("config: voxel.leaf_size must be > 0");
  if (config.voxel.min_points_per_voxel < 1) {
    throw ConfigError("config: voxel.min_points_per_voxel must be >= 1");
  }
  if (!(config.ransac.distance_threshold > 0.0)) {
    throw ConfigError("config: ransac.distance_threshold must be > 0");
  }
  if (config.ransac.max_iterations < 1) {
    throw ConfigError("config: ransac.max_iterations must be >= 1");
  }
  if (config.ransac.max_normal_tilt < 0.0 ||
      config.ransac.max_normal_tilt > std::numbers::pi / 2.0 + 1e-12) {
    throw ConfigError("config: ransac.max_normal_tilt must be in [0, pi/2]");
  }
  if (config.ransac.min_inlier_fraction < 0.0 || config.ransac.min_inlier_fraction > 1.0) {
    throw ConfigError("config: ransac.min_inlier_fraction must be in [0, 1]");
  }
  if (!(config.cluster.tolerance > 0.0)) throw ConfigError("config: cluster.tolerance must be > 0");
  if (config.cluster.min_cluster_size < 1 ||
      config.cluster.min_cluster_size > config.cluster.max_cluster_size) {
    throw ConfigError("config: need 1 <= cluster.min_cluster_size <= cluster.max_cluster_size");
  }
  if (!(config.obb.angle_step > 0.0) || config.obb.angle_step > std::numbers::pi / 4.0 + 1e-12) {
    throw ConfigError("config: obb.angle_step must be in (0, pi/4]");
  }
  return config;
}

inline std::string write_pipeline_config(const PipelineConfig& config) {
  nlohmann::ordered_json j;
  j["voxel"] = {{"leaf_size", config.voxel.leaf_size},
                {"min_points_per_voxel", config.voxel.min_points_per_voxel},
                {"representative", config.voxel.representative == VoxelRepresentative::centroid
                                       ? "centroid"
                                       : "cell_center"}};
  j["ransac"] = {{"distance_threshold", config.ransac.distance_threshold},
                 {"max_iterations", config.ransac.max_iterations},
                 {"seed", config.ransac.seed},
                 {"max_normal_tilt", config.ransac.max_normal_tilt},
                 {"min_inlier_fraction", config.ransac.min_inlier_fraction}};
  j["cluster"] = {{"tolerance", config.cluster.tolerance},
                  {"min_cluster_size", config.cluster.min_cluster_size},
                  {"max_cluster_size", config.cluster.max_cluster_size}};
  j["obb"] = {{"angle_step", config.obb.angle_step},
              {"z_from_cluster", config.obb.z_from_cluster}};
  j["static_transform"] = {
      {"rotation_wxyz",
       {config.static_transform.rotation.w, config.static_transform.rotation.x,
        config.static_transform.rotation.y, config.static_transform.rotation.z}},
      {"translation",
       {config.static_transform.translation.x, config.static_transform.translation.y,
        config.static_transform.translation.z}},
      {"parent_frame", config.static_transform.parent_frame},
      {"child_frame", config.static_transform.child_frame}};
  j["map_metadata_path"] = config.map_metadata_path;
  j["floor_removal_enabled"] = config.floor_removal_enabled;
  j["map_filter_enabled"] = config.map_filter_enabled;
  j["out_of_bounds_policy"] =
      config.out_of_bounds_policy == OutOfBoundsPolicy::keep ? "keep" : "drop";
  return j.dump(2) + "\n";
}

inline PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_pipeline_config(text);
}

}  // namespace obmap

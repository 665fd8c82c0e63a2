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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "obmap/obmap.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitSkippedFrames = 2;

bool wildcard_match(std::string_view pattern, std::string_view name) {
  // Iterative '*'/'?' matcher with backtracking over the last star.
  std::size_t p = 0, n = 0;
  std::size_t star = std::string_view::npos, star_n = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      star_n = n;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      n = ++star_n;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

/// Expand a --frames argument: either a single path or a pattern whose final
/// component may contain '*' / '?'. Results are sorted lexicographically.
std::vector<std::string> expand_frames(const std::string& pattern) {
  const fs::path as_path(pattern);
  const std::string filename = as_path.filename().string();
  if (filename.find('*') == std::string::npos && filename.find('?') == std::string::npos) {
    return {pattern};
  }
  const fs::path dir = as_path.parent_path().empty() ? fs::path(".") : as_path.parent_path();
  std::vector<std::string> matches;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    if (wildcard_match(filename, entry.path().filename().string())) {
      matches.push_back(entry.path().string());
    }
  }
  if (ec) throw obmap::IoError("cannot list directory: " + dir.string());
  std::sort(matches.begin(), matches.end());
  return matches;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw obmap::UnwritablePath("cannot write: " + path.string());
  out << text;
}

std::string timings_csv(const obmap::PipelineResult& result) {
  std::string csv =
      "frame,source,ok,input_points,clustered_points,detections,"
      "load_us,voxel_us,ransac_us,transform_us,map_filter_us,cluster_us,obb_us,total_us\n";
  char line[512];
  for (const obmap::FrameResult& f : result.frames) {
    std::snprintf(line, sizeof(line), "%zu,%s,%d,%zu,%zu,%zu,%lu,%lu,%lu,%lu,%lu,%lu,%lu,%lu\n",
                  f.index, f.source.c_str(), f.ok ? 1 : 0, f.input_points, f.clustered_points,
                  f.detections.size(), static_cast<unsigned long>(f.timing.load_us),
                  static_cast<unsigned long>(f.timing.voxel_us),
                  static_cast<unsigned long>(f.timing.ransac_us),
                  static_cast<unsigned long>(f.timing.transform_us),
                  static_cast<unsigned long>(f.timing.map_filter_us),
                  static_cast<unsigned long>(f.timing.cluster_us),
                  static_cast<unsigned long>(f.timing.obb_us),
                  static_cast<unsigned long>(f.timing.total_us));
    csv += line;
  }
  return csv;
}

int cmd_run(const std::string& config_path, const std::string& map_path,
            const std::string& frames_pattern, const std::string& out_dir, bool stateless) {
  obmap::PipelineConfig config = obmap::load_pipeline_config(config_path);
  if (!map_path.empty()) config.map_metadata_path = map_path;
  // Paths in the config resolve relative to the config file.
  if (!config.map_metadata_path.empty() && fs::path(config.map_metadata_path).is_relative()) {
    config.map_metadata_path =
        (fs::path(config_path).parent_path() / config.map_metadata_path).string();
  }
  const std::vector<std::string> frames = expand_frames(frames_pattern);

  obmap::RunOptions options;
  options.stateless = stateless;
  const obmap::PipelineResult result = obmap::run_pipeline(config, frames, nullptr, options);

  fs::create_directories(out_dir);
  write_text_file(fs::path(out_dir) / "detections.jsonl",
                  obmap::write_detections(obmap::all_detections(result)));
  write_text_file(fs::path(out_dir) / "timings.csv", timings_csv(result));
  if (!result.map.empty()) {
    obmap::save_occupancy_map_files(result.map, fs::path(out_dir) / "map_final.yaml");
  }

  std::size_t detections = 0;
  for (const obmap::FrameResult& f : result.frames) detections += f.detections.size();
  std::printf("processed %zu frame(s), %zu detection(s), %zu skipped -> %s\n",
              result.frames.size(), detections, result.skipped, out_dir.c_str());
  for (const obmap::FrameResult& f : result.frames) {
    if (!f.ok) std::fprintf(stderr, "frame %zu (%s) skipped: %s\n", f.index, f.source.c_str(),
                            f.error.c_str());
  }
  return result.skipped > 0 ? kExitSkippedFrames : kExitOk;
}

int cmd_bench(const std::string& config_path, const std::string& map_path,
              const std::string& frames_pattern, std::size_t reps, const std::string& out_dir,
              bool stateless) {
  obmap::PipelineConfig config = obmap::load_pipeline_config(config_path);
  if (!map_path.empty()) config.map_metadata_path = map_path;
  if (!config.map_metadata_path.empty() && fs::path(config.map_metadata_path).is_relative()) {
    config.map_metadata_path =
        (fs::path(config_path).parent_path() / config.map_metadata_path).string();
  }
  const std::vector<std::string> frames = expand_frames(frames_pattern);

  obmap::RunOptions options;
  options.stateless = stateless;
  const obmap::BenchReport report = obmap::bench(config, frames, reps, nullptr, options);
  const std::string text = report.to_string();
  std::fputs(text.c_str(), stdout);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_text_file(fs::path(out_dir) / "bench.txt", text);
  }
  return report.skipped > 0 ? kExitSkippedFrames : kExitOk;
}

int cmd_render(const std::string& frame_path, const std::string& detections_path,
               const std::string& map_path, const std::string& out_path, std::size_t scale) {
  obmap::PointCloud cloud;
  if (!frame_path.empty()) cloud = obmap::read_pcd_file(frame_path, "map");
  std::vector<obmap::DetectionRecord> records;
  if (!detections_path.empty()) {
    std::ifstream in(detections_path);
    if (!in) throw obmap::IoError("cannot open detections: " + detections_path);
    const std::string text((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    records = obmap::read_detections(text);
  }
  std::vector<obmap::Detection> detections;
  detections.reserve(records.size());
  for (const obmap::DetectionRecord& rec : records) detections.push_back(rec.detection);
  obmap::OccupancyGrid grid;
  if (!map_path.empty()) grid = obmap::load_occupancy_map_file(map_path);

  obmap::RenderOptions options;
  options.scale = scale;
  obmap::render_topdown_file(cloud, detections, grid, out_path, options);
  std::printf("wrote %s\n", out_path.c_str());
  return kExitOk;
}

int cmd_gen_scene(const std::string& spec_path, const std::string& out_dir, std::uint64_t seed,
                  bool seed_set) {
  obmap::SceneSpec spec;
  if (!spec_path.empty()) {
    std::ifstream in(spec_path);
    if (!in) throw obmap::IoError("cannot open scene spec: " + spec_path);
    const std::string text((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    spec = obmap::parse_scene_spec(text);
  } else {
    spec = obmap::SceneSpec::defaults();
  }
  if (seed_set) spec.seed = seed;

  const obmap::SceneOutput scene = obmap::gen_scene(spec);

  fs::create_directories(fs::path(out_dir) / "frames");
  for (std::size_t i = 0; i < scene.frames.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "frame_%04zu.pcd", i);
    obmap::write_pcd_file(fs::path(out_dir) / "frames" / name, scene.frames[i]);
  }
  obmap::save_occupancy_map_files(scene.map, fs::path(out_dir) / "map.yaml");
  write_text_file(fs::path(out_dir) / "truth.json", obmap::write_scene_truth(scene));

  obmap::PipelineConfig config;
  config.static_transform = scene.sensor_to_map;
  config.map_metadata_path = "map.yaml";
  write_text_file(fs::path(out_dir) / "config.json", obmap::write_pipeline_config(config));

  std::printf("wrote %zu frame(s), map and truth -> %s\n", scene.frames.size(), out_dir.c_str());
  return kExitOk;
}

int cmd_map_reset(const std::string& map_path, const std::string& baseline_path,
                  const std::string& out_path) {
  const obmap::OccupancyGrid current = obmap::load_occupancy_map_file(map_path);
  const obmap::OccupancyGrid baseline = obmap::load_occupancy_map_file(baseline_path);
  const obmap::OccupancyGrid reset = obmap::reset_map(current, baseline);
  obmap::save_occupancy_map_files(reset, out_path);
  std::printf("wrote %s\n", out_path.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LiDAR obstacle detection pipeline over recorded point-cloud frames"};
  app.require_subcommand(1);

  std::string config_path, map_path, frames_pattern, out_dir = "out";
  std::string detections_path, frame_path, out_path, spec_path, baseline_path;
  std::size_t reps = 100, scale = 4;
  std::uint64_t seed = 0;
  bool stateless = false;

  CLI::App* run = app.add_subcommand("run", "process frames and write detections + final map");
  run->add_option("--config", config_path, "pipeline config (json)")->required();
  run->add_option("--map", map_path, "occupancy map metadata, overrides the config");
  run->add_option("--frames", frames_pattern, "PCD path or glob for the final component")
      ->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--stateless", stateless, "disable map feedback between frames");

  CLI::App* bench = app.add_subcommand("bench", "repeat a run and report per-stage timing");
  bench->add_option("--config", config_path, "pipeline config (json)")->required();
  bench->add_option("--map", map_path, "occupancy map metadata, overrides the config");
  bench->add_option("--frames", frames_pattern, "PCD path or glob")->required();
  bench->add_option("--reps", reps, "repetitions");
  bench->add_option("--out", out_dir, "also write bench.txt here")->default_val("");
  bench->add_flag("--stateless", stateless, "disable map feedback between frames");

  CLI::App* render = app.add_subcommand("render", "draw a top-down view of a frame");
  render->add_option("--frame", frame_path, "PCD file (map frame)");
  render->add_option("--detections", detections_path, "detections.jsonl");
  render->add_option("--map", map_path, "occupancy map metadata");
  render->add_option("--out", out_path, "output .ppm path")->required();
  render->add_option("--scale", scale, "pixels per map cell");

  CLI::App* gen = app.add_subcommand("gen-scene", "generate synthetic frames, map and truth");
  gen->add_option("--spec", spec_path, "scene spec (json); defaults when omitted");
  gen->add_option("--out", out_dir, "output directory")->required();
  CLI::Option* seed_opt = gen->add_option("--seed", seed, "override the spec seed");

  CLI::App* reset = app.add_subcommand("map-reset", "discard runtime markings, restore baseline");
  reset->add_option("--map", map_path, "current map metadata")->required();
  reset->add_option("--baseline", baseline_path, "baseline map metadata")->required();
  reset->add_option("--out", out_path, "output map metadata path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, map_path, frames_pattern, out_dir, stateless);
    if (bench->parsed()) {
      return cmd_bench(config_path, map_path, frames_pattern, reps, out_dir, stateless);
    }
    if (render->parsed()) {
      return cmd_render(frame_path, detections_path, map_path, out_path, scale);
    }
    if (gen->parsed()) {
      return cmd_gen_scene(spec_path, out_dir, seed, seed_opt->count() > 0);
    }
    if (reset->parsed()) return cmd_map_reset(map_path, baseline_path, out_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFatal;
  }
  return kExitFatal;
}

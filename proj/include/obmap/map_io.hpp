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

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "obmap/errors.hpp"
#include "obmap/occupancy_grid.hpp"

namespace obmap {

/// Map-server style metadata accompanying a PGM occupancy image.
struct MapMetadata {
  std::string image_path;
  double resolution = 0.05;   ///< meters per cell
  GridOrigin origin;          ///< pose of the corner of cell (0,0)
  int negate = 0;
  double occupied_thresh = 0.65;
  double free_thresh = 0.196;
};

namespace detail {

inline double parse_meta_double(std::string_view token, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ConfigError(std::string("map metadata: bad number for ") + what);
  }
  return v;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace detail

/// Parse the flat `key: value` metadata format (origin is `[x, y, yaw]`).
/// Unknown keys are ignored; negate and the thresholds default when omitted.
inline MapMetadata parse_map_metadata(std::string_view text) {
  MapMetadata meta;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = detail::trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) throw ConfigError("map metadata: line without ':'");
    const std::string_view key = detail::trim(line.substr(0, colon));
    const std::string_view value = detail::trim(line.substr(colon + 1));

    if (key == "image") {
      meta.image_path = std::string(value);
    } else if (key == "resolution") {
      meta.resolution = detail::parse_meta_double(value, "resolution");
    } else if (key == "origin") {
      if (value.size() < 2 || value.front() != '[' || value.back() != ']') {
        throw ConfigError("map metadata: origin wants [x, y, yaw]");
      }
      std::string_view inner = value.substr(1, value.size() - 2);
      double parts[3] = {0, 0, 0};
      for (int i = 0; i < 3; ++i) {
        std::size_t comma = inner.find(',');
        const std::string_view token =
            detail::trim(comma == std::string_view::npos ? inner : inner.substr(0, comma));
        if (token.empty() || (i < 2 && comma == std::string_view::npos)) {
          throw ConfigError("map metadata: origin wants three values");
        }
        parts[i] = detail::parse_meta_double(token, "origin");
        inner = comma == std::string_view::npos ? std::string_view{} : inner.substr(comma + 1);
      }
      meta.origin = GridOrigin{parts[0], parts[1], parts[2]};
    } else if (key == "negate") {
      meta.negate = static_cast<int>(detail::parse_meta_double(value, "negate"));
    } else if (key == "occupied_thresh") {
      meta.occupied_thresh = detail::parse_meta_double(value, "occupied_thresh");
    } else if (key == "free_thresh") {
      meta.free_thresh = detail::parse_meta_double(value, "free_thresh");
    }
  }
  if (!(meta.resolution > 0.0)) throw ConfigError("map metadata: resolution must be > 0");
  if (!(meta.free_thresh < meta.occupied_thresh)) {
    throw ConfigError("map metadata: free_thresh must be < occupied_thresh");
  }
  return meta;
}

inline std::string write_map_metadata(const MapMetadata& meta) {
  char buf[256];
  std::string out;
  out += "image: " + meta.image_path + "\n";
  std::snprintf(buf, sizeof(buf), "resolution: %.17g\n", meta.resolution);
  out += buf;
  std::snprintf(buf, sizeof(buf), "origin: [%.17g, %.17g, %.17g]\n", meta.origin.x, meta.origin.y,
                meta.origin.yaw);
  out += buf;
  out += "negate: " + std::to_string(meta.negate) + "\n";
  std::snprintf(buf, sizeof(buf), "occupied_thresh: %.17g\n", meta.occupied_thresh);
  out += buf;
  std::snprintf(buf, sizeof(buf), "free_thresh: %.17g\n", meta.free_thresh);
  out += buf;
  return out;
}

/// Decode a binary PGM (P5, maxval 255) into a trinary grid.
///
/// Pixel value v maps to occupancy probability p = (255-v)/255 (or v/255 when
/// negate is set); p > occupied_thresh is occupied, p < free_thresh is free,
/// anything between is unknown. Image row 0 is the TOP of the map, so it
/// lands in grid row height-1.
inline OccupancyGrid load_occupancy_map(const MapMetadata& meta,
                                        std::span<const std::uint8_t> image_bytes,
                                        std::string frame = "map") {
  const std::string_view text(reinterpret_cast<const char*>(image_bytes.data()),
                              image_bytes.size());
  if (text.size() < 2 || text[0] != 'P' || text[1] != '5') {
    throw BadMagic("PGM: expected magic P5");
  }
  // Header tokens (width, height, maxval) with '#' comments allowed between.
  std::size_t pos = 2;
  std::uint64_t header_values[3] = {0, 0, 0};
  for (int needed = 0; needed < 3;) {
    while (pos < text.size() &&
           (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' || text[pos] == '\r')) {
      ++pos;
    }
    if (pos < text.size() && text[pos] == '#') {
      while (pos < text.size() && text[pos] != '\n') ++pos;
      continue;
    }
    std::size_t start = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == start) throw DimensionMismatch("PGM: missing header value");
    const std::string_view token = text.substr(start, pos - start);
    std::uint64_t v = 0;
    std::from_chars(token.data(), token.data() + token.size(), v);
    header_values[needed++] = v;
  }
  if (pos >= text.size()) throw DimensionMismatch("PGM: missing payload");
  ++pos;  // single whitespace byte after maxval

  const std::uint64_t width = header_values[0];
  const std::uint64_t height = header_values[1];
  if (header_values[2] != 255) throw MaxvalUnsupported("PGM: maxval must be 255");
  if (image_bytes.size() - pos < width * height) {
    throw DimensionMismatch("PGM: payload smaller than width x height");
  }

  OccupancyGrid grid(width, height, meta.resolution, meta.origin, CellState::unknown,
                     std::move(frame));
  const std::uint8_t* payload = image_bytes.data() + pos;
  for (std::uint64_t image_row = 0; image_row < height; ++image_row) {
    const std::uint64_t grid_row = height - 1 - image_row;
    for (std::uint64_t col = 0; col < width; ++col) {
      const std::uint8_t v = payload[image_row * width + col];
      const double p = meta.negate ? static_cast<double>(v) / 255.0
                                   : static_cast<double>(255 - v) / 255.0;
      CellState state = CellState::unknown;
      if (p > meta.occupied_thresh) {
        state = CellState::occupied;
      } else if (p < meta.free_thresh) {
        state = CellState::free;
      }
      grid.set(col, grid_row, state);
    }
  }
  return grid;
}

struct SavedMap {
  MapMetadata metadata;
  std::vector<std::uint8_t> image;  ///< binary PGM bytes
};

/// Encode a grid as PGM + metadata such that load_occupancy_map inverts it
/// exactly on cell states: occupied -> 0, free -> 255, unknown -> 205.
inline SavedMap save_occupancy_map(const OccupancyGrid& grid, std::string image_path = "map.pgm") {
  SavedMap out;
  out.metadata.image_path = std::move(image_path);
  out.metadata.resolution = grid.resolution();
  out.metadata.origin = grid.origin();
  out.metadata.negate = 0;
  out.metadata.occupied_thresh = 0.65;
  out.metadata.free_thresh = 0.196;

  const std::string header =
      "P5\n" + std::to_string(grid.width()) + " " + std::to_string(grid.height()) + "\n255\n";
  out.image.assign(header.begin(), header.end());
  out.image.reserve(out.image.size() + grid.cell_count());
  for (std::size_t image_row = 0; image_row < grid.height(); ++image_row) {
    const std::size_t grid_row = grid.height() - 1 - image_row;
    for (std::size_t col = 0; col < grid.width(); ++col) {
      std::uint8_t v = 205;
      switch (grid.at(col, grid_row)) {
        case CellState::occupied: v = 0; break;
        case CellState::free: v = 255; break;
        case CellState::unknown: v = 205; break;
      }
      out.image.push_back(v);
    }
  }
  return out;
}

/// Load metadata + image from a metadata file; the image path resolves
/// relative to the metadata file's directory.
inline OccupancyGrid load_occupancy_map_file(const std::filesystem::path& metadata_path,
                                             std::string frame = "map") {
  std::ifstream meta_in(metadata_path);
  if (!meta_in) throw IoError("cannot open map metadata: " + metadata_path.string());
  std::string text((std::istreambuf_iterator<char>(meta_in)), std::istreambuf_iterator<char>());
  const MapMetadata meta = parse_map_metadata(text);
  if (meta.image_path.empty()) throw ConfigError("map metadata: missing image key");

  std::filesystem::path image_path(meta.image_path);
  if (image_path.is_relative()) image_path = metadata_path.parent_path() / image_path;
  std::ifstream image_in(image_path, std::ios::binary | std::ios::ate);
  if (!image_in) throw IoError("cannot open map image: " + image_path.string());
  const std::streamsize size = image_in.tellg();
  image_in.seekg(0);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  if (size > 0 && !image_in.read(reinterpret_cast<char*>(bytes.data()), size)) {
    throw IoError("cannot read map image: " + image_path.string());
  }
  return load_occupancy_map(meta, bytes, std::move(frame));
}

/// Write metadata + PGM next to each other; the image shares the metadata
/// file's stem.
inline void save_occupancy_map_files(const OccupancyGrid& grid,
                                     const std::filesystem::path& metadata_path) {
  std::filesystem::path image_path = metadata_path;
  image_path.replace_extension(".pgm");
  SavedMap saved = save_occupancy_map(grid, image_path.filename().string());

  std::ofstream meta_out(metadata_path, std::ios::trunc);
  if (!meta_out) throw UnwritablePath("cannot write map metadata: " + metadata_path.string());
  meta_out << write_map_metadata(saved.metadata);

  std::ofstream image_out(image_path, std::ios::binary | std::ios::trunc);
  if (!image_out) throw UnwritablePath("cannot write map image: " + image_path.string());
  image_out.write(reinterpret_cast<const char*>(saved.image.data()),
                  static_cast<std::streamsize>(saved.image.size()));
}

}  // namespace obmap

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

#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "obmap/core.hpp"
#include "obmap/errors.hpp"

namespace obmap {

enum class PcdDataMode { ascii, binary };
enum class PcdScalarKind { floating, signed_int, unsigned_int };

/// Parsed PCD v0.7 header. Extra fields beyond x/y/z are carried in the
/// header so callers can skip them; only x/y/z are materialized into points.
struct PcdHeader {
  std::string version = "0.7";
  std::vector<std::string> fields;
  std::vector<std::uint32_t> sizes;      ///< bytes per element
  std::vector<PcdScalarKind> types;
  std::vector<std::uint32_t> counts;     ///< elements per field
  std::uint64_t width = 0;
  std::uint64_t height = 0;
  std::array<double, 7> viewpoint{0, 0, 0, 1, 0, 0, 0};
  std::uint64_t points = 0;
  PcdDataMode data_mode = PcdDataMode::ascii;

  std::size_t point_stride() const {
    std::size_t stride = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) stride += sizes[i] * counts[i];
    return stride;
  }
};

struct PcdWriteOptions {
  PcdDataMode mode = PcdDataMode::binary;
  /// Binary mode stores 8-byte reals by default so a write/read round trip is
  /// bit-exact; set false for the conventional 4-byte layout.
  bool full_width = true;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::uint64_t parse_u64(std::string_view token, const char* what) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw MalformedHeader(std::string("PCD header: bad integer for ") + what);
  }
  return value;
}

inline double parse_double(std::string_view token, const char* what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw MalformedHeader(std::string("PCD header: bad real for ") + what);
  }
  return value;
}

}  // namespace detail

/// Parse the header of a PCD byte buffer. On return `body_offset` is the
/// index of the first payload byte (the byte after the DATA line's newline).
inline PcdHeader parse_pcd_header(std::span<const std::uint8_t> bytes, std::size_t& body_offset) {
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  PcdHeader header;
  bool saw_fields = false, saw_size = false, saw_type = false, saw_count = false;
  bool saw_width = false, saw_height = false, saw_points = false, saw_data = false;

  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;

    const auto tokens = detail::split_ws(line);
    if (tokens.empty() || tokens[0].front() == '#') continue;
    const std::string_view key = tokens[0];
    const auto values = std::span<const std::string_view>(tokens).subspan(1);

    if (key == "VERSION") {
      if (values.size() != 1) throw MalformedHeader("PCD header: VERSION wants one value");
      header.version = std::string(values[0]);
    } else if (key == "FIELDS") {
      header.fields.assign(values.begin(), values.end());
      saw_fields = true;
    } else if (key == "SIZE") {
      header.sizes.clear();
      for (const auto v : values) {
        header.sizes.push_back(static_cast<std::uint32_t>(detail::parse_u64(v, "SIZE")));
      }
      saw_size = true;
    } else if (key == "TYPE") {
      header.types.clear();
      for (const auto v : values) {
        if (v == "F") {
          header.types.push_back(PcdScalarKind::floating);
        } else if (v == "I") {
          header.types.push_back(PcdScalarKind::signed_int);
        } else if (v == "U") {
          header.types.push_back(PcdScalarKind::unsigned_int);
        } else {
          throw MalformedHeader("PCD header: unknown TYPE letter");
        }
      }
      saw_type = true;
    } else if (key == "COUNT") {
      header.counts.clear();
      for (const auto v : values) {
        header.counts.push_back(static_cast<std::uint32_t>(detail::parse_u64(v, "COUNT")));
      }
      saw_count = true;
    } else if (key == "WIDTH") {
      if (values.size() != 1) throw MalformedHeader("PCD header: WIDTH wants one value");
      header.width = detail::parse_u64(values[0], "WIDTH");
      saw_width = true;
    } else if (key == "HEIGHT") {
      if (values.size() != 1) throw MalformedHeader("PCD header: HEIGHT wants one value");
      header.height = detail::parse_u64(values[0], "HEIGHT");
      saw_height = true;
    } else if (key == "VIEWPOINT") {
      if (values.size() != 7) throw MalformedHeader("PCD header: VIEWPOINT wants 7 values");
      for (std::size_t i = 0; i < 7; ++i) {
        header.viewpoint[i] = detail::parse_double(values[i], "VIEWPOINT");
      }
    } else if (key == "POINTS") {
      if (values.size() != 1) throw MalformedHeader("PCD header: POINTS wants one value");
      header.points = detail::parse_u64(values[0], "POINTS");
      saw_points = true;
    } else if (key == "DATA") {
      if (values.size() != 1) throw MalformedHeader("PCD header: DATA wants one value");
      if (values[0] == "ascii") {
        header.data_mode = PcdDataMode::ascii;
      } else if (values[0] == "binary") {
        header.data_mode = PcdDataMode::binary;
      } else if (values[0] == "binary_compressed") {
        throw UnsupportedDataMode("PCD: binary_compressed data is not supported");
      } else {
        throw MalformedHeader("PCD header: unknown DATA mode");
      }
      saw_data = true;
      body_offset = pos;
      break;
    }
    // Unknown keys are ignored.
  }

  if (!saw_data) throw MalformedHeader("PCD header: missing DATA line");
  if (!saw_fields || !saw_size || !saw_type) {
    throw MalformedHeader("PCD header: FIELDS, SIZE and TYPE are required");
  }
  if (!saw_count) header.counts.assign(header.fields.size(), 1);
  if (header.fields.size() != header.sizes.size() || header.fields.size() != header.types.size() ||
      header.fields.size() != header.counts.size()) {
    throw MalformedHeader("PCD header: FIELDS/SIZE/TYPE/COUNT lengths differ");
  }
  if (!saw_points) {
    if (!saw_width || !saw_height) {
      throw MalformedHeader("PCD header: POINTS or WIDTH+HEIGHT required");
    }
    header.points = header.width * header.height;
  } else if (!saw_width && !saw_height) {
    header.width = header.points;
    header.height = 1;
  }
  if (header.width * header.height != header.points) {
    throw MalformedHeader("PCD header: WIDTH x HEIGHT != POINTS");
  }
  return header;
}

/// Read a PCD buffer (ascii or binary) into a cloud. Fields beyond x/y/z are
/// skipped; x/y/z must be declared floating with 4- or 8-byte width.
inline PointCloud read_pcd(std::span<const std::uint8_t> bytes, std::string frame_id = "lidar",
                           std::uint64_t stamp = 0) {
  std::size_t body_offset = 0;
  const PcdHeader header = parse_pcd_header(bytes, body_offset);

  int xi = -1, yi = -1, zi = -1;
  for (std::size_t i = 0; i < header.fields.size(); ++i) {
    if (header.fields[i] == "x") xi = static_cast<int>(i);
    if (header.fields[i] == "y") yi = static_cast<int>(i);
    if (header.fields[i] == "z") zi = static_cast<int>(i);
  }
  if (xi < 0 || yi < 0 || zi < 0) throw MalformedHeader("PCD header: x, y, z fields required");
  for (const int idx : {xi, yi, zi}) {
    const auto i = static_cast<std::size_t>(idx);
    if (header.types[i] != PcdScalarKind::floating) {
      throw MalformedHeader("PCD header: x/y/z must be floating");
    }
    if (header.sizes[i] != 4 && header.sizes[i] != 8) {
      throw MalformedHeader("PCD header: x/y/z must be 4 or 8 bytes");
    }
    if (header.counts[i] != 1) throw MalformedHeader("PCD header: x/y/z must have COUNT 1");
  }

  PointCloud cloud(std::move(frame_id), stamp);
  cloud.reserve(header.points);
  const auto body = bytes.subspan(body_offset);

  if (header.data_mode == PcdDataMode::binary) {
    const std::size_t stride = header.point_stride();
    if (body.size() < header.points * stride) {
      throw TruncatedBody("PCD body: fewer bytes than POINTS promises");
    }
    std::array<std::size_t, 3> offsets{};
    for (std::size_t axis = 0; axis < 3; ++axis) {
      const auto target = static_cast<std::size_t>(axis == 0 ? xi : (axis == 1 ? yi : zi));
      std::size_t off = 0;
      for (std::size_t i = 0; i < target; ++i) off += header.sizes[i] * header.counts[i];
      offsets[axis] = off;
    }
    const auto read_real = [&](const std::uint8_t* base, std::size_t field) {
      if (header.sizes[field] == 8) {
        double v;
        std::memcpy(&v, base, 8);
        return v;
      }
      float v;
      std::memcpy(&v, base, 4);
      return static_cast<double>(v);
    };
    for (std::uint64_t p = 0; p < header.points; ++p) {
      const std::uint8_t* base = body.data() + p * stride;
      cloud.push_back({read_real(base + offsets[0], static_cast<std::size_t>(xi)),
                       read_real(base + offsets[1], static_cast<std::size_t>(yi)),
                       read_real(base + offsets[2], static_cast<std::size_t>(zi))});
    }
    return cloud;
  }

  // ascii
  const std::string_view body_text(reinterpret_cast<const char*>(body.data()), body.size());
  const std::size_t tokens_per_point =
      std::accumulate(header.counts.begin(), header.counts.end(), std::size_t{0});
  std::size_t pos = 0;
  const auto next_token = [&]() -> std::string_view {
    while (pos < body_text.size() && (body_text[pos] == ' ' || body_text[pos] == '\t' ||
                                      body_text[pos] == '\n' || body_text[pos] == '\r')) {
      ++pos;
    }
    std::size_t start = pos;
    while (pos < body_text.size() && body_text[pos] != ' ' && body_text[pos] != '\t' &&
           body_text[pos] != '\n' && body_text[pos] != '\r') {
      ++pos;
    }
    return body_text.substr(start, pos - start);
  };
  std::array<std::size_t, 3> token_index{};
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const auto target = static_cast<std::size_t>(axis == 0 ? xi : (axis == 1 ? yi : zi));
    std::size_t off = 0;
    for (std::size_t i = 0; i < target; ++i) off += header.counts[i];
    token_index[axis] = off;
  }
  for (std::uint64_t p = 0; p < header.points; ++p) {
    Point3 pt;
    for (std::size_t t = 0; t < tokens_per_point; ++t) {
      const std::string_view token = next_token();
      if (token.empty()) throw TruncatedBody("PCD body: fewer values than POINTS promises");
      if (t == token_index[0] || t == token_index[1] || t == token_index[2]) {
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc{} || ptr != token.data() + token.size()) {
          throw TruncatedBody("PCD body: unparseable coordinate");
        }
        if (t == token_index[0]) pt.x = value;
        if (t == token_index[1]) pt.y = value;
        if (t == token_index[2]) pt.z = value;
      }
    }
    cloud.push_back(pt);
  }
  return cloud;
}

/// Serialize a cloud with fields x y z. Binary payloads round-trip bit-exact
/// when full_width is on; ascii uses 9 significant digits.
inline std::vector<std::uint8_t> write_pcd(const PointCloud& cloud,
                                           const PcdWriteOptions& options = {}) {
  const bool binary = options.mode == PcdDataMode::binary;
  const std::uint32_t size = (binary && options.full_width) ? 8 : 4;
  std::string header;
  header += "# .PCD v0.7 - Point Cloud Data file format\n";
  header += "VERSION 0.7\n";
  header += "FIELDS x y z\n";
  header += "SIZE " + std::to_string(size) + " " + std::to_string(size) + " " +
            std::to_string(size) + "\n";
  header += "TYPE F F F\n";
  header += "COUNT 1 1 1\n";
  header += "WIDTH " + std::to_string(cloud.size()) + "\n";
  header += "HEIGHT 1\n";
  header += "VIEWPOINT 0 0 0 1 0 0 0\n";
  header += "POINTS " + std::to_string(cloud.size()) + "\n";
  header += binary ? "DATA binary\n" : "DATA ascii\n";

  std::vector<std::uint8_t> out(header.begin(), header.end());
  if (binary) {
    out.reserve(out.size() + cloud.size() * 3 * size);
    for (const Point3& p : cloud) {
      for (const double v : {p.x, p.y, p.z}) {
        if (size == 8) {
          std::uint8_t raw[8];
          std::memcpy(raw, &v, 8);
          out.insert(out.end(), raw, raw + 8);
        } else {
          const float f = static_cast<float>(v);
          std::uint8_t raw[4];
          std::memcpy(raw, &f, 4);
          out.insert(out.end(), raw, raw + 4);
        }
      }
    }
  } else {
    char line[128];
    for (const Point3& p : cloud) {
      const int len = std::snprintf(line, sizeof(line), "%.9g %.9g %.9g\n", p.x, p.y, p.z);
      out.insert(out.end(), line, line + len);
    }
  }
  return out;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open file: " + path.string());
  const std::streamsize size = in.tellg();
  in.seekg(0);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), size)) {
    throw IoError("cannot read file: " + path.string());
  }
  return bytes;
}

inline PointCloud read_pcd_file(const std::filesystem::path& path, std::string frame_id = "lidar",
                                std::uint64_t stamp = 0) {
  return read_pcd(read_file_bytes(path), std::move(frame_id), stamp);
}

inline void write_pcd_file(const std::filesystem::path& path, const PointCloud& cloud,
                           const PcdWriteOptions& options = {}) {
  const std::vector<std::uint8_t> bytes = write_pcd(cloud, options);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UnwritablePath("cannot write PCD file: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw UnwritablePath("short write to PCD file: " + path.string());
}

}  // namespace obmap

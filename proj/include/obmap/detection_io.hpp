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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "obmap/core.hpp"
#include "obmap/errors.hpp"

namespace obmap {

inline constexpr std::uint32_t kDetectionSchemaVersion = 1;

/// One detection as persisted: the box plus its frame stamp.
struct DetectionRecord {
  std::uint32_t schema_version = kDetectionSchemaVersion;
  std::uint64_t stamp = 0;  ///< nanoseconds since epoch
  Detection detection;

  friend bool operator==(const DetectionRecord& a, const DetectionRecord& b) {
    const Detection& x = a.detection;
    const Detection& y = b.detection;
    return a.schema_version == b.schema_version && a.stamp == b.stamp &&
           x.center() == y.center() && x.length() == y.length() && x.width() == y.width() &&
           x.height() == y.height() && x.yaw() == y.yaw() &&
           x.point_count() == y.point_count() && x.cluster_id() == y.cluster_id();
  }
};

/// Newline-delimited records, one JSON object per detection, stable field
/// order. Doubles are printed with round-trip precision, so parsing the
/// output reproduces the input exactly.
inline std::string write_detections(std::span<const DetectionRecord> records) {
  std::string out;
  for (const DetectionRecord& rec : records) {
    nlohmann::ordered_json j;
    j["schema_version"] = rec.schema_version;
    j["stamp"] = rec.stamp;
    j["cluster_id"] = rec.detection.cluster_id();
    j["center"] = {rec.detection.center().x, rec.detection.center().y, rec.detection.center().z};
    j["extents"] = {rec.detection.length(), rec.detection.width(), rec.detection.height()};
    j["yaw"] = rec.detection.yaw();
    j["point_count"] = rec.detection.point_count();
    out += j.dump();
    out += '\n';
  }
  return out;
}

inline std::vector<DetectionRecord> read_detections(std::string_view text) {
  std::vector<DetectionRecord> records;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      const auto center = j.at("center");
      const auto extents = j.at("extents");
      records.push_back(DetectionRecord{
          j.at("schema_version").get<std::uint32_t>(), j.at("stamp").get<std::uint64_t>(),
          Detection({center.at(0).get<double>(), center.at(1).get<double>(),
                     center.at(2).get<double>()},
                    extents.at(0).get<double>(), extents.at(1).get<double>(),
                    extents.at(2).get<double>(), j.at("yaw").get<double>(),
                    j.at("point_count").get<std::size_t>(),
                    j.at("cluster_id").get<std::uint32_t>())});
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(std::string("detection record: ") + e.what());
    }
  }
  return records;
}

}  // namespace obmap

// Copyright 2026 The rmot Authors
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

/// \file
/// \brief On-disk dataset layout.
///
/// One directory per run:
///   frames.jsonl         header line, then one sensor frame per line (no cloud)
///   gt.jsonl             header line, then one ground-truth frame per line
///   cloud_XXXXXX.xyz     "# rmot-cloud <version> <count>" then `x y z label` lines
///   scenario.json        generating config (optional)
#ifndef RMOT__SIM__DATASET_HPP_
#define RMOT__SIM__DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rmot/geometry.hpp"
#include "rmot/sim/frames.hpp"

namespace rmot::sim
{

inline constexpr int kDatasetVersion = 1;

struct DatasetHeader
{
  double frame_rate{10.0};
  CameraModel camera;
  std::int64_t frame_count{0};
};

struct Dataset
{
  DatasetHeader header;
  std::vector<SensorFrame> frames;
  std::vector<GroundTruthFrame> truth;
  std::optional<nlohmann::json> scenario;
};

void write_dataset(const std::filesystem::path & dir, const DatasetHeader & header,
                   std::span<const SensorFrame> frames, std::span<const GroundTruthFrame> truth,
                   const nlohmann::json * scenario = nullptr);

/// Throws Error(Io) for missing files and Error(Format) for malformed,
/// truncated or version-mismatched content.
Dataset read_dataset(const std::filesystem::path & dir, bool load_clouds = true);

DatasetHeader read_dataset_header(const std::filesystem::path & dir);

std::string cloud_file_name(std::int64_t index);
void write_cloud(const std::filesystem::path & file, std::span<const CloudPoint> cloud);
std::vector<CloudPoint> read_cloud(const std::filesystem::path & file);

nlohmann::json frame_to_json(const SensorFrame & f);
SensorFrame frame_from_json(const nlohmann::json & j);
nlohmann::json truth_to_json(const GroundTruthFrame & g);
GroundTruthFrame truth_from_json(const nlohmann::json & j);

nlohmann::json vec3_json(const Vec3 & v);
Vec3 vec3_from(const nlohmann::json & j);

/// Reads a whole text file; throws Error(Io).
std::string read_text_file(const std::filesystem::path & file);
void write_text_file(const std::filesystem::path & file, const std::string & text);

}  // namespace rmot::sim

#endif  // RMOT__SIM__DATASET_HPP_

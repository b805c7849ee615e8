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


#ifndef RMOT__APP__PIPELINE_HPP_
#define RMOT__APP__PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "rmot/map/mapper.hpp"
#include "rmot/predict/memory_bank.hpp"
#include "rmot/predict/predictor.hpp"
#include "rmot/sim/dataset.hpp"
#include "rmot/track/tracker.hpp"

namespace rmot::app
{

struct RunConfig
{
  track::TrackerConfig tracker;
  predict::PredictorConfig predictor;
  map::MapperParams mapper;
  bool predict_enabled{true};
  bool map_enabled{true};
  bool online_write{true};  // grow the bank from realized futures during the run
  std::vector<std::string> baselines;

  /// Defaults matched to a dataset: camera and frame rate from the header,
  /// measurement noise from the embedded scenario when present, and a track
  /// history long enough for prediction bookkeeping.
  static RunConfig for_dataset(const sim::DatasetHeader & header, const std::optional<nlohmann::json> & scenario);

  /// Applies a JSON override document. Unknown keys and wrong types throw
  /// Error(Config).
  void apply(const nlohmann::json & overrides);
  /// "fixed-gate", "kf-only" or "single-frame-removal".
  void apply_baseline(const std::string & name);

  void validate() const;
  nlohmann::json to_json() const;
};

struct StageTiming
{
  double tracking_ms{0.0};
  double prediction_ms{0.0};
  double mapping_ms{0.0};
  double total_ms{0.0};
};

struct TrackPrediction
{
  std::int64_t track_id{0};
  Vec3 position{Vec3::Zero()};  // track position when the prediction was made
  predict::PredictionResult result;
};

struct FrameOutput
{
  std::int64_t frame{0};
  double timestamp{0.0};
  std::vector<nlohmann::json> track_records;
  std::vector<TrackPrediction> predictions;
  std::optional<map::RemovalReport> removal;
  std::size_t memory_writes{0};
  StageTiming timing;
};

/// Per-frame tracking, prediction and mapping.
class Pipeline
{
public:
  Pipeline(RunConfig config, std::optional<predict::MemoryBank> bank = std::nullopt);

  const FrameOutput & step(const SensorFrame & frame);

  const RunConfig & config() const { return config_; }
  const track::Tracker & tracker() const { return tracker_; }
  const map::DynamicMapper & mapper() const { return mapper_; }
  const predict::MemoryBank & bank() const { return bank_; }
  const FrameOutput & last() const { return last_; }

private:
  RunConfig config_;
  track::Tracker tracker_;
  predict::Predictor predictor_;
  predict::MemoryBank bank_;
  predict::OnlineMemoryWriter writer_;
  map::DynamicMapper mapper_;
  FrameOutput last_;
};

/// Builds an empty bank with the predictor's dimensions.
predict::MemoryBank empty_bank(const predict::PredictorConfig & config);

struct RunSummary
{
  std::size_t frames{0};
  std::size_t track_records{0};
  std::size_t predictions{0};
  std::size_t map_points{0};
  std::size_t bank_entries{0};
  double mean_total_ms{0.0};

  nlohmann::json to_json() const;
};

/// Runs the pipeline over a dataset directory and writes tracks.jsonl,
/// predictions.jsonl, map.xyz, mapping_report.json, timing.json and
/// run_config.json into `out_dir`. `max_frames` < 0 runs every frame.
RunSummary run_dataset(const std::filesystem::path & dataset_dir, const std::filesystem::path & out_dir,
                       const nlohmann::json & overrides, const std::optional<std::filesystem::path> & membank,
                       long max_frames = -1);

struct SeedSummary
{
  std::size_t datasets{0};
  std::size_t windows{0};  // candidate (history, future) pairs seen
  std::size_t written{0};
  std::size_t bank_size{0};
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

/// Replays the tracker over each dataset and writes every uniformly spaced
/// (history, future) window of confirmed tracks, taking one every `stride`
/// frames per track.
SeedSummary seed_memory(const std::vector<std::filesystem::path> & datasets, predict::MemoryBank & bank,
                        const nlohmann::json & overrides, int stride = 1);

/// Seeds from in-memory frames; the building block of seed_memory.
std::size_t seed_from_frames(std::span<const SensorFrame> frames, const RunConfig & config,
                             predict::MemoryBank & bank, int stride, std::size_t * windows = nullptr);

/// Replays the dataset `repeat` times and reports per-stage latency
/// percentiles in milliseconds.
nlohmann::json bench_dataset(const std::filesystem::path & dataset_dir, const nlohmann::json & overrides, int repeat,
                             const std::optional<std::filesystem::path> & membank);

/// Percentile summary (p50, p90, p99, mean, max) of a sample.
nlohmann::json latency_summary(std::vector<double> samples);

}  // namespace rmot::app

#endif  // RMOT__APP__PIPELINE_HPP_

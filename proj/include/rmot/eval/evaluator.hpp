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


#ifndef RMOT__EVAL__EVALUATOR_HPP_
#define RMOT__EVAL__EVALUATOR_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rmot/eval/metrics.hpp"

namespace rmot::eval
{

struct EvalOptions
{
  MatcherParams matcher;
  double grid{0.2};           // map evaluation cell, m
  double prediction_gate{0.5};  // track-to-truth association for predictions, m
};

struct PredictionStats
{
  std::size_t events{0};     // predictions seen
  std::size_t evaluated{0};  // predictions with a full ground-truth future
  std::optional<double> ade;
  std::optional<double> fde;
  std::optional<double> fde_z;
};

struct EvalReport
{
  TrackingTotals tracking;
  std::optional<double> mota, motp, oca;
  PredictionStats prediction;
  std::optional<MapEvalCounts> map_counts;
  std::optional<double> pr, rr, f1;
  std::vector<FrameEvalCounts> per_frame;

  nlohmann::json to_json(bool per_frame_detail = true) const;
};

/// Incremental evaluation against simulator ground truth.
class RunEvaluator
{
public:
  RunEvaluator(std::span<const GroundTruthFrame> truth, EvalOptions options = {});

  /// Reported tracks for one frame; frames must be fed in increasing order.
  /// Throws Error(Format) for a frame that has no ground truth.
  void add_tracks(std::int64_t frame, std::span<const ReportedObject> reports);
  /// A predicted future made at `frame` by a track at `position`.
  void add_prediction(std::int64_t frame, const Vec3 & position, std::span<const Vec3> points);
  /// Labeled cloud for map truth.
  void add_cloud(std::span<const CloudPoint> cloud, const Pose & ego);

  const PredictionEvalSet & prediction_set() const { return samples_; }
  const MapTruth & map_truth() const { return map_truth_; }

  /// Final metrics; `map_points` enables the map section.
  EvalReport finish(const std::vector<Vec3> * map_points) const;

private:
  const GroundTruthFrame * truth_at(std::int64_t frame) const;

  std::span<const GroundTruthFrame> truth_;
  EvalOptions options_;
  GtMatcher matcher_;
  std::vector<FrameEvalCounts> frames_;
  PredictionEvalSet samples_;
  std::size_t prediction_events_{0};
  MapTruth map_truth_;
  bool has_cloud_{false};
};

/// Reads a run directory (tracks.jsonl, predictions.jsonl, map.xyz) and the
/// dataset it came from. Missing run files skip their section; a missing
/// ground truth is an error.
EvalReport evaluate_run(const std::filesystem::path & run_dir, const std::filesystem::path & dataset_dir,
                        const EvalOptions & options = {});

/// One-row CSV summary with a header line.
std::string summary_csv(const EvalReport & r, const std::string & label);
/// Human-readable table: tracking, prediction and map blocks.
std::string summary_table(const EvalReport & r, const std::string & label);
/// Side-by-side table of two reports with a delta column (b - a).
std::string comparison_table(const EvalReport & a, const std::string & label_a, const EvalReport & b,
                             const std::string & label_b);
nlohmann::json comparison_json(const EvalReport & a, const EvalReport & b);

}  // namespace rmot::eval

#endif  // RMOT__EVAL__EVALUATOR_HPP_

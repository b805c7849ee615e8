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


#ifndef RMOT__PREDICT__PREDICTOR_HPP_
#define RMOT__PREDICT__PREDICTOR_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rmot/predict/memory_bank.hpp"
#include "rmot/predict/trajectory.hpp"
#include "rmot/track/tracker.hpp"

namespace rmot::predict
{

struct PredictorConfig
{
  int history{20};
  int future{30};
  double frame_rate{10.0};
  int top_k{5};
  double indicator_horizon{1.0};  // s
  double write_threshold{0.5};    // m
  std::size_t capacity{5000};
  bool kalman_only{false};
  bool freeze_z{false};  // planar ablation: hold z at the current height

  void validate() const;
  int indicator_points() const;
};

enum class PredictionSource
{
  Memory,
  Kalman,
};

std::string_view source_name(PredictionSource s);

struct PredictionResult
{
  std::vector<Vec3> points;  // world, `future` points
  PredictionSource source{PredictionSource::Kalman};
  std::string fallback_reason;  // empty for memory predictions

  // Memory path diagnostics.
  std::vector<RetrievedCandidate> retrieved;
  std::vector<std::vector<Vec3>> candidates;  // world frame
  std::vector<double> indicator_errors;
  int selected{-1};
  std::vector<Vec3> indicator;

  // Query used for retrieval; kept for the online write policy.
  std::optional<FeatureVector> feature;
  Anchor anchor;
};

/// Constant-velocity rollout: `steps` positions spaced by `dt`.
std::vector<Vec3> kf_rollout(const track::KalmanCV & kf, double dt, int steps);

/// Rollout over `horizon` seconds at `frame_rate` (10 points for 1 s at 10 Hz).
std::vector<Vec3> kf_short_horizon(const track::KalmanCV & kf, double frame_rate, double horizon = 1.0);

struct Selection
{
  std::size_t index{0};
  std::vector<double> errors;
};

/// Candidate whose first n points have the smallest mean distance to the
/// n-point indicator; ties go to the earlier candidate.
Selection select_best(std::span<const std::vector<Vec3>> candidates, std::span<const Vec3> indicator);

/// The last `n` history positions if they are uniformly spaced at
/// 1 / frame_rate (within 1e-6 s); otherwise empty.
std::vector<Vec3> history_window(const track::TrackInstance & track, int n, double frame_rate, int skip_last = 0);

class Predictor
{
public:
  explicit Predictor(PredictorConfig config,
                     std::shared_ptr<const HistoryEncoder> encoder = reference_encoder());

  const PredictorConfig & config() const { return config_; }
  const HistoryEncoder & encoder() const { return *encoder_; }
  int feature_dim() const { return encoder_->feature_dim(config_.history); }

  /// Never throws for degenerate inputs; falls back to the Kalman rollout.
  /// Throws Error(Format) if the bank was built with other dimensions.
  PredictionResult predict(const track::TrackInstance & track, const MemoryBank * bank) const;

  /// Checks that `bank` matches this predictor's dimensions.
  void check_bank(const MemoryBank & bank) const;

private:
  PredictionResult kalman_fallback(const track::TrackInstance & track, std::string reason) const;

  PredictorConfig config_;
  std::shared_ptr<const HistoryEncoder> encoder_;
};

/// Write-on-surprise policy: each memory prediction is compared with the
/// track's realized positions once `future` further frames have elapsed.
class OnlineMemoryWriter
{
public:
  explicit OnlineMemoryWriter(const PredictorConfig & config) : config_(config) {}

  void record(std::int64_t frame, std::int64_t track_id, const PredictionResult & result);

  /// Resolves predictions made `future` frames before `frame`. Returns the
  /// number of bank writes.
  std::size_t resolve(std::int64_t frame, std::span<const track::TrackInstance> tracks, MemoryBank & bank);

  std::size_t pending() const { return pending_.size(); }

private:
  struct Pending
  {
    std::int64_t frame;
    std::int64_t track_id;
    FeatureVector feature;
    Anchor anchor;
    std::vector<Vec3> predicted;
  };

  PredictorConfig config_;
  std::vector<Pending> pending_;
};

/// One `predictions.jsonl` record.
nlohmann::json prediction_record(std::int64_t frame, std::int64_t track_id, const PredictionResult & result);

}  // namespace rmot::predict

#endif  // RMOT__PREDICT__PREDICTOR_HPP_

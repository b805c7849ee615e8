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


#include "rmot/predict/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "rmot/error.hpp"
#include "rmot/track/kalman.hpp"

namespace rmot::predict
{

void PredictorConfig::validate() const
{
  if (history < 2) fail(ErrorCode::Config, "predictor history must be >= 2");
  if (future < 1) fail(ErrorCode::Config, "predictor future must be >= 1");
  if (!(frame_rate > 0.0)) fail(ErrorCode::Config, "predictor frame_rate must be > 0");
  if (top_k < 1) fail(ErrorCode::Config, "top_k must be >= 1");
  if (!(indicator_horizon > 0.0)) fail(ErrorCode::Config, "indicator_horizon must be > 0");
  if (!(write_threshold >= 0.0)) fail(ErrorCode::Config, "write_threshold must be >= 0");
  if (capacity < 1) fail(ErrorCode::Config, "memory capacity must be >= 1");
}

int PredictorConfig::indicator_points() const
{
  return std::max(1, static_cast<int>(std::lround(indicator_horizon * frame_rate)));
}

std::string_view source_name(PredictionSource s)
{
  return s == PredictionSource::Memory ? "memory" : "kalman";
}

std::vector<Vec3> kf_rollout(const track::KalmanCV & kf, double dt, int steps)
{
  if (!(dt > 0.0)) fail(ErrorCode::InvalidArgument, "rollout step must be > 0");
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(std::max(steps, 0)));
  const Vec3 p = kf.position();
  const Vec3 v = kf.velocity();
  for (int k = 1; k <= steps; ++k) out.push_back(p + v * (k * dt));
  return out;
}

std::vector<Vec3> kf_short_horizon(const track::KalmanCV & kf, double frame_rate, double horizon)
{
  if (!(frame_rate > 0.0) || !(horizon > 0.0)) fail(ErrorCode::InvalidArgument, "horizon and rate must be > 0");
  const int n = std::max(1, static_cast<int>(std::lround(horizon * frame_rate)));
  return kf_rollout(kf, 1.0 / frame_rate, n);
}

Selection select_best(std::span<const std::vector<Vec3>> candidates, std::span<const Vec3> indicator)
{
  if (candidates.empty()) fail(ErrorCode::EmptyInput, "select_best needs at least one candidate");
  if (indicator.empty()) fail(ErrorCode::EmptyInput, "select_best needs a non-empty indicator");
  Selection s;
  s.errors.reserve(candidates.size());
  double best = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].size() < indicator.size()) {
      fail(ErrorCode::InvalidArgument, "candidate is shorter than the indicator");
    }
    const double e = mean_distance(std::span<const Vec3>(candidates[i]).first(indicator.size()), indicator);
    s.errors.push_back(e);
    if (i == 0 || e < best) {
      best = e;
      s.index = i;
    }
  }
  return s;
}

std::vector<Vec3> history_window(const track::TrackInstance & track, int n, double frame_rate, int skip_last)
{
  const auto & h = track.history;
  if (n < 1 || skip_last < 0 || h.size() < static_cast<std::size_t>(n + skip_last)) return {};
  const std::size_t end = h.size() - static_cast<std::size_t>(skip_last);
  const std::size_t begin = end - static_cast<std::size_t>(n);
  const double dt = 1.0 / frame_rate;
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin && std::abs(h[i].t - h[i - 1].t - dt) > 1e-6) return {};
    out.push_back(h[i].p);
  }
  return out;
}

Predictor::Predictor(PredictorConfig config, std::shared_ptr<const HistoryEncoder> encoder)
: config_(config), encoder_(std::move(encoder))
{
  config_.validate();
  if (!encoder_) fail(ErrorCode::Config, "predictor needs an encoder");
}

void Predictor::check_bank(const MemoryBank & bank) const
{
  if (bank.feature_dim() != feature_dim() || bank.history() != config_.history || bank.future() != config_.future) {
    fail(ErrorCode::Format, "memory bank dimensions (dim " + std::to_string(bank.feature_dim()) + ", H " +
                              std::to_string(bank.history()) + ", F " + std::to_string(bank.future()) +
                              ") do not match the predictor (dim " + std::to_string(feature_dim()) + ", H " +
                              std::to_string(config_.history) + ", F " + std::to_string(config_.future) + ")");
  }
}

namespace
{
void flatten_z(std::vector<Vec3> & pts, double z)
{
  for (auto & p : pts) p.z() = z;
}
}  // namespace

PredictionResult Predictor::kalman_fallback(const track::TrackInstance & track, std::string reason) const
{
  PredictionResult r;
  r.source = PredictionSource::Kalman;
  r.fallback_reason = std::move(reason);
  r.points = kf_rollout(track.kf, 1.0 / config_.frame_rate, config_.future);
  if (config_.freeze_z) flatten_z(r.points, track.position.z());
  return r;
}

PredictionResult Predictor::predict(const track::TrackInstance & track, const MemoryBank * bank) const
{
  if (bank) check_bank(*bank);
  if (config_.kalman_only) return kalman_fallback(track, "kalman-only");
  const std::vector<Vec3> window = history_window(track, config_.history, config_.frame_rate);
  if (window.empty()) return kalman_fallback(track, "short history");

  CanonicalWindow canon;
  try {
    canon = normalize_trajectory(window);
  } catch (const Error & e) {
    if (e.code() != ErrorCode::DegenerateHeading) throw;
    return kalman_fallback(track, "degenerate heading");
  }
  FeatureVector h = encoder_->encode(canon.points);
  if (h.norm() == 0.0 || !h.allFinite()) return kalman_fallback(track, "zero feature");

  if (!bank || bank->empty()) {
    PredictionResult r = kalman_fallback(track, "empty bank");
    r.feature = std::move(h);
    r.anchor = canon.anchor;
    return r;
  }

  PredictionResult r;
  r.source = PredictionSource::Memory;
  r.retrieved = bank->retrieve_topk(h, static_cast<std::size_t>(config_.top_k));
  r.candidates.reserve(r.retrieved.size());
  for (const auto & c : r.retrieved) {
    r.candidates.push_back(from_canonical(bank->entry(c.entry).future, canon.anchor));
  }
  r.indicator = kf_short_horizon(track.kf, config_.frame_rate, config_.indicator_horizon);
  if (static_cast<int>(r.indicator.size()) > config_.future) r.indicator.resize(static_cast<std::size_t>(config_.future));
  Selection sel = select_best(r.candidates, r.indicator);
  r.selected = static_cast<int>(sel.index);
  r.indicator_errors = std::move(sel.errors);
  r.points = r.candidates[sel.index];
  if (config_.freeze_z) flatten_z(r.points, track.position.z());
  r.feature = std::move(h);
  r.anchor = canon.anchor;
  return r;
}

void OnlineMemoryWriter::record(std::int64_t frame, std::int64_t track_id, const PredictionResult & result)
{
  if (!result.feature) return;
  pending_.push_back({frame, track_id, *result.feature, result.anchor, result.points});
}

std::size_t OnlineMemoryWriter::resolve(std::int64_t frame, std::span<const track::TrackInstance> tracks,
                                        MemoryBank & bank)
{
  std::size_t writes = 0;
  std::vector<Pending> keep;
  keep.reserve(pending_.size());
  for (auto & p : pending_) {
    const std::int64_t due = p.frame + config_.future;
    if (due > frame) {
      keep.push_back(std::move(p));
      continue;
    }
    if (due < frame) continue;
    const auto it = std::find_if(tracks.begin(), tracks.end(),
                                 [&](const track::TrackInstance & t) { return t.id == p.track_id; });
    if (it == tracks.end()) continue;
    const std::vector<Vec3> w = history_window(*it, config_.future + 1, config_.frame_rate);
    if (w.empty() || w.front() != p.anchor.origin) continue;
    const std::span<const Vec3> realized = std::span<const Vec3>(w).subspan(1);
    const double err = mean_distance(p.predicted, realized);
    if (bank.write(p.feature, to_canonical(realized, p.anchor), err)) ++writes;
  }
  pending_ = std::move(keep);
  return writes;
}

nlohmann::json prediction_record(std::int64_t frame, std::int64_t track_id, const PredictionResult & result)
{
  nlohmann::json pts = nlohmann::json::array();
  for (const auto & p : result.points) pts.push_back({p.x(), p.y(), p.z()});
  nlohmann::json j{
    {"frame", frame},
    {"id", track_id},
    {"source", source_name(result.source)},
    {"points", std::move(pts)},
    {"candidates", result.candidates.size()},
  };
  if (result.selected >= 0) j["selected"] = result.selected;
  return j;
}

}  // namespace rmot::predict

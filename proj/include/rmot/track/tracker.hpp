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

#ifndef RMOT__TRACK__TRACKER_HPP_
#define RMOT__TRACK__TRACKER_HPP_

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rmot/geometry.hpp"
#include "rmot/sim/frames.hpp"
#include "rmot/track/association.hpp"
#include "rmot/track/kalman.hpp"
#include "rmot/track/lifecycle.hpp"

namespace rmot::track
{

struct TimedPoint
{
  double t{0.0};
  Vec3 p{Vec3::Zero()};
};

struct TrackerConfig
{
  AdaptiveGateParams gate;
  LifecycleParams lifecycle;
  KalmanParams kalman;
  CameraModel camera;
  std::size_t history_capacity{64};

  void validate() const;
};

struct TrackInstance
{
  std::int64_t id{0};
  KalmanCV kf;
  Lifecycle life;
  std::array<int, kNumClasses> class_votes{};
  std::deque<TimedPoint> history;  // reported world positions, oldest first
  std::int64_t last_update_frame{0};
  Condition last_condition{Condition::NewInstance};
  Vec3 position{Vec3::Zero()};  // reported position at the latest frame
  Vec3 box_size{Vec3::Ones()};  // extent of the last matched detection
  double box_yaw{0.0};          // world yaw of the last matched detection

  /// Majority vote; ties go to the lowest class index.
  ObjectClass reported_class() const;
  bool measured() const
  {
    return last_condition == Condition::Matched || last_condition == Condition::MatchedNoImage ||
           last_condition == Condition::NewInstance;
  }
  /// World-frame box around the reported position.
  OrientedBox3 box() const;
};

/// Per-frame multi-object tracker. Frames must arrive with strictly
/// increasing timestamps.
class Tracker
{
public:
  explicit Tracker(TrackerConfig config);

  /// Runs one frame and returns the surviving tracks (all phases).
  const std::vector<TrackInstance> & step(const SensorFrame & frame);

  const std::vector<TrackInstance> & tracks() const { return tracks_; }
  const AssociationOutcome & last_outcome() const { return outcome_; }
  const std::vector<std::int64_t> & deleted_last_step() const { return deleted_; }
  const TrackerConfig & config() const { return config_; }
  std::optional<double> last_timestamp() const { return last_t_; }

private:
  TrackerConfig config_;
  std::vector<TrackInstance> tracks_;
  AssociationOutcome outcome_;
  std::vector<std::int64_t> deleted_;
  std::optional<double> last_t_;
  std::int64_t next_id_{0};
};

/// One `tracks.jsonl` record.
nlohmann::json track_record(std::int64_t frame, double t, const TrackInstance & track);

}  // namespace rmot::track

#endif  // RMOT__TRACK__TRACKER_HPP_

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

#include "rmot/track/tracker.hpp"

#include <algorithm>
#include <utility>

#include "rmot/error.hpp"

namespace rmot::track
{

void TrackerConfig::validate() const
{
  gate.validate();
  lifecycle.validate();
  camera.validate();
  if (!(kalman.meas_sigma >= 0.0)) fail(ErrorCode::Config, "meas_sigma must be >= 0");
  if (!(kalman.accel_noise > 0.0)) fail(ErrorCode::Config, "accel_noise must be > 0");
  if (!(kalman.accel_noise_z > 0.0)) fail(ErrorCode::Config, "accel_noise_z must be > 0");
  if (!(kalman.init_pos_sigma >= 0.0) || !(kalman.init_vel_sigma > 0.0)) {
    fail(ErrorCode::Config, "initial sigmas must be positive");
  }
  if (history_capacity < 2) fail(ErrorCode::Config, "history_capacity must be >= 2");
}

ObjectClass TrackInstance::reported_class() const
{
  int best = 0;
  for (int c = 1; c < kNumClasses; ++c) {
    if (class_votes[c] > class_votes[best]) best = c;
  }
  return static_cast<ObjectClass>(best);
}

OrientedBox3 TrackInstance::box() const
{
  OrientedBox3 b;
  b.center = position;
  b.size = box_size;
  b.yaw = box_yaw;
  b.label = reported_class();
  return b;
}

Tracker::Tracker(TrackerConfig config) : config_(std::move(config)) { config_.validate(); }

const std::vector<TrackInstance> & Tracker::step(const SensorFrame & frame)
{
  if (last_t_ && !(frame.timestamp > *last_t_)) {
    fail(ErrorCode::OutOfOrder, "frame " + std::to_string(frame.index) +
                                  " timestamp is not after the previous frame");
  }
  const double dt = last_t_ ? frame.timestamp - *last_t_ : 0.0;
  last_t_ = frame.timestamp;
  deleted_.clear();

  std::vector<TrackPrediction> preds;
  preds.reserve(tracks_.size());
  for (auto & tr : tracks_) {
    if (dt > 0.0) tr.kf = kf_predict(tr.kf, dt);
    preds.push_back({tr.kf.position(), tr.kf.velocity()});
  }

  outcome_ = associate_frame(preds, frame.ego_pose, frame.detections3d, frame.detections2d,
                             config_.camera, config_.gate);

  const double ego_yaw = frame.ego_pose.yaw();
  std::vector<char> remove(tracks_.size(), 0);
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    TrackInstance & tr = tracks_[i];
    const Condition cond = outcome_.track_condition[i];
    tr.last_condition = cond;
    const int j = outcome_.track_measurement[i];
    if (j >= 0) {
      const OrientedBox3 & det = frame.detections3d[j];
      tr.kf = kf_update(tr.kf, transform_point(det.center, frame.ego_pose));
      tr.class_votes[static_cast<int>(det.label)] += 1;
      if (cond == Condition::Matched) {
        const int k = outcome_.pre_image.col_of(static_cast<int>(i));
        tr.class_votes[static_cast<int>(frame.detections2d[k].label)] += 1;
      }
      tr.box_size = det.size;
      tr.box_yaw = det.yaw + ego_yaw;
      tr.last_update_frame = frame.index;
    }
    tr.position = tr.kf.position();
    const LifecycleStep st = lifecycle_step(tr.life, cond, config_.lifecycle);
    tr.life = st.state;
    if (st.remove) {
      remove[i] = 1;
      deleted_.push_back(tr.id);
    }
  }

  std::vector<TrackInstance> next;
  next.reserve(tracks_.size() + outcome_.new_instances.size());
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    if (!remove[i]) next.push_back(std::move(tracks_[i]));
  }

  for (std::size_t n = 0; n < outcome_.new_instances.size(); ++n) {
    const OrientedBox3 & det = frame.detections3d[outcome_.new_instances[n]];
    const Detection2D & img = frame.detections2d[outcome_.new_instance_image[n]];
    TrackInstance tr;
    tr.id = next_id_++;
    const Vec3 z = transform_point(det.center, frame.ego_pose);
    tr.kf = KalmanCV::init(z, config_.kalman);
    tr.life.phase = config_.lifecycle.confirm_frames <= 1 ? Phase::Tracking : Phase::Birth;
    tr.life.hit_count = 1;
    tr.life.miss_count = 0;
    tr.class_votes[static_cast<int>(det.label)] += 1;
    tr.class_votes[static_cast<int>(img.label)] += 1;
    tr.last_update_frame = frame.index;
    tr.last_condition = Condition::NewInstance;
    tr.position = z;
    tr.box_size = det.size;
    tr.box_yaw = det.yaw + ego_yaw;
    next.push_back(std::move(tr));
  }

  for (auto & tr : next) {
    tr.history.push_back({frame.timestamp, tr.position});
    while (tr.history.size() > config_.history_capacity) tr.history.pop_front();
  }
  tracks_ = std::move(next);
  return tracks_;
}

nlohmann::json track_record(std::int64_t frame, double t, const TrackInstance & track)
{
  const Vec3 v = track.kf.velocity();
  return nlohmann::json{
    {"frame", frame},
    {"t", t},
    {"id", track.id},
    {"lifecycle", phase_name(track.life.phase)},
    {"class", class_name(track.reported_class())},
    {"p", {track.position.x(), track.position.y(), track.position.z()}},
    {"v", {v.x(), v.y(), v.z()}},
    {"cov_trace", track.kf.P.trace()},
    {"condition", condition_name(track.last_condition)},
    {"s", {track.box_size.x(), track.box_size.y(), track.box_size.z()}},
    {"yaw", track.box_yaw},
  };
}

}  // namespace rmot::track

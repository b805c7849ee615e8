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

#ifndef RMOT__TRACK__ASSOCIATION_HPP_
#define RMOT__TRACK__ASSOCIATION_HPP_

#include <span>
#include <string_view>
#include <vector>

#include "rmot/geometry.hpp"
#include "rmot/track/assignment.hpp"

namespace rmot::track
{

struct AdaptiveGateParams
{
  double a{0.2};            // s
  double b{0.5};            // m
  double pixel_gate{50.0};  // px

  /// Throws Error(Config) unless a >= 0, b > 0 and pixel_gate > 0.
  void validate() const;
};

/// theta = a * |(vx, vy)| + b
double adaptive_threshold(double vx, double vy, const AdaptiveGateParams & params);

enum class Condition
{
  NewInstance,  // detection pair not explained by any track
  Matched,      // all three pairings agree
  MatchedNoImage,  // 3D pairing holds, image agreement does not
  ImageOnly,    // only the image pairing holds; no 3D measurement
  Miss,         // matched nowhere
};

std::string_view condition_name(Condition c);

/// Predicted state of one track at the current frame time (world frame).
struct TrackPrediction
{
  Vec3 position{Vec3::Zero()};
  Vec3 velocity{Vec3::Zero()};
};

struct AssociationOutcome
{
  AssignmentResult pre_lidar;  // rows: tracks, cols: det3d
  AssignmentResult pre_image;  // rows: tracks, cols: det2d
  AssignmentResult lidar_image;  // rows: det3d, cols: det2d

  std::vector<Condition> track_condition;  // per track
  std::vector<int> track_measurement;      // det3d index per track, or -1
  std::vector<int> new_instances;          // det3d indices
  std::vector<int> new_instance_image;     // det2d index paired with each new instance
  std::vector<int> unmatched_det3d;        // neither a measurement nor a new instance
  std::vector<int> unmatched_det2d;
  std::vector<int> unmatched_tracks;       // tracks in Miss
};

/// Builds the three gated cost matrices, solves each independently and
/// classifies every track and detection.
///
/// `tracks` are predictions in the world frame; `det3d` are in the LiDAR
/// frame; `ego` maps LiDAR to world.
AssociationOutcome associate_frame(std::span<const TrackPrediction> tracks, const Pose & ego,
                                   std::span<const OrientedBox3> det3d,
                                   std::span<const Detection2D> det2d, const CameraModel & cam,
                                   const AdaptiveGateParams & gate);

}  // namespace rmot::track

#endif  // RMOT__TRACK__ASSOCIATION_HPP_

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

#ifndef RMOT__SIM__FRAMES_HPP_
#define RMOT__SIM__FRAMES_HPP_

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "rmot/geometry.hpp"

namespace rmot
{

inline constexpr std::int32_t kStaticLabel = -1;

/// LiDAR-frame point with its truth label: kStaticLabel or the agent id.
/// The label exists for evaluation only; the pipeline never reads it.
struct CloudPoint
{
  Eigen::Vector3f p{Eigen::Vector3f::Zero()};
  std::int32_t label{kStaticLabel};

  bool operator==(const CloudPoint & o) const { return p == o.p && label == o.label; }
};

struct SensorFrame
{
  std::int64_t index{0};
  double timestamp{0.0};
  Pose ego_pose;                            // world <- LiDAR
  std::vector<OrientedBox3> detections3d;   // LiDAR frame
  std::vector<Detection2D> detections2d;
  std::vector<CloudPoint> cloud;            // LiDAR frame
};

struct AgentTruth
{
  int id{0};
  ObjectClass cls{ObjectClass::Person};
  Vec3 position{Vec3::Zero()};  // world, box center
  Vec3 velocity{Vec3::Zero()};
  Vec3 size{Vec3::Ones()};
  double yaw{0.0};
  bool visible{false};  // inside the sensor FOV, range and image
};

struct GroundTruthFrame
{
  std::int64_t index{0};
  double timestamp{0.0};
  std::vector<AgentTruth> agents;
};

}  // namespace rmot

#endif  // RMOT__SIM__FRAMES_HPP_

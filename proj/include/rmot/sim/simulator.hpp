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

#ifndef RMOT__SIM__SIMULATOR_HPP_
#define RMOT__SIM__SIMULATOR_HPP_

#include <random>
#include <utility>
#include <vector>

#include "rmot/sim/frames.hpp"
#include "rmot/sim/scenario.hpp"
#include "rmot/sim/terrain.hpp"

namespace rmot::sim
{

/// Stateful frame generator. One RNG stream per scenario; identical configs
/// (including the seed) produce identical frame sequences.
class Simulator
{
public:
  /// Validates the config; throws Error(Config) when it is invalid.
  explicit Simulator(ScenarioConfig config);

  const ScenarioConfig & config() const { return config_; }
  const TerrainField & terrain() const { return terrain_; }
  int frame_count() const { return frame_count_; }
  bool done() const { return next_index_ >= frame_count_; }

  std::pair<SensorFrame, GroundTruthFrame> next();

  /// Ground-truth state of one agent at time t (visibility not evaluated).
  AgentTruth agent_state(const AgentSpec & spec, double t) const;
  Pose ego_pose(double t) const;

private:
  bool in_fov(const Vec3 & lidar_point) const;

  ScenarioConfig config_;
  TerrainField terrain_;
  std::vector<PathFollower> agent_paths_;
  PathFollower ego_path_;
  std::mt19937_64 rng_;
  int frame_count_{0};
  int next_index_{0};
};

struct SimulatedRun
{
  ScenarioConfig config;
  std::vector<SensorFrame> frames;
  std::vector<GroundTruthFrame> truth;
};

/// Runs the simulator to completion (or `max_frames` when >= 0).
SimulatedRun simulate(const ScenarioConfig & config, int max_frames = -1);

}  // namespace rmot::sim

#endif  // RMOT__SIM__SIMULATOR_HPP_

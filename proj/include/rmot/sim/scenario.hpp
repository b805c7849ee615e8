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
/// \brief Scenario description consumed by the simulator, and its JSON form.
///
/// Units: meters, seconds, radians in code; degrees only for `fov_deg`.
#ifndef RMOT__SIM__SCENARIO_HPP_
#define RMOT__SIM__SCENARIO_HPP_

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "rmot/geometry.hpp"
#include "rmot/sim/terrain.hpp"

namespace rmot::sim
{

/// Knot of a piecewise-linear speed profile.
struct SpeedKnot
{
  double t{0.0};      // s
  double speed{0.0};  // m/s
};

enum class PathMode
{
  Loop,  // closed polyline, wraps around
  Stop,  // halts at the final waypoint
};

struct PathSpec
{
  std::vector<Eigen::Vector2d> waypoints;
  PathMode mode{PathMode::Loop};
  std::vector<SpeedKnot> speed_profile;
  /// Profile repeats with this period when > 0.
  double profile_period{0.0};
  /// Time offset applied to the profile clock.
  double profile_phase{0.0};

  void validate(const char * what) const;
};

/// Arc-length parametrisation of a PathSpec. Pure function of time.
class PathFollower
{
public:
  explicit PathFollower(const PathSpec & spec);

  /// Speed at time t (m/s).
  double speed(double t) const;
  /// Arc length travelled along the path by time t (m), before wrapping.
  double distance(double t) const;
  /// Horizontal position and heading (rad) after travelling `s` meters.
  Eigen::Vector2d position_at_distance(double s, double * heading = nullptr) const;
  Eigen::Vector2d position(double t, double * heading = nullptr) const;
  double length() const { return total_; }

private:
  double profile_integral(double tau) const;  // ∫_0^tau v within one period
  double profile_speed(double tau) const;

  PathSpec spec_;
  std::vector<double> cumulative_;
  double total_{0.0};
};

struct AgentSpec
{
  int id{0};
  ObjectClass cls{ObjectClass::Person};
  PathSpec path;
  int spawn_frame{0};
  int despawn_frame{-1};  // exclusive; -1 = never

  bool alive(int frame) const
  {
    return frame >= spawn_frame && (despawn_frame < 0 || frame < despawn_frame);
  }
};

struct TreeSpec
{
  Eigen::Vector2d xy{Eigen::Vector2d::Zero()};
  double radius{0.2};
  double height{5.0};
};

struct EgoSpec
{
  PathSpec path;
  double yaw{0.0};  // used while the path has a single waypoint
  double sensor_height{1.2};
};

struct SensorParams
{
  double fov_deg{90.0};
  double max_range{40.0};
  double min_range{1.0};
  int static_points{5000};
  double agent_point_scale{20000.0};  // points ~ scale / range^2
  int agent_points_min{10};
  int agent_points_max{400};
  double tree_point_scale{4000.0};
};

struct NoiseParams
{
  double sigma3d{0.1};
  double sigma2d{3.0};
  double miss_prob{0.1};
  double miss_prob_2d{-1.0};  // < 0: same as miss_prob
  double false_rate{0.2};     // mean false 3D detections per frame
  double fp_2d_fraction{0.5}; // fraction of false 3D detections with a consistent 2D box
  double class_error_prob{0.0};

  double effective_miss_2d() const { return miss_prob_2d < 0.0 ? miss_prob : miss_prob_2d; }
};

struct ScenarioConfig
{
  std::uint64_t seed{1};
  double frame_rate{10.0};
  double duration{30.0};
  TerrainParams terrain;
  std::vector<TreeSpec> trees;
  std::vector<AgentSpec> agents;
  EgoSpec ego;
  SensorParams sensor;
  NoiseParams noise;
  CameraModel camera;

  int frame_count() const;
  /// Throws Error(Config) describing the first violated constraint.
  void validate() const;
};

/// Box extent used for each class.
Vec3 class_box_size(ObjectClass c);

ScenarioConfig scenario_from_json(const nlohmann::json & j);
nlohmann::json scenario_to_json(const ScenarioConfig & cfg);

nlohmann::json camera_to_json(const CameraModel & cam);
CameraModel camera_from_json(const nlohmann::json & j);

}  // namespace rmot::sim

#endif  // RMOT__SIM__SCENARIO_HPP_

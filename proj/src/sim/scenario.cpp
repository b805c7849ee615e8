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

#include "rmot/sim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "rmot/error.hpp"

namespace rmot::sim
{

using nlohmann::json;

void PathSpec::validate(const char * what) const
{
  if (waypoints.empty()) fail(ErrorCode::Config, std::string(what) + ": path needs at least one waypoint");
  for (const auto & w : waypoints) {
    if (!w.allFinite()) fail(ErrorCode::Config, std::string(what) + ": waypoint is not finite");
  }
  double prev_t = -1e300;
  for (const auto & k : speed_profile) {
    if (!(k.speed >= 0.0)) fail(ErrorCode::Config, std::string(what) + ": speeds must be >= 0");
    if (!(k.t >= prev_t)) fail(ErrorCode::Config, std::string(what) + ": speed knots must be sorted by time");
    prev_t = k.t;
  }
  if (profile_period < 0.0 || profile_phase < 0.0) {
    fail(ErrorCode::Config, std::string(what) + ": profile period and phase must be >= 0");
  }
}

PathFollower::PathFollower(const PathSpec & spec) : spec_(spec)
{
  cumulative_.push_back(0.0);
  const auto & w = spec_.waypoints;
  const size_t nseg = w.size() < 2 ? 0 : (spec_.mode == PathMode::Loop ? w.size() : w.size() - 1);
  for (size_t i = 0; i < nseg; ++i) {
    const auto & a = w[i];
    const auto & b = w[(i + 1) % w.size()];
    cumulative_.push_back(cumulative_.back() + (b - a).norm());
  }
  total_ = cumulative_.back();
}

double PathFollower::profile_speed(double tau) const
{
  const auto & k = spec_.speed_profile;
  if (k.empty()) return 0.0;
  if (tau <= k.front().t) return k.front().speed;
  if (tau >= k.back().t) return k.back().speed;
  auto it = std::upper_bound(k.begin(), k.end(), tau, [](double t, const SpeedKnot & kn) { return t < kn.t; });
  const auto & b = *it;
  const auto & a = *(it - 1);
  if (b.t == a.t) return b.speed;
  const double f = (tau - a.t) / (b.t - a.t);
  return a.speed + f * (b.speed - a.speed);
}

double PathFollower::profile_integral(double tau) const
{
  const auto & k = spec_.speed_profile;
  if (k.empty() || tau <= 0.0) return 0.0;
  double acc = 0.0;
  double t0 = 0.0;
  // Constant head before the first knot.
  if (k.front().t > 0.0) {
    const double end = std::min(tau, k.front().t);
    acc += k.front().speed * end;
    t0 = end;
    if (tau <= k.front().t) return acc;
  }
  for (size_t i = 0; i + 1 < k.size(); ++i) {
    const double a = std::max(k[i].t, t0);
    const double b = std::min(k[i + 1].t, tau);
    if (b <= a) continue;
    acc += 0.5 * (profile_speed(a) + profile_speed(b)) * (b - a);
  }
  const double tail_start = std::max(k.back().t, 0.0);
  if (tau > tail_start) acc += k.back().speed * (tau - tail_start);
  return acc;
}

double PathFollower::speed(double t) const
{
  double tau = t + spec_.profile_phase;
  if (spec_.profile_period > 0.0) tau = std::fmod(tau, spec_.profile_period);
  return profile_speed(tau);
}

double PathFollower::distance(double t) const
{
  auto cumulative = [this](double tau) {
    if (spec_.profile_period > 0.0) {
      const double p = spec_.profile_period;
      const double cycles = std::floor(tau / p);
      return cycles * profile_integral(p) + profile_integral(tau - cycles * p);
    }
    return profile_integral(tau);
  };
  return cumulative(t + spec_.profile_phase) - cumulative(spec_.profile_phase);
}

Eigen::Vector2d PathFollower::position_at_distance(double s, double * heading) const
{
  const auto & w = spec_.waypoints;
  if (w.size() < 2 || total_ <= 0.0) {
    if (heading) *heading = 0.0;
    return w.front();
  }
  if (spec_.mode == PathMode::Loop) {
    s = std::fmod(s, total_);
    if (s < 0.0) s += total_;
  } else {
    s = std::clamp(s, 0.0, total_);
  }
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  size_t seg = static_cast<size_t>(std::distance(cumulative_.begin(), it)) - 1;
  const size_t nseg = cumulative_.size() - 1;
  if (seg >= nseg) seg = nseg - 1;
  const auto & a = w[seg];
  const auto & b = w[(seg + 1) % w.size()];
  const double len = cumulative_[seg + 1] - cumulative_[seg];
  const double f = len > 0.0 ? (s - cumulative_[seg]) / len : 0.0;
  if (heading) *heading = std::atan2(b.y() - a.y(), b.x() - a.x());
  return a + f * (b - a);
}

Eigen::Vector2d PathFollower::position(double t, double * heading) const
{
  return position_at_distance(distance(t), heading);
}

int ScenarioConfig::frame_count() const
{
  return static_cast<int>(std::floor(duration * frame_rate + 1e-9));
}

Vec3 class_box_size(ObjectClass c)
{
  switch (c) {
    case ObjectClass::Person: return {0.6, 0.6, 1.7};
    case ObjectClass::Trolley: return {1.2, 0.8, 1.0};
    case ObjectClass::Vehicle: return {4.0, 1.8, 1.5};
  }
  return {0.6, 0.6, 1.7};
}

void ScenarioConfig::validate() const
{
  if (!(frame_rate > 0.0)) fail(ErrorCode::Config, "frame_rate must be positive");
  if (!(duration >= 0.0)) fail(ErrorCode::Config, "duration must be >= 0");
  terrain.validate();
  camera.validate();
  auto prob = [](double p, const char * name) {
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::Config, std::string("noise.") + name + " must be in [0, 1]");
  };
  prob(noise.miss_prob, "miss_prob");
  if (noise.miss_prob_2d >= 0.0) prob(noise.miss_prob_2d, "miss_prob_2d");
  prob(noise.fp_2d_fraction, "fp_2d_fraction");
  prob(noise.class_error_prob, "class_error_prob");
  if (!(noise.sigma3d >= 0.0 && noise.sigma2d >= 0.0)) fail(ErrorCode::Config, "noise sigmas must be >= 0");
  if (!(noise.false_rate >= 0.0)) fail(ErrorCode::Config, "noise.false_rate must be >= 0");
  if (!(sensor.fov_deg > 0.0 && sensor.fov_deg <= 360.0)) fail(ErrorCode::Config, "sensor.fov_deg must be in (0, 360]");
  if (!(sensor.min_range >= 0.0 && sensor.max_range > sensor.min_range)) {
    fail(ErrorCode::Config, "sensor ranges must satisfy 0 <= min_range < max_range");
  }
  if (sensor.static_points < 0 || sensor.agent_points_min < 0 || sensor.agent_points_max < sensor.agent_points_min) {
    fail(ErrorCode::Config, "sensor point counts are invalid");
  }

  auto within = [&](const Eigen::Vector2d & p) {
    const Eigen::Vector2d lo = terrain.origin;
    const Eigen::Vector2d hi = terrain.origin + terrain.size;
    return p.x() >= lo.x() && p.y() >= lo.y() && p.x() <= hi.x() && p.y() <= hi.y();
  };

  std::set<int> ids;
  for (const auto & a : agents) {
    const std::string what = "agent " + std::to_string(a.id);
    if (a.id < 0) fail(ErrorCode::Config, what + ": id must be >= 0");
    if (!ids.insert(a.id).second) fail(ErrorCode::Config, "duplicate agent id " + std::to_string(a.id));
    a.path.validate(what.c_str());
    for (const auto & w : a.path.waypoints) {
      if (!within(w)) fail(ErrorCode::Config, what + ": waypoint outside terrain extent");
    }
    if (a.spawn_frame < 0) fail(ErrorCode::Config, what + ": spawn_frame must be >= 0");
    if (a.despawn_frame >= 0 && a.despawn_frame <= a.spawn_frame) {
      fail(ErrorCode::Config, what + ": despawn_frame must follow spawn_frame");
    }
  }
  ego.path.validate("ego");
  for (const auto & w : ego.path.waypoints) {
    if (!within(w)) fail(ErrorCode::Config, "ego: waypoint outside terrain extent");
  }
  for (const auto & t : trees) {
    if (!(t.radius > 0.0 && t.height > 0.0) || !within(t.xy)) fail(ErrorCode::Config, "tree spec invalid");
  }
}

// ---------------------------------------------------------------- JSON

namespace
{

json vec2(const Eigen::Vector2d & v) { return json::array({v.x(), v.y()}); }

Eigen::Vector2d vec2(const json & j)
{
  if (!j.is_array() || j.size() != 2) fail(ErrorCode::Config, "expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

const char * mode_name(PathMode m) { return m == PathMode::Loop ? "loop" : "stop"; }

PathMode parse_mode(const std::string & s)
{
  if (s == "loop") return PathMode::Loop;
  if (s == "stop") return PathMode::Stop;
  fail(ErrorCode::Config, "path_mode must be 'loop' or 'stop'");
}

json path_to_json(const PathSpec & p)
{
  json w = json::array();
  for (const auto & x : p.waypoints) w.push_back(vec2(x));
  json sp = json::array();
  for (const auto & k : p.speed_profile) sp.push_back(json::array({k.t, k.speed}));
  return {{"waypoints", w}, {"path_mode", mode_name(p.mode)}, {"speed_profile", sp},
          {"profile_period", p.profile_period}, {"profile_phase", p.profile_phase}};
}

PathSpec path_from_json(const json & j)
{
  PathSpec p;
  for (const auto & w : j.at("waypoints")) p.waypoints.push_back(vec2(w));
  p.mode = parse_mode(j.value("path_mode", std::string("loop")));
  if (j.contains("speed_profile")) {
    for (const auto & k : j.at("speed_profile")) {
      if (!k.is_array() || k.size() != 2) fail(ErrorCode::Config, "speed_profile entries are [t, speed]");
      p.speed_profile.push_back({k[0].get<double>(), k[1].get<double>()});
    }
  } else if (j.contains("speed")) {
    p.speed_profile.push_back({0.0, j.at("speed").get<double>()});
  }
  p.profile_period = j.value("profile_period", 0.0);
  p.profile_phase = j.value("profile_phase", 0.0);
  return p;
}

}  // namespace

json camera_to_json(const CameraModel & cam)
{
  json ext = json::array();
  const Eigen::Matrix4d m = cam.camera_from_lidar.matrix();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) ext.push_back(m(r, c));
  }
  return {{"fx", cam.fx}, {"fy", cam.fy}, {"cx", cam.cx}, {"cy", cam.cy},
          {"width", cam.width}, {"height", cam.height}, {"camera_from_lidar", ext}};
}

CameraModel camera_from_json(const json & j)
{
  CameraModel cam;
  cam.fx = j.value("fx", cam.fx);
  cam.fy = j.value("fy", cam.fy);
  cam.cx = j.value("cx", cam.cx);
  cam.cy = j.value("cy", cam.cy);
  cam.width = j.value("width", cam.width);
  cam.height = j.value("height", cam.height);
  if (j.contains("camera_from_lidar")) {
    const auto & e = j.at("camera_from_lidar");
    if (!e.is_array() || e.size() != 12) fail(ErrorCode::Config, "camera_from_lidar must be a 3x4 row-major matrix");
    Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) t.linear()(r, c) = e[r * 4 + c].get<double>();
      t.translation()(r) = e[r * 4 + 3].get<double>();
    }
    cam.camera_from_lidar = t;
  }
  return cam;
}

json scenario_to_json(const ScenarioConfig & c)
{
  json oct = json::array();
  for (const auto & o : c.terrain.octaves) oct.push_back({{"wavelength", o.wavelength}, {"amplitude", o.amplitude}});
  json trees = json::array();
  for (const auto & t : c.trees) trees.push_back({{"xy", vec2(t.xy)}, {"radius", t.radius}, {"height", t.height}});
  json agents = json::array();
  for (const auto & a : c.agents) {
    json aj = path_to_json(a.path);
    aj["id"] = a.id;
    aj["class"] = std::string(class_name(a.cls));
    aj["spawn_frame"] = a.spawn_frame;
    aj["despawn_frame"] = a.despawn_frame;
    agents.push_back(aj);
  }
  json ego = path_to_json(c.ego.path);
  ego["yaw"] = c.ego.yaw;
  ego["sensor_height"] = c.ego.sensor_height;
  return {
    {"seed", c.seed},
    {"frame_rate", c.frame_rate},
    {"duration", c.duration},
    {"terrain", {{"origin", vec2(c.terrain.origin)}, {"size", vec2(c.terrain.size)},
                 {"cell_size", c.terrain.cell_size}, {"octaves", oct}, {"seed", c.terrain.seed}}},
    {"trees", trees},
    {"agents", agents},
    {"ego", ego},
    {"sensor", {{"fov_deg", c.sensor.fov_deg}, {"max_range", c.sensor.max_range},
                {"min_range", c.sensor.min_range}, {"static_points", c.sensor.static_points},
                {"agent_point_scale", c.sensor.agent_point_scale},
                {"agent_points_min", c.sensor.agent_points_min},
                {"agent_points_max", c.sensor.agent_points_max},
                {"tree_point_scale", c.sensor.tree_point_scale}}},
    {"noise", {{"sigma3d", c.noise.sigma3d}, {"sigma2d", c.noise.sigma2d}, {"miss_prob", c.noise.miss_prob},
               {"miss_prob_2d", c.noise.miss_prob_2d}, {"false_rate", c.noise.false_rate},
               {"fp_2d_fraction", c.noise.fp_2d_fraction}, {"class_error_prob", c.noise.class_error_prob}}},
    {"camera", camera_to_json(c.camera)},
  };
}

ScenarioConfig scenario_from_json(const json & j)
{
  try {
    ScenarioConfig c;
    c.seed = j.value("seed", c.seed);
    c.frame_rate = j.value("frame_rate", c.frame_rate);
    c.duration = j.value("duration", c.duration);
    if (j.contains("terrain")) {
      const auto & t = j.at("terrain");
      if (t.contains("origin")) c.terrain.origin = vec2(t.at("origin"));
      if (t.contains("size")) c.terrain.size = vec2(t.at("size"));
      c.terrain.cell_size = t.value("cell_size", c.terrain.cell_size);
      c.terrain.seed = t.value("seed", c.terrain.seed);
      if (t.contains("octaves")) {
        for (const auto & o : t.at("octaves")) {
          c.terrain.octaves.push_back({o.at("wavelength").get<double>(), o.at("amplitude").get<double>()});
        }
      }
    }
    if (j.contains("trees")) {
      for (const auto & t : j.at("trees")) {
        c.trees.push_back({vec2(t.at("xy")), t.value("radius", 0.2), t.value("height", 5.0)});
      }
    }
    if (j.contains("agents")) {
      for (const auto & a : j.at("agents")) {
        AgentSpec s;
        s.id = a.at("id").get<int>();
        try {
          s.cls = parse_class(a.value("class", std::string("person")));
        } catch (const Error & e) {
          fail(ErrorCode::Config, e.what());
        }
        s.path = path_from_json(a);
        s.spawn_frame = a.value("spawn_frame", 0);
        s.despawn_frame = a.value("despawn_frame", -1);
        c.agents.push_back(std::move(s));
      }
    }
    if (j.contains("ego")) {
      const auto & e = j.at("ego");
      c.ego.path = path_from_json(e);
      c.ego.yaw = e.value("yaw", 0.0);
      c.ego.sensor_height = e.value("sensor_height", c.ego.sensor_height);
    } else {
      c.ego.path.waypoints = {Eigen::Vector2d::Zero()};
    }
    if (j.contains("sensor")) {
      const auto & s = j.at("sensor");
      c.sensor.fov_deg = s.value("fov_deg", c.sensor.fov_deg);
      c.sensor.max_range = s.value("max_range", c.sensor.max_range);
      c.sensor.min_range = s.value("min_range", c.sensor.min_range);
      c.sensor.static_points = s.value("static_points", c.sensor.static_points);
      c.sensor.agent_point_scale = s.value("agent_point_scale", c.sensor.agent_point_scale);
      c.sensor.agent_points_min = s.value("agent_points_min", c.sensor.agent_points_min);
      c.sensor.agent_points_max = s.value("agent_points_max", c.sensor.agent_points_max);
      c.sensor.tree_point_scale = s.value("tree_point_scale", c.sensor.tree_point_scale);
    }
    if (j.contains("noise")) {
      const auto & n = j.at("noise");
      c.noise.sigma3d = n.value("sigma3d", c.noise.sigma3d);
      c.noise.sigma2d = n.value("sigma2d", c.noise.sigma2d);
      c.noise.miss_prob = n.value("miss_prob", c.noise.miss_prob);
      c.noise.miss_prob_2d = n.value("miss_prob_2d", c.noise.miss_prob_2d);
      c.noise.false_rate = n.value("false_rate", c.noise.false_rate);
      c.noise.fp_2d_fraction = n.value("fp_2d_fraction", c.noise.fp_2d_fraction);
      c.noise.class_error_prob = n.value("class_error_prob", c.noise.class_error_prob);
    }
    if (j.contains("camera")) c.camera = camera_from_json(j.at("camera"));
    return c;
  } catch (const json::exception & e) {
    fail(ErrorCode::Config, std::string("scenario config: ") + e.what());
  }
}

}  // namespace rmot::sim

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

#include "rmot/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rmot/error.hpp"

namespace rmot::sim
{

namespace
{

PathFollower make_ego_path(const ScenarioConfig & c)
{
  c.validate();
  return PathFollower(c.ego.path);
}

}  // namespace

Simulator::Simulator(ScenarioConfig config)
: config_(std::move(config)),
  ego_path_(make_ego_path(config_)),
  rng_(config_.seed),
  frame_count_(config_.frame_count())
{
  terrain_ = generate_terrain(config_.terrain.seed != 0 ? config_.terrain.seed : config_.seed, config_.terrain);
  agent_paths_.reserve(config_.agents.size());
  for (const auto & a : config_.agents) agent_paths_.emplace_back(a.path);
}

Pose Simulator::ego_pose(double t) const
{
  double heading = config_.ego.yaw;
  const Eigen::Vector2d xy = ego_path_.position(t, &heading);
  if (config_.ego.path.waypoints.size() < 2) heading = config_.ego.yaw;
  const double z = terrain_.height_at(xy.x(), xy.y()) + config_.ego.sensor_height;
  return Pose::from_yaw(Vec3(xy.x(), xy.y(), z), heading);
}

AgentTruth Simulator::agent_state(const AgentSpec & spec, double t) const
{
  const auto idx = static_cast<size_t>(&spec - config_.agents.data());
  const PathFollower & path = agent_paths_.at(idx);
  const Vec3 size = class_box_size(spec.cls);
  auto world = [&](double tt, double * heading) {
    const Eigen::Vector2d xy = path.position(tt, heading);
    return Vec3(xy.x(), xy.y(), terrain_.height_at(xy.x(), xy.y()) + 0.5 * size.z());
  };
  AgentTruth a;
  a.id = spec.id;
  a.cls = spec.cls;
  a.size = size;
  a.position = world(t, &a.yaw);
  constexpr double h = 1e-3;
  a.velocity = (world(t + h, nullptr) - world(std::max(t - h, 0.0), nullptr)) / (t + h - std::max(t - h, 0.0));
  return a;
}

bool Simulator::in_fov(const Vec3 & p) const
{
  const double r = p.norm();
  if (r < config_.sensor.min_range || r > config_.sensor.max_range) return false;
  const double half = 0.5 * config_.sensor.fov_deg * std::numbers::pi / 180.0;
  return std::abs(std::atan2(p.y(), p.x())) <= half;
}

std::pair<SensorFrame, GroundTruthFrame> Simulator::next()
{
  if (done()) fail(ErrorCode::InvalidArgument, "simulator has no frames left");
  const int k = next_index_++;
  const double t = k / config_.frame_rate;
  const auto & noise = config_.noise;
  const auto & cam = config_.camera;

  SensorFrame frame;
  GroundTruthFrame gt;
  frame.index = gt.index = k;
  frame.timestamp = gt.timestamp = t;
  frame.ego_pose = ego_pose(t);
  const Pose lidar_from_world = frame.ego_pose.inverse();
  const double ego_yaw = frame.ego_pose.yaw();

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto bernoulli = [&](double p) { return unit(rng_) < p; };
  auto random_class = [&]() { return static_cast<ObjectClass>(std::min<int>(kNumClasses - 1, unit(rng_) * kNumClasses)); };

  struct Visible
  {
    const AgentSpec * spec;
    AgentTruth truth;
    Vec3 lidar;
    bool in_fov;
  };
  std::vector<Visible> present;

  for (const auto & spec : config_.agents) {
    if (!spec.alive(k)) continue;
    AgentTruth a = agent_state(spec, t);
    const Vec3 lidar = transform_point(a.position, lidar_from_world);
    const bool fov = in_fov(lidar);
    const auto px = try_project(lidar, cam);
    a.visible = fov && px && cam.in_image(*px);
    gt.agents.push_back(a);
    present.push_back({&spec, a, lidar, fov});
  }

  // True detections.
  for (const auto & v : present) {
    if (!v.truth.visible) continue;
    const bool miss3d = bernoulli(noise.miss_prob);
    const Vec3 n3(gauss(rng_), gauss(rng_), gauss(rng_));
    const bool wrong_class = bernoulli(noise.class_error_prob);
    ObjectClass label = v.truth.cls;
    if (wrong_class) {
      label = static_cast<ObjectClass>((static_cast<int>(label) + 1 + static_cast<int>(unit(rng_) * (kNumClasses - 1))) %
                                       kNumClasses);
    }
    if (!miss3d) {
      OrientedBox3 box;
      box.center = v.lidar + noise.sigma3d * n3;
      box.size = v.truth.size;
      box.yaw = std::remainder(v.truth.yaw - ego_yaw, 2.0 * std::numbers::pi);
      box.label = label;
      box.score = 0.6 + 0.4 * unit(rng_);
      frame.detections3d.push_back(box);
    }
    const bool miss2d = bernoulli(noise.effective_miss_2d());
    const Pixel n2(gauss(rng_), gauss(rng_));
    if (!miss2d) {
      const Pixel px = project_to_image(v.lidar, cam) + noise.sigma2d * n2;
      const double depth = (cam.camera_from_lidar * v.lidar).z();
      Detection2D d;
      d.center = px;
      d.extent = Eigen::Vector2d(cam.fx * v.truth.size.y() / depth, cam.fy * v.truth.size.z() / depth);
      d.label = label;
      d.score = 0.6 + 0.4 * unit(rng_);
      frame.detections2d.push_back(d);
    }
  }

  // False positives, uniform over the FOV area.
  if (noise.false_rate > 0.0) {
    std::poisson_distribution<int> count(noise.false_rate);
    const int n = count(rng_);
    const double half = 0.5 * config_.sensor.fov_deg * std::numbers::pi / 180.0;
    const double r0 = config_.sensor.min_range;
    const double r1 = config_.sensor.max_range;
    for (int i = 0; i < n; ++i) {
      const double az = (2.0 * unit(rng_) - 1.0) * half;
      const double r = std::sqrt(r0 * r0 + unit(rng_) * (r1 * r1 - r0 * r0));
      const ObjectClass cls = random_class();
      const double yaw = (2.0 * unit(rng_) - 1.0) * std::numbers::pi;
      const bool with_2d = bernoulli(noise.fp_2d_fraction);
      const Pixel n2(gauss(rng_), gauss(rng_));
      const Vec3 dir_lidar(r * std::cos(az), r * std::sin(az), 0.0);
      const Vec3 w = transform_point(dir_lidar, frame.ego_pose);
      if (!terrain_.contains(w.x(), w.y())) continue;
      const Vec3 size = class_box_size(cls);
      const Vec3 center_w(w.x(), w.y(), terrain_.height_at(w.x(), w.y()) + 0.5 * size.z());
      const Vec3 center = transform_point(center_w, lidar_from_world);
      OrientedBox3 box;
      box.center = center;
      box.size = size;
      box.yaw = yaw;
      box.label = cls;
      box.score = 0.3 + 0.5 * unit(rng_);
      frame.detections3d.push_back(box);
      if (with_2d) {
        const auto px = try_project(center, cam);
        if (px && cam.in_image(*px)) {
          const double depth = (cam.camera_from_lidar * center).z();
          Detection2D d;
          d.center = *px + noise.sigma2d * n2;
          d.extent = Eigen::Vector2d(cam.fx * size.y() / depth, cam.fy * size.z() / depth);
          d.label = cls;
          d.score = box.score;
          frame.detections2d.push_back(d);
        }
      }
    }
  }
  std::shuffle(frame.detections3d.begin(), frame.detections3d.end(), rng_);
  std::shuffle(frame.detections2d.begin(), frame.detections2d.end(), rng_);

  // Point cloud.
  const auto & sensor = config_.sensor;
  const double half = 0.5 * sensor.fov_deg * std::numbers::pi / 180.0;
  auto to_lidar = [&](const Vec3 & w, std::int32_t label) {
    const Vec3 p = transform_point(w, lidar_from_world);
    frame.cloud.push_back({p.cast<float>(), label});
  };
  frame.cloud.reserve(static_cast<size_t>(sensor.static_points) + 64 * present.size());
  for (int i = 0; i < sensor.static_points; ++i) {
    const double az = (2.0 * unit(rng_) - 1.0) * half;
    const double r = sensor.min_range + unit(rng_) * (sensor.max_range - sensor.min_range);
    const double x = frame.ego_pose.position.x() + r * std::cos(ego_yaw + az);
    const double y = frame.ego_pose.position.y() + r * std::sin(ego_yaw + az);
    if (!terrain_.contains(x, y)) continue;
    to_lidar(Vec3(x, y, terrain_.height_at(x, y)), kStaticLabel);
  }
  for (const auto & tree : config_.trees) {
    const double base = terrain_.height_at(tree.xy.x(), tree.xy.y());
    const Vec3 c_l = transform_point(Vec3(tree.xy.x(), tree.xy.y(), base + 0.5 * tree.height), lidar_from_world);
    if (!in_fov(c_l)) continue;
    const double r2 = c_l.squaredNorm();
    const int n = std::clamp(static_cast<int>(std::lround(sensor.tree_point_scale / r2)), 5, 400);
    for (int i = 0; i < n; ++i) {
      const double ang = 2.0 * std::numbers::pi * unit(rng_);
      const double h = tree.height * unit(rng_);
      to_lidar(Vec3(tree.xy.x() + tree.radius * std::cos(ang), tree.xy.y() + tree.radius * std::sin(ang), base + h),
               kStaticLabel);
    }
  }
  for (const auto & v : present) {
    if (!v.in_fov) continue;
    const double r2 = std::max(v.lidar.squaredNorm(), 1e-6);
    const int n = std::clamp(static_cast<int>(std::lround(sensor.agent_point_scale / r2)), sensor.agent_points_min,
                             sensor.agent_points_max);
    const double c = std::cos(v.truth.yaw);
    const double s = std::sin(v.truth.yaw);
    for (int i = 0; i < n; ++i) {
      const double lx = (unit(rng_) - 0.5) * v.truth.size.x();
      const double ly = (unit(rng_) - 0.5) * v.truth.size.y();
      const double lz = (unit(rng_) - 0.5) * v.truth.size.z();
      const Vec3 w = v.truth.position + Vec3(c * lx - s * ly, s * lx + c * ly, lz);
      to_lidar(w, v.spec->id);
    }
  }
  return {std::move(frame), std::move(gt)};
}

SimulatedRun simulate(const ScenarioConfig & config, int max_frames)
{
  Simulator sim(config);
  SimulatedRun run;
  run.config = config;
  int n = sim.frame_count();
  if (max_frames >= 0) n = std::min(n, max_frames);
  run.frames.reserve(n);
  run.truth.reserve(n);
  for (int i = 0; i < n; ++i) {
    auto [f, g] = sim.next();
    run.frames.push_back(std::move(f));
    run.truth.push_back(std::move(g));
  }
  return run;
}

}  // namespace rmot::sim

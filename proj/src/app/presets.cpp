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


#include "rmot/app/presets.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "rmot/error.hpp"

namespace rmot::app
{

namespace
{

using Eigen::Vector2d;

sim::ScenarioConfig base(std::uint64_t seed, double duration)
{
  sim::ScenarioConfig c;
  c.seed = seed;
  c.duration = duration;
  c.terrain.origin = Vector2d(-60, -60);
  c.terrain.size = Vector2d(120, 120);
  c.terrain.cell_size = 0.5;
  c.ego.path.waypoints = {Vector2d(0, 0)};
  c.ego.yaw = 0.0;
  return c;
}

sim::PathSpec rectangle(Vector2d center, double hx, double hy, bool ccw)
{
  sim::PathSpec p;
  p.waypoints = {center + Vector2d(-hx, -hy), center + Vector2d(hx, -hy), center + Vector2d(hx, hy),
                 center + Vector2d(-hx, hy)};
  if (!ccw) std::swap(p.waypoints[1], p.waypoints[3]);
  p.mode = sim::PathMode::Loop;
  return p;
}

sim::PathSpec ellipse(Vector2d center, double rx, double ry, double rot, bool ccw, int n = 36)
{
  sim::PathSpec p;
  const double c = std::cos(rot), s = std::sin(rot);
  for (int i = 0; i < n; ++i) {
    const double a = (ccw ? 1.0 : -1.0) * 2.0 * std::numbers::pi * i / n;
    const Vector2d l(rx * std::cos(a), ry * std::sin(a));
    p.waypoints.push_back(center + Vector2d(c * l.x() - s * l.y(), s * l.x() + c * l.y()));
  }
  p.mode = sim::PathMode::Loop;
  return p;
}

sim::AgentSpec agent(int id, sim::PathSpec path, ObjectClass cls = ObjectClass::Person)
{
  sim::AgentSpec a;
  a.id = id;
  a.cls = cls;
  a.path = std::move(path);
  return a;
}

sim::ScenarioConfig identity(std::uint64_t seed)
{
  auto c = base(seed, 60.0);
  c.noise.sigma3d = 0.0;
  c.noise.sigma2d = 0.0;
  c.noise.miss_prob = 0.0;
  c.noise.false_rate = 0.0;
  c.noise.class_error_prob = 0.0;
  c.sensor.static_points = 2000;
  const Vector2d centers[3] = {{14, -5}, {16, 6}, {27, 0}};
  const ObjectClass classes[3] = {ObjectClass::Person, ObjectClass::Trolley, ObjectClass::Vehicle};
  for (int i = 0; i < 3; ++i) {
    auto a = agent(i + 1, ellipse(centers[i], 3.5, 2.5, 0.3 * i, i % 2 == 0), classes[i]);
    a.path.speed_profile = {{0.0, 1.2 + 0.4 * i}};
    c.agents.push_back(a);
  }
  return c;
}

sim::ScenarioConfig stop_and_sprint(std::uint64_t seed)
{
  auto c = base(seed, 60.0);
  c.noise.sigma3d = 0.15;
  c.noise.miss_prob = 0.1;
  c.sensor.static_points = 2000;
  std::mt19937_64 rng(seed * 7919 + 17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double columns[3] = {12.0, 21.0, 30.0};
  const double rows[2] = {-5.0, 5.0};
  int id = 1;
  for (double cx : columns) {
    for (double cy : rows) {
      const double hx = 2.5 + 1.0 * u(rng);
      const double hy = 2.5 + 1.5 * u(rng);
      auto a = agent(id++, rectangle(Vector2d(cx, cy), hx, hy, u(rng) < 0.5));
      // Stand, then sprint; the ramps take one frame.
      const double stand = 1.0 + 1.0 * u(rng);
      const double run = 1.5 + 1.5 * u(rng);
      a.path.speed_profile = {{0.0, 0.0}, {stand, 0.0}, {stand + 0.1, 4.0}, {stand + 0.1 + run, 4.0},
                              {stand + 0.2 + run, 0.0}};
      a.path.profile_period = stand + 0.2 + run;
      a.path.profile_phase = a.path.profile_period * u(rng);
      c.agents.push_back(a);
    }
  }
  return c;
}

sim::ScenarioConfig curved_rugged(std::uint64_t seed)
{
  auto c = base(seed, 60.0);
  c.terrain.octaves = {{24.0, 2.5}, {9.0, 0.6}};
  c.terrain.seed = 1;  // one world; the run seed varies agents and noise
  c.noise.sigma3d = 0.05;
  c.noise.miss_prob = 0.05;
  c.noise.false_rate = 0.1;
  c.sensor.static_points = 2000;
  std::mt19937_64 rng(seed * 104729 + 3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Vector2d centers[3] = {{20, -9}, {22, 9}, {31, 0}};
  for (int i = 0; i < 3; ++i) {
    const double rx = 3.5 + 2.5 * u(rng);
    const double ry = 3.5 + 2.5 * u(rng);
    const Vector2d jitter(2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0);
    auto a = agent(i + 1, ellipse(centers[i] + jitter, rx, ry, std::numbers::pi * u(rng), u(rng) < 0.5));
    const double v = 1.5 + 1.5 * u(rng);
    a.path.speed_profile = {{0.0, v}, {4.0, v * 0.6}, {8.0, v}};
    a.path.profile_period = 8.0;
    a.path.profile_phase = 8.0 * u(rng);
    c.agents.push_back(a);
  }
  return c;
}

sim::ScenarioConfig mapping(std::uint64_t seed)
{
  auto c = base(seed, 40.0);
  c.terrain.octaves = {{30.0, 0.8}};
  c.noise.miss_prob = 0.2;
  c.noise.false_rate = 0.1;
  c.sensor.static_points = 8000;
  c.ego.path.waypoints = {Vector2d(-8, 0), Vector2d(12, 0)};
  c.ego.path.mode = sim::PathMode::Stop;
  c.ego.path.speed_profile = {{0.0, 0.5}};
  std::mt19937_64 rng(seed * 15485863 + 11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 8; ++i) {
    sim::TreeSpec t;
    t.xy = Vector2d(20 + 25 * u(rng), (2 * u(rng) - 1) * 14);
    t.radius = 0.15 + 0.15 * u(rng);
    t.height = 3 + 3 * u(rng);
    c.trees.push_back(t);
  }
  // Walkers circling well inside the field of view.
  for (int i = 0; i < 6; ++i) {
    const Vector2d center(20 + 4 * i + 2 * u(rng), (2 * u(rng) - 1) * 3);
    const double rx = 2.5 + 2.0 * u(rng);
    const double ry = 2.0 + 1.5 * u(rng);
    auto a = agent(i + 1, ellipse(center, rx, ry, std::numbers::pi * u(rng), u(rng) < 0.5),
                   i == 5 ? ObjectClass::Trolley : ObjectClass::Person);
    a.path.speed_profile = {{0.0, 1.0 + 0.8 * u(rng)}};
    c.agents.push_back(a);
  }
  return c;
}

sim::ScenarioConfig bench(std::uint64_t seed)
{
  auto c = base(seed, 30.0);
  c.terrain.octaves = {{24.0, 1.5}};
  c.sensor.static_points = 48600;
  c.sensor.agent_point_scale = 60000;
  c.sensor.agent_points_max = 600;
  std::mt19937_64 rng(seed * 32452843 + 5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const double cx = 12 + 18 * u(rng);
    const double cy = (2 * u(rng) - 1) * 0.4 * cx;
    auto a = agent(i + 1, ellipse(Vector2d(cx, cy), 2 + 3 * u(rng), 2 + 3 * u(rng), 3 * u(rng), u(rng) < 0.5),
                   static_cast<ObjectClass>(i % kNumClasses));
    a.path.speed_profile = {{0.0, 1 + 2 * u(rng)}};
    c.agents.push_back(a);
  }
  for (int i = 0; i < 10; ++i) {
    sim::TreeSpec t;
    t.xy = Vector2d(10 + 28 * u(rng), (2 * u(rng) - 1) * 20);
    c.trees.push_back(t);
  }
  return c;
}

}  // namespace

std::vector<std::string> preset_names()
{
  return {"identity", "stop-and-sprint", "curved-rugged", "mapping", "bench"};
}

sim::ScenarioConfig make_preset(std::string_view name, std::uint64_t seed)
{
  sim::ScenarioConfig c;
  if (name == "identity") {
    c = identity(seed);
  } else if (name == "stop-and-sprint") {
    c = stop_and_sprint(seed);
  } else if (name == "curved-rugged") {
    c = curved_rugged(seed);
  } else if (name == "mapping") {
    c = mapping(seed);
  } else if (name == "bench") {
    c = bench(seed);
  } else {
    fail(ErrorCode::Config, "unknown preset '" + std::string(name) + "'");
  }
  c.validate();
  return c;
}

}  // namespace rmot::app

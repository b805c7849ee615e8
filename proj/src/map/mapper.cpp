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


#include "rmot/map/mapper.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "rmot/error.hpp"

namespace rmot::map
{

void ResidualParams::validate() const
{
  if (k_neighbors < 3) fail(ErrorCode::Config, "residual k_neighbors must be >= 3");
  if (!(s_threshold > 0.0)) fail(ErrorCode::Config, "residual s_threshold must be positive");
  if (min_neighbors < 3 || min_neighbors > k_neighbors) {
    fail(ErrorCode::Config, "residual min_neighbors must lie in [3, k_neighbors]");
  }
  if (!(search_radius > 0.0)) fail(ErrorCode::Config, "residual search_radius must be positive");
}

std::pair<Vec3, Vec3> fit_plane(std::span<const Vec3> points)
{
  if (points.size() < 3) fail(ErrorCode::InsufficientNeighbors, "plane fit needs at least 3 points");
  Vec3 c = Vec3::Zero();
  for (const auto & p : points) c += p;
  c /= static_cast<double>(points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto & p : points) {
    const Vec3 d = p - c;
    cov += d * d.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  if (es.info() != Eigen::Success) fail(ErrorCode::Numeric, "plane fit eigen-decomposition failed");
  return {es.eigenvectors().col(0).normalized(), c};
}

double plane_residual(const Vec3 & p, const StaticMap & map, const ResidualParams & params)
{
  const auto nn = map.knn(p, static_cast<std::size_t>(params.k_neighbors), params.search_radius);
  if (nn.size() < static_cast<std::size_t>(params.min_neighbors)) {
    fail(ErrorCode::InsufficientNeighbors, "not enough map neighbors for a plane fit");
  }
  std::vector<Vec3> pts;
  pts.reserve(nn.size());
  for (const auto & n : nn) pts.push_back(map.points()[n.index]);
  const auto [normal, centroid] = fit_plane(pts);
  return std::abs(normal.dot(p - centroid));
}

double residual_score(const Vec3 & p_lidar, double r_plane)
{
  const double range = p_lidar.norm();
  if (!(range > 1e-6)) fail(ErrorCode::ZeroRange, "residual score needs a point with non-zero range");
  return r_plane / std::sqrt(range);
}

std::vector<RemovalBox> boxes_from_tracks(std::span<const track::TrackInstance> tracks)
{
  std::vector<RemovalBox> out;
  out.reserve(tracks.size());
  for (const auto & t : tracks) out.push_back({t.id, t.box()});
  return out;
}

std::vector<RemovalBox> boxes_from_detections(const SensorFrame & frame)
{
  std::vector<RemovalBox> out;
  out.reserve(frame.detections3d.size());
  const double ego_yaw = frame.ego_pose.yaw();
  for (std::size_t i = 0; i < frame.detections3d.size(); ++i) {
    OrientedBox3 b = frame.detections3d[i];
    b.center = transform_point(b.center, frame.ego_pose);
    b.yaw = std::remainder(b.yaw + ego_yaw, 2.0 * std::numbers::pi);
    out.push_back({static_cast<std::int64_t>(i), b});
  }
  return out;
}

BoxSplit remove_tracked_dynamic(std::span<const Vec3> world, std::span<const RemovalBox> boxes, double margin)
{
  if (!(margin >= 0.0)) fail(ErrorCode::InvalidArgument, "box margin must be non-negative");
  struct Prepared
  {
    std::int64_t id;
    Vec3 center;
    Vec3 half;
    double c, s;
    Vec3 lo, hi;  // world AABB for a cheap reject
  };
  std::vector<Prepared> prep;
  prep.reserve(boxes.size());
  for (const auto & b : boxes) {
    Prepared q;
    q.id = b.id;
    q.center = b.box.center;
    q.half = 0.5 * b.box.size + Vec3::Constant(margin);
    q.c = std::cos(b.box.yaw);
    q.s = std::sin(b.box.yaw);
    const double rx = std::abs(q.c) * q.half.x() + std::abs(q.s) * q.half.y();
    const double ry = std::abs(q.s) * q.half.x() + std::abs(q.c) * q.half.y();
    q.lo = q.center - Vec3(rx, ry, q.half.z());
    q.hi = q.center + Vec3(rx, ry, q.half.z());
    prep.push_back(q);
  }
  BoxSplit out;
  out.kept.reserve(world.size());
  for (std::size_t i = 0; i < world.size(); ++i) {
    const Vec3 & p = world[i];
    bool hit = false;
    for (const auto & q : prep) {
      if ((p.array() < q.lo.array()).any() || (p.array() > q.hi.array()).any()) continue;
      const Vec3 d = p - q.center;
      const double lx = q.c * d.x() + q.s * d.y();
      const double ly = -q.s * d.x() + q.c * d.y();
      if (std::abs(lx) <= q.half.x() && std::abs(ly) <= q.half.y() && std::abs(d.z()) <= q.half.z()) {
        ++out.per_box[q.id];
        hit = true;
        break;
      }
    }
    (hit ? out.removed : out.kept).push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

ResidualSplit filter_by_residual(std::span<const Vec3> world, std::span<const Vec3> lidar,
                                 std::span<const std::uint32_t> candidates, const StaticMap & map,
                                 const ResidualParams & params, int threads)
{
  params.validate();
  if (world.size() != lidar.size()) fail(ErrorCode::InvalidArgument, "world and sensor point counts differ");
  ResidualSplit out;
  if (map.empty()) {
    out.inserted.assign(candidates.begin(), candidates.end());
    out.undetermined = candidates.size();
    return out;
  }
  // 0 keep (judged), 1 remove, 2 keep (no verdict)
  std::vector<std::uint8_t> verdict(candidates.size(), 0);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const std::uint32_t i = candidates[j];
      if (i >= world.size()) fail(ErrorCode::InvalidArgument, "candidate index out of range");
      double r = 0.0;
      try {
        r = plane_residual(world[i], map, params);
      } catch (const Error & e) {
        if (e.code() != ErrorCode::InsufficientNeighbors) throw;
        verdict[j] = 2;
        continue;
      }
      const double range = lidar[i].norm();
      if (!(range > 1e-6)) {
        verdict[j] = 2;
        continue;
      }
      verdict[j] = residual_score(lidar[i], r) > params.s_threshold ? 1 : 0;
    }
  };
  const std::size_t n = candidates.size();
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1,
                                                      std::max<std::size_t>(n / 512, 1));
  if (workers <= 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          work(std::min(n, w * chunk), std::min(n, (w + 1) * chunk));
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto & t : pool) t.join();
    for (const auto & e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (verdict[j] == 1) {
      out.removed.push_back(candidates[j]);
    } else {
      out.inserted.push_back(candidates[j]);
      if (verdict[j] == 2) ++out.undetermined;
    }
  }
  return out;
}

std::string_view removal_mode_name(RemovalMode m)
{
  switch (m) {
    case RemovalMode::Tracking:
      return "tracking";
    case RemovalMode::SingleFrame:
      return "single_frame";
    case RemovalMode::None:
      return "none";
  }
  return "unknown";
}

RemovalMode parse_removal_mode(std::string_view name)
{
  if (name == "tracking") return RemovalMode::Tracking;
  if (name == "single_frame" || name == "single-frame") return RemovalMode::SingleFrame;
  if (name == "none") return RemovalMode::None;
  fail(ErrorCode::Config, "unknown removal mode '" + std::string(name) + "'");
}

void MapperParams::validate() const
{
  residual.validate();
  if (!(box_margin >= 0.0)) fail(ErrorCode::Config, "box_margin must be non-negative");
  if (!(map_resolution >= 0.0)) fail(ErrorCode::Config, "map_resolution must be non-negative");
  if (!(eval_grid > 0.0)) fail(ErrorCode::Config, "eval_grid must be positive");
  if (threads < 1) fail(ErrorCode::Config, "threads must be >= 1");
}

nlohmann::json RemovalReport::to_json() const
{
  nlohmann::json per = nlohmann::json::object();
  for (const auto & [id, n] : per_track) per[std::to_string(id)] = n;
  return {{"frame", frame},
          {"input", input},
          {"removed_by_track_box", removed_by_track_box},
          {"removed_by_detection", removed_by_detection},
          {"removed_by_residual", removed_by_residual},
          {"inserted", inserted},
          {"stored", stored},
          {"undetermined", undetermined},
          {"merged", merged},
          {"per_track", per}};
}

DynamicMapper::DynamicMapper(MapperParams params) : params_(std::move(params)) { params_.validate(); }

RemovalReport DynamicMapper::integrate_frame(std::int64_t frame, std::span<const CloudPoint> cloud, const Pose & ego,
                                             std::span<const RemovalBox> boxes)
{
  if (!ego.valid()) fail(ErrorCode::InvalidArgument, "ego pose is not a valid rigid transform");
  if (frames_ > 0 && frame <= totals_.frame) fail(ErrorCode::OutOfOrder, "mapper frames must increase");
  RemovalReport rep;
  rep.frame = frame;
  rep.input = cloud.size();

  std::vector<Vec3> lidar(cloud.size());
  std::vector<Vec3> world(cloud.size());
  const Eigen::Isometry3d T = ego.isometry();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    lidar[i] = cloud[i].p.cast<double>();
    world[i] = T * lidar[i];
  }

  const BoxSplit split = remove_tracked_dynamic(world, boxes, params_.box_margin);
  rep.removed_by_track_box = split.removed.size();
  rep.per_track = split.per_box;
  if (auto it = rep.per_track.find(kDetectionBoxId); it != rep.per_track.end()) {
    rep.removed_by_detection = it->second;
    rep.per_track.erase(it);
  }

  std::vector<std::uint32_t> accepted;
  if (params_.residual_filter) {
    std::vector<std::uint32_t> judge;
    judge.reserve(split.kept.size());
    if (params_.skip_occupied && params_.map_resolution > 0.0) {
      for (const auto i : split.kept) {
        if (cells_.count(voxel_of(world[i], params_.map_resolution))) {
          ++rep.merged;
        } else {
          judge.push_back(i);
        }
      }
    } else {
      judge = split.kept;
    }
    ResidualSplit rs = filter_by_residual(world, lidar, judge, map_, params_.residual, params_.threads);
    rep.removed_by_residual = rs.removed.size();
    rep.undetermined = rs.undetermined;
    accepted = std::move(rs.inserted);
    rep.inserted = accepted.size() + rep.merged;
  } else {
    accepted = split.kept;
  }
  if (!params_.residual_filter) rep.inserted = accepted.size();

  for (const auto i : accepted) {
    if (params_.map_resolution > 0.0) {
      if (!cells_.insert(voxel_of(world[i], params_.map_resolution)).second) continue;
    }
    map_.insert(world[i]);
    ++rep.stored;
  }

  totals_.frame = frame;
  totals_.input += rep.input;
  totals_.removed_by_track_box += rep.removed_by_track_box;
  totals_.removed_by_detection += rep.removed_by_detection;
  totals_.removed_by_residual += rep.removed_by_residual;
  totals_.inserted += rep.inserted;
  totals_.stored += rep.stored;
  totals_.undetermined += rep.undetermined;
  totals_.merged += rep.merged;
  for (const auto & [id, n] : rep.per_track) totals_.per_track[id] += n;
  ++frames_;
  return rep;
}

RemovalReport DynamicMapper::integrate(const SensorFrame & frame, std::span<const track::TrackInstance> tracks)
{
  std::vector<RemovalBox> boxes;
  switch (params_.mode) {
    case RemovalMode::Tracking:
      boxes = boxes_from_tracks(tracks);
      if (params_.detection_boxes) {
        for (auto b : boxes_from_detections(frame)) {
          b.id = kDetectionBoxId;
          boxes.push_back(b);
        }
      }
      break;
    case RemovalMode::SingleFrame:
      boxes = boxes_from_detections(frame);
      break;
    case RemovalMode::None:
      break;
  }
  return integrate_frame(frame.index, frame.cloud, frame.ego_pose, boxes);
}

nlohmann::json DynamicMapper::report_json() const
{
  nlohmann::json j = totals_.to_json();
  j.erase("frame");
  j["frames"] = frames_;
  j["map_points"] = map_.size();
  j["map_voxels"] = map_.voxel_occupancy(params_.eval_grid).size();
  j["mode"] = removal_mode_name(params_.mode);
  j["residual_filter"] = params_.residual_filter;
  j["detection_boxes"] = params_.detection_boxes;
  j["box_margin"] = params_.box_margin;
  j["map_resolution"] = params_.map_resolution;
  j["skip_occupied"] = params_.skip_occupied;
  j["eval_grid"] = params_.eval_grid;
  j["k_neighbors"] = params_.residual.k_neighbors;
  j["s_threshold"] = params_.residual.s_threshold;
  return j;
}

}  // namespace rmot::map

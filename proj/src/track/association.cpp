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

#include "rmot/track/association.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "rmot/error.hpp"

namespace rmot::track
{

void AdaptiveGateParams::validate() const
{
  if (!(a >= 0.0) || !std::isfinite(a)) fail(ErrorCode::Config, "gate coefficient a must be >= 0");
  if (!(b > 0.0) || !std::isfinite(b)) fail(ErrorCode::Config, "gate coefficient b must be > 0");
  if (!(pixel_gate > 0.0)) fail(ErrorCode::Config, "pixel_gate must be > 0");
}

double adaptive_threshold(double vx, double vy, const AdaptiveGateParams & params)
{
  return params.a * std::hypot(vx, vy) + params.b;
}

std::string_view condition_name(Condition c)
{
  switch (c) {
    case Condition::NewInstance: return "new";
    case Condition::Matched: return "matched";
    case Condition::MatchedNoImage: return "matched_no_image";
    case Condition::ImageOnly: return "image_only";
    case Condition::Miss: return "miss";
  }
  return "miss";
}

AssociationOutcome associate_frame(std::span<const TrackPrediction> tracks, const Pose & ego,
                                   std::span<const OrientedBox3> det3d,
                                   std::span<const Detection2D> det2d, const CameraModel & cam,
                                   const AdaptiveGateParams & gate)
{
  const int nt = static_cast<int>(tracks.size());
  const int n3 = static_cast<int>(det3d.size());
  const int n2 = static_cast<int>(det2d.size());
  const double inf = std::numeric_limits<double>::infinity();
  const Pose world_to_lidar = ego.inverse();

  std::vector<Vec3> det_world(n3);
  std::vector<std::optional<Pixel>> det_px(n3);
  for (int j = 0; j < n3; ++j) {
    det_world[j] = transform_point(det3d[j].center, ego);
    det_px[j] = try_project(det3d[j].center, cam);
  }
  std::vector<std::optional<Pixel>> pre_px(nt);
  for (int i = 0; i < nt; ++i) {
    pre_px[i] = try_project(transform_point(tracks[i].position, world_to_lidar), cam);
  }

  Eigen::MatrixXd c3(nt, n3), g3(nt, n3);
  for (int i = 0; i < nt; ++i) {
    const double th = adaptive_threshold(tracks[i].velocity.x(), tracks[i].velocity.y(), gate);
    for (int j = 0; j < n3; ++j) {
      c3(i, j) = euclidean3(tracks[i].position, det_world[j]);
      g3(i, j) = th;
    }
  }
  Eigen::MatrixXd c2(nt, n2);
  for (int i = 0; i < nt; ++i) {
    for (int k = 0; k < n2; ++k) {
      c2(i, k) = pre_px[i] ? euclidean2(*pre_px[i], det2d[k].center) : inf;
    }
  }
  Eigen::MatrixXd cl(n3, n2);
  for (int j = 0; j < n3; ++j) {
    for (int k = 0; k < n2; ++k) {
      cl(j, k) = det_px[j] ? euclidean2(*det_px[j], det2d[k].center) : inf;
    }
  }

  AssociationOutcome out;
  out.pre_lidar = hungarian_assign(c3, g3);
  out.pre_image = hungarian_assign(c2, gate.pixel_gate);
  out.lidar_image = hungarian_assign(cl, gate.pixel_gate);

  std::vector<int> det3d_track(n3, -1), det2d_track(n2, -1), det3d_img(n3, -1), img_det3d(n2, -1);
  std::vector<int> track_det3d(nt, -1), track_img(nt, -1);
  for (const auto & [i, j] : out.pre_lidar.matches) {
    track_det3d[i] = j;
    det3d_track[j] = i;
  }
  for (const auto & [i, k] : out.pre_image.matches) {
    track_img[i] = k;
    det2d_track[k] = i;
  }
  for (const auto & [j, k] : out.lidar_image.matches) {
    det3d_img[j] = k;
    img_det3d[k] = j;
  }

  out.track_condition.resize(nt);
  out.track_measurement.assign(nt, -1);
  for (int i = 0; i < nt; ++i) {
    const int j = track_det3d[i];
    const int k = track_img[i];
    if (j >= 0) {
      out.track_measurement[i] = j;
      out.track_condition[i] =
        (k >= 0 && det3d_img[j] == k) ? Condition::Matched : Condition::MatchedNoImage;
    } else if (k >= 0) {
      out.track_condition[i] = Condition::ImageOnly;
    } else {
      out.track_condition[i] = Condition::Miss;
      out.unmatched_tracks.push_back(i);
    }
  }

  for (int j = 0; j < n3; ++j) {
    if (det3d_track[j] >= 0) continue;
    const int k = det3d_img[j];
    if (k >= 0 && det2d_track[k] < 0) {
      out.new_instances.push_back(j);
      out.new_instance_image.push_back(k);
    } else {
      out.unmatched_det3d.push_back(j);
    }
  }
  for (int k = 0; k < n2; ++k) {
    if (det2d_track[k] < 0 && img_det3d[k] < 0) out.unmatched_det2d.push_back(k);
  }
  return out;
}

}  // namespace rmot::track

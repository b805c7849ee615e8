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


#ifndef RMOT__PREDICT__TRAJECTORY_HPP_
#define RMOT__PREDICT__TRAJECTORY_HPP_

#include <Eigen/Core>

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rmot/geometry.hpp"

namespace rmot::predict
{

using FeatureVector = Eigen::VectorXd;

/// Canonical frame of a window: origin at its last point, +x along the recent
/// horizontal heading.
struct Anchor
{
  Vec3 origin{Vec3::Zero()};
  double yaw{0.0};
};

struct CanonicalWindow
{
  std::vector<Vec3> points;
  Anchor anchor;
};

Vec3 to_canonical(const Vec3 & world, const Anchor & anchor);
Vec3 from_canonical(const Vec3 & canonical, const Anchor & anchor);
std::vector<Vec3> to_canonical(std::span<const Vec3> world, const Anchor & anchor);
std::vector<Vec3> from_canonical(std::span<const Vec3> canonical, const Anchor & anchor);

/// Translates the window so its last point is the origin and rotates it about
/// z so the mean horizontal heading of the last three steps lies along +x.
/// Throws Error(InvalidArgument) for fewer than two points and
/// Error(DegenerateHeading) when the horizontal path length is below 1e-6 m or
/// no heading can be defined.
CanonicalWindow normalize_trajectory(std::span<const Vec3> window);

/// Maps a canonical history window to a feature vector.
class HistoryEncoder
{
public:
  virtual ~HistoryEncoder() = default;
  virtual std::string name() const = 0;
  virtual int feature_dim(int history_points) const = 0;
  virtual FeatureVector encode(std::span<const Vec3> canonical) const = 0;
};

/// Per-step horizontal displacements (dx, dy) followed by per-step vertical
/// slopes dz / horizontal step length (0 for steps shorter than 1e-9 m).
class DisplacementSlopeEncoder final : public HistoryEncoder
{
public:
  std::string name() const override { return "displacement-slope"; }
  int feature_dim(int history_points) const override { return 3 * (history_points - 1); }
  FeatureVector encode(std::span<const Vec3> canonical) const override;
};

/// Reference encoder instance.
std::shared_ptr<const HistoryEncoder> reference_encoder();

FeatureVector encode_history(std::span<const Vec3> canonical);

/// 1 - cos(u, v). Throws Error(ZeroVector) if either norm is zero and
/// Error(InvalidArgument) on a dimension mismatch.
double cosine_distance(const FeatureVector & u, const FeatureVector & v);

/// Mean point-wise distance over the first min(|a|, |b|) points.
double mean_distance(std::span<const Vec3> a, std::span<const Vec3> b);

}  // namespace rmot::predict

#endif  // RMOT__PREDICT__TRAJECTORY_HPP_

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


#include "rmot/predict/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "rmot/error.hpp"

namespace rmot::predict
{

Vec3 to_canonical(const Vec3 & world, const Anchor & anchor)
{
  const Vec3 d = world - anchor.origin;
  const double c = std::cos(anchor.yaw);
  const double s = std::sin(anchor.yaw);
  return Vec3(c * d.x() + s * d.y(), -s * d.x() + c * d.y(), d.z());
}

Vec3 from_canonical(const Vec3 & p, const Anchor & anchor)
{
  const double c = std::cos(anchor.yaw);
  const double s = std::sin(anchor.yaw);
  return anchor.origin + Vec3(c * p.x() - s * p.y(), s * p.x() + c * p.y(), p.z());
}

std::vector<Vec3> to_canonical(std::span<const Vec3> world, const Anchor & anchor)
{
  std::vector<Vec3> out;
  out.reserve(world.size());
  for (const auto & p : world) out.push_back(to_canonical(p, anchor));
  return out;
}

std::vector<Vec3> from_canonical(std::span<const Vec3> canonical, const Anchor & anchor)
{
  std::vector<Vec3> out;
  out.reserve(canonical.size());
  for (const auto & p : canonical) out.push_back(from_canonical(p, anchor));
  return out;
}

CanonicalWindow normalize_trajectory(std::span<const Vec3> window)
{
  const std::size_t n = window.size();
  if (n < 2) fail(ErrorCode::InvalidArgument, "trajectory window needs at least two points");
  double path = 0.0;
  for (std::size_t i = 1; i < n; ++i) path += (window[i] - window[i - 1]).head<2>().norm();
  if (path < 1e-6) fail(ErrorCode::DegenerateHeading, "window is stationary");

  const std::size_t first = n > 3 ? n - 4 : 0;
  Eigen::Vector2d dir = (window[n - 1] - window[first]).head<2>();
  if (dir.norm() < 1e-9) dir = (window[n - 1] - window[0]).head<2>();
  if (dir.norm() < 1e-9) fail(ErrorCode::DegenerateHeading, "window has no net horizontal heading");

  CanonicalWindow out;
  out.anchor.origin = window[n - 1];
  out.anchor.yaw = std::atan2(dir.y(), dir.x());
  out.points = to_canonical(window, out.anchor);
  return out;
}

FeatureVector DisplacementSlopeEncoder::encode(std::span<const Vec3> canonical) const
{
  const int n = static_cast<int>(canonical.size());
  if (n < 2) fail(ErrorCode::InvalidArgument, "encoder needs at least two points");
  FeatureVector f(3 * (n - 1));
  for (int i = 0; i + 1 < n; ++i) {
    const Vec3 d = canonical[i + 1] - canonical[i];
    f(2 * i) = d.x();
    f(2 * i + 1) = d.y();
    const double run = d.head<2>().norm();
    f(2 * (n - 1) + i) = run < 1e-9 ? 0.0 : d.z() / run;
  }
  return f;
}

std::shared_ptr<const HistoryEncoder> reference_encoder()
{
  static const auto encoder = std::make_shared<const DisplacementSlopeEncoder>();
  return encoder;
}

FeatureVector encode_history(std::span<const Vec3> canonical)
{
  return DisplacementSlopeEncoder{}.encode(canonical);
}

double cosine_distance(const FeatureVector & u, const FeatureVector & v)
{
  if (u.size() != v.size()) fail(ErrorCode::InvalidArgument, "feature dimensions differ");
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) fail(ErrorCode::ZeroVector, "cosine distance of a zero vector");
  const double c = std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
  return 1.0 - c;
}

double mean_distance(std::span<const Vec3> a, std::span<const Vec3> b)
{
  const std::size_t n = std::min(a.size(), b.size());
  if (n == 0) fail(ErrorCode::EmptyInput, "mean distance of empty trajectories");
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += (a[i] - b[i]).norm();
  return s / static_cast<double>(n);
}

}  // namespace rmot::predict

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

#ifndef RMOT__TRACK__KALMAN_HPP_
#define RMOT__TRACK__KALMAN_HPP_

#include <Eigen/Core>

#include "rmot/geometry.hpp"

namespace rmot::track
{

using State6 = Eigen::Matrix<double, 6, 1>;
using Cov6 = Eigen::Matrix<double, 6, 6>;

struct KalmanParams
{
  double accel_noise{4.0};     // white-acceleration spectral density, m^2/s^3
  double accel_noise_z{0.05};  // vertical axis; ground agents follow the terrain
  double meas_sigma{0.1};      // per-axis position noise, m
  double init_pos_sigma{0.3};  // m
  double init_vel_sigma{2.0};  // m/s
};

/// Constant-velocity filter over [x, y, z, vx, vy, vz] in the world frame.
struct KalmanCV
{
  State6 x{State6::Zero()};
  Cov6 P{Cov6::Identity()};
  double q{4.0};   // spectral density of the acceleration noise
  double qz{0.05}; // same, vertical axis
  double r{0.01};  // measurement variance per axis, m^2

  static KalmanCV init(const Vec3 & position, const KalmanParams & params);

  Vec3 position() const { return x.head<3>(); }
  Vec3 velocity() const { return x.tail<3>(); }
};

/// Discrete white-noise-acceleration covariance for step `dt`.
Cov6 process_noise(double q, double dt);
/// Same with a separate vertical density `qz`.
Cov6 process_noise(double q, double qz, double dt);

/// Constant-velocity propagation. Throws Error(InvalidArgument) if dt <= 0.
KalmanCV kf_predict(const KalmanCV & kf, double dt);

/// Position measurement update (Joseph form). Throws Error(Numeric) when the
/// innovation covariance is not positive definite.
KalmanCV kf_update(const KalmanCV & kf, const Vec3 & z);

}  // namespace rmot::track

#endif  // RMOT__TRACK__KALMAN_HPP_

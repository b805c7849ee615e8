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

#include "rmot/track/kalman.hpp"

#include <Eigen/Cholesky>

#include <algorithm>

#include "rmot/error.hpp"

namespace rmot::track
{

namespace
{
constexpr double kMinMeasSigma = 1e-5;
}

KalmanCV KalmanCV::init(const Vec3 & position, const KalmanParams & params)
{
  KalmanCV kf;
  kf.x.head<3>() = position;
  kf.x.tail<3>().setZero();
  kf.P.setZero();
  const double sp = std::max(params.init_pos_sigma, kMinMeasSigma);
  kf.P.diagonal().head<3>().setConstant(sp * sp);
  kf.P.diagonal().tail<3>().setConstant(params.init_vel_sigma * params.init_vel_sigma);
  kf.q = params.accel_noise;
  kf.qz = params.accel_noise_z;
  const double sm = std::max(params.meas_sigma, kMinMeasSigma);
  kf.r = sm * sm;
  return kf;
}

Cov6 process_noise(double q, double dt)
{
  return process_noise(q, q, dt);
}

Cov6 process_noise(double q, double qz, double dt)
{
  const double dt2 = dt * dt;
  const double dt3 = dt2 * dt;
  Cov6 Q = Cov6::Zero();
  for (int i = 0; i < 3; ++i) {
    const double qi = i == 2 ? qz : q;
    Q(i, i) = qi * dt3 / 3.0;
    Q(i, i + 3) = Q(i + 3, i) = qi * dt2 / 2.0;
    Q(i + 3, i + 3) = qi * dt;
  }
  return Q;
}

KalmanCV kf_predict(const KalmanCV & kf, double dt)
{
  if (!(dt > 0.0)) fail(ErrorCode::InvalidArgument, "kf_predict requires dt > 0");
  Cov6 F = Cov6::Identity();
  F.topRightCorner<3, 3>().diagonal().setConstant(dt);
  KalmanCV out = kf;
  out.x = F * kf.x;
  out.P = F * kf.P * F.transpose() + process_noise(kf.q, kf.qz, dt);
  out.P = 0.5 * (out.P + out.P.transpose());
  return out;
}

KalmanCV kf_update(const KalmanCV & kf, const Vec3 & z)
{
  using Mat36 = Eigen::Matrix<double, 3, 6>;
  Mat36 H = Mat36::Zero();
  H.leftCols<3>().setIdentity();
  const Eigen::Matrix3d R = Eigen::Matrix3d::Identity() * kf.r;
  const Eigen::Matrix3d S = H * kf.P * H.transpose() + R;
  const Eigen::LLT<Eigen::Matrix3d> llt(S);
  if (llt.info() != Eigen::Success || !S.allFinite()) {
    fail(ErrorCode::Numeric, "innovation covariance is not positive definite");
  }
  // K = P H^T S^-1
  const Eigen::Matrix<double, 6, 3> PHt = kf.P * H.transpose();
  const Eigen::Matrix<double, 6, 3> K = llt.solve(PHt.transpose()).transpose();
  KalmanCV out = kf;
  out.x = kf.x + K * (z - H * kf.x);
  const Cov6 IKH = Cov6::Identity() - K * H;
  out.P = IKH * kf.P * IKH.transpose() + K * R * K.transpose();
  out.P = 0.5 * (out.P + out.P.transpose());
  return out;
}

}  // namespace rmot::track

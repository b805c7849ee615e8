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

#include "rmot/geometry.hpp"

#include <cmath>
#include <string>

#include "rmot/error.hpp"

namespace rmot
{

std::string_view to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
    case ErrorCode::Format: return "format";
    case ErrorCode::Numeric: return "numeric";
    case ErrorCode::OutOfOrder: return "out_of_order";
    case ErrorCode::BehindCamera: return "behind_camera";
    case ErrorCode::OutOfExtent: return "out_of_extent";
    case ErrorCode::DegenerateHeading: return "degenerate_heading";
    case ErrorCode::ZeroVector: return "zero_vector";
    case ErrorCode::EmptyBank: return "empty_bank";
    case ErrorCode::InsufficientNeighbors: return "insufficient_neighbors";
    case ErrorCode::ZeroRange: return "zero_range";
    case ErrorCode::EmptyInput: return "empty_input";
    case ErrorCode::NoMatches: return "no_matches";
    case ErrorCode::BothZero: return "both_zero";
    case ErrorCode::Internal: return "internal";
  }
  return "internal";
}

std::string_view class_name(ObjectClass c)
{
  switch (c) {
    case ObjectClass::Person: return "person";
    case ObjectClass::Trolley: return "trolley";
    case ObjectClass::Vehicle: return "vehicle";
  }
  return "person";
}

ObjectClass parse_class(std::string_view name)
{
  if (name == "person") return ObjectClass::Person;
  if (name == "trolley") return ObjectClass::Trolley;
  if (name == "vehicle") return ObjectClass::Vehicle;
  fail(ErrorCode::Format, "unknown object class '" + std::string(name) + "'");
}

Pose Pose::from_yaw(const Vec3 & position, double yaw)
{
  Pose p;
  p.position = position;
  p.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Vec3::UnitZ()));
  return p;
}

bool Pose::valid() const
{
  return position.allFinite() && std::abs(orientation.norm() - 1.0) <= 1e-9;
}

double Pose::yaw() const
{
  const Eigen::Matrix3d r = orientation.toRotationMatrix();
  return std::atan2(r(1, 0), r(0, 0));
}

Pose Pose::inverse() const
{
  Pose inv;
  inv.orientation = orientation.conjugate();
  inv.position = -(inv.orientation * position);
  return inv;
}

Eigen::Isometry3d Pose::isometry() const
{
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.linear() = orientation.toRotationMatrix();
  t.translation() = position;
  return t;
}

Pose compose(const Pose & a, const Pose & b)
{
  Pose out;
  out.orientation = (a.orientation * b.orientation).normalized();
  out.position = a.orientation * b.position + a.position;
  return out;
}

Vec3 transform_point(const Vec3 & p, const Pose & pose)
{
  return pose.orientation * p + pose.position;
}

double euclidean3(const Vec3 & a, const Vec3 & b) { return (a - b).norm(); }

double euclidean2(const Pixel & a, const Pixel & b) { return (a - b).norm(); }

bool OrientedBox3::valid() const
{
  return center.allFinite() && (size.array() > 0.0).all() && std::isfinite(yaw) &&
         score >= 0.0 && score <= 1.0;
}

bool OrientedBox3::contains(const Vec3 & p, double margin) const
{
  const Vec3 d = p - center;
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  const double lx = c * d.x() + s * d.y();
  const double ly = -s * d.x() + c * d.y();
  return std::abs(lx) <= 0.5 * size.x() + margin && std::abs(ly) <= 0.5 * size.y() + margin &&
         std::abs(d.z()) <= 0.5 * size.z() + margin;
}

bool Detection2D::valid() const
{
  return center.allFinite() && extent.allFinite() && extent.x() >= 0.0 && extent.y() >= 0.0;
}

Eigen::Isometry3d CameraModel::default_extrinsic()
{
  // LiDAR (x fwd, y left, z up) -> camera (x right, y down, z fwd).
  Eigen::Matrix3d r;
  r << 0, -1, 0,
       0, 0, -1,
       1, 0, 0;
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.linear() = r;
  return t;
}

void CameraModel::validate() const
{
  if (!(fx > 0.0 && fy > 0.0)) fail(ErrorCode::Config, "camera focal lengths must be positive");
  if (width <= 0 || height <= 0) fail(ErrorCode::Config, "camera image size must be positive");
  if (!(cx > 0.0 && cx < width && cy > 0.0 && cy < height)) {
    fail(ErrorCode::Config, "camera principal point must lie inside the image");
  }
}

bool CameraModel::in_image(const Pixel & px) const
{
  return px.x() >= 0.0 && px.x() < width && px.y() >= 0.0 && px.y() < height;
}

std::optional<Pixel> try_project(const Vec3 & point_lidar, const CameraModel & cam)
{
  const Vec3 pc = cam.camera_from_lidar * point_lidar;
  if (pc.z() <= 1e-6) return std::nullopt;
  return Pixel(cam.fx * pc.x() / pc.z() + cam.cx, cam.fy * pc.y() / pc.z() + cam.cy);
}

Pixel project_to_image(const Vec3 & point_lidar, const CameraModel & cam)
{
  auto px = try_project(point_lidar, cam);
  if (!px) fail(ErrorCode::BehindCamera, "point is behind the camera");
  return *px;
}

Vec3 back_project(const Pixel & px, double depth, const CameraModel & cam)
{
  const Vec3 pc((px.x() - cam.cx) * depth / cam.fx, (px.y() - cam.cy) * depth / cam.fy, depth);
  return cam.camera_from_lidar.inverse() * pc;
}

}  // namespace rmot

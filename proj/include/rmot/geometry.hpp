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

/// \file
/// \brief Geometric primitives shared by every module.
///
/// Conventions: right-handed frames. The LiDAR (sensor) frame has x forward,
/// y left and z up. The camera frame has x right, y down and z along the
/// optical axis. Image coordinates have their origin at the top-left pixel.
#ifndef RMOT__GEOMETRY_HPP_
#define RMOT__GEOMETRY_HPP_

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <optional>
#include <string_view>

namespace rmot
{

using Vec3 = Eigen::Vector3d;
using Pixel = Eigen::Vector2d;

enum class ObjectClass : int
{
  Person = 0,
  Trolley = 1,
  Vehicle = 2,
};

inline constexpr int kNumClasses = 3;

std::string_view class_name(ObjectClass c);
/// Throws Error(Format) on an unknown name.
ObjectClass parse_class(std::string_view name);

/// Rigid transform. `orientation` must be a unit quaternion.
struct Pose
{
  Vec3 position{Vec3::Zero()};
  Eigen::Quaterniond orientation{Eigen::Quaterniond::Identity()};

  static Pose from_yaw(const Vec3 & position, double yaw);

  bool valid() const;
  double yaw() const;
  Pose inverse() const;
  Eigen::Isometry3d isometry() const;
};

Pose compose(const Pose & a, const Pose & b);

/// Applies `pose` to a point: R p + t.
Vec3 transform_point(const Vec3 & p, const Pose & pose);

double euclidean3(const Vec3 & a, const Vec3 & b);
double euclidean2(const Pixel & a, const Pixel & b);

struct OrientedBox3
{
  Vec3 center{Vec3::Zero()};
  Vec3 size{Vec3::Ones()};
  double yaw{0.0};
  ObjectClass label{ObjectClass::Person};
  double score{1.0};

  bool valid() const;
  /// True if `p` is inside the box grown by `margin` on every side.
  bool contains(const Vec3 & p, double margin = 0.0) const;
};

struct Detection2D
{
  Pixel center{Pixel::Zero()};
  Eigen::Vector2d extent{Eigen::Vector2d::Zero()};
  ObjectClass label{ObjectClass::Person};
  double score{1.0};

  bool valid() const;
};

/// Zero-distortion pinhole camera rigidly attached to the LiDAR.
struct CameraModel
{
  double fx{320.0};
  double fy{320.0};
  double cx{320.0};
  double cy{240.0};
  int width{640};
  int height{480};
  /// camera <- LiDAR
  Eigen::Isometry3d camera_from_lidar{default_extrinsic()};

  static Eigen::Isometry3d default_extrinsic();

  /// Throws Error(Config) when the intrinsics violate fx, fy > 0 or put the
  /// principal point outside the image.
  void validate() const;
  bool in_image(const Pixel & px) const;
};

/// Projects a LiDAR-frame point. Throws Error(BehindCamera) if the camera-frame
/// depth is at most 1e-6.
Pixel project_to_image(const Vec3 & point_lidar, const CameraModel & cam);

/// Non-throwing variant of project_to_image.
std::optional<Pixel> try_project(const Vec3 & point_lidar, const CameraModel & cam);

/// Inverse of project_to_image for a known camera-frame depth.
Vec3 back_project(const Pixel & px, double depth, const CameraModel & cam);

}  // namespace rmot

#endif  // RMOT__GEOMETRY_HPP_

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


#ifndef RMOT__MAP__MAPPER_HPP_
#define RMOT__MAP__MAPPER_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "rmot/geometry.hpp"
#include "rmot/map/static_map.hpp"
#include "rmot/sim/frames.hpp"
#include "rmot/track/tracker.hpp"

namespace rmot::map
{

struct ResidualParams
{
  int k_neighbors{5};
  double s_threshold{0.05};  // m^0.5
  int min_neighbors{5};      // neighbors inside search_radius needed to fit a plane
  double search_radius{2.5}; // m

  void validate() const;
};

/// Distance from `p` to the least-squares plane through its k nearest map
/// points. Throws Error(InsufficientNeighbors) when fewer than
/// `min_neighbors` map points lie within `search_radius`.
double plane_residual(const Vec3 & p, const StaticMap & map, const ResidualParams & params);

/// Least-squares plane fit: returns the unit normal and the centroid.
std::pair<Vec3, Vec3> fit_plane(std::span<const Vec3> points);

/// Range-normalized residual r / sqrt(|p|), `p` in the sensor frame.
/// Throws Error(ZeroRange) when |p| <= 1e-6.
double residual_score(const Vec3 & p_lidar, double r_plane);

/// World-frame removal box attached to a track id (or a detection index).
struct RemovalBox
{
  std::int64_t id{0};
  OrientedBox3 box;
};

/// Boxes centered on each track's reported position, with the extent and yaw
/// of its last matched detection. Every live track contributes, coasting or not.
std::vector<RemovalBox> boxes_from_tracks(std::span<const track::TrackInstance> tracks);

/// Current-frame 3D detections moved to the world frame. Ids are detection
/// indices.
std::vector<RemovalBox> boxes_from_detections(const SensorFrame & frame);

/// Box id reserved for detection boxes added next to track boxes. Removals
/// credited to it are reported apart from the per-track tallies.
inline constexpr std::int64_t kDetectionBoxId = -1;

struct BoxSplit
{
  std::vector<std::uint32_t> kept;
  std::vector<std::uint32_t> removed;
  std::map<std::int64_t, std::size_t> per_box;  // removals credited to the first containing box
};

/// Partition of world points: removed iff inside some box grown by `margin`.
BoxSplit remove_tracked_dynamic(std::span<const Vec3> world, std::span<const RemovalBox> boxes, double margin);

struct ResidualSplit
{
  std::vector<std::uint32_t> inserted;
  std::vector<std::uint32_t> removed;
  std::size_t undetermined{0};  // kept for lack of neighbors
};

/// Judges `candidates` (indices into `world` / `lidar`) against `map` only.
/// Points without enough neighbors are kept. `threads` > 1 splits the
/// queries over worker threads; the result does not depend on it.
ResidualSplit filter_by_residual(std::span<const Vec3> world, std::span<const Vec3> lidar,
                                 std::span<const std::uint32_t> candidates, const StaticMap & map,
                                 const ResidualParams & params, int threads = 1);

enum class RemovalMode
{
  Tracking,     // boxes from live tracks
  SingleFrame,  // boxes from current-frame detections only
  None,
};

std::string_view removal_mode_name(RemovalMode m);
RemovalMode parse_removal_mode(std::string_view name);

struct MapperParams
{
  ResidualParams residual;
  RemovalMode mode{RemovalMode::Tracking};
  bool residual_filter{true};
  // Tracking mode also removes points inside current-frame 3D detections,
  // covering objects seen before a track exists.
  bool detection_boxes{true};
  double box_margin{0.3};      // m per side
  double map_resolution{0.1};  // one stored point per cell; 0 stores everything
  // Points whose map cell is already occupied cannot change the map; skip
  // their residual query and count them as merged.
  bool skip_occupied{true};
  double eval_grid{0.2};       // m
  int threads{1};

  void validate() const;
};

struct RemovalReport
{
  std::int64_t frame{0};
  std::size_t input{0};
  std::size_t removed_by_track_box{0};  // includes removed_by_detection
  std::size_t removed_by_detection{0};  // inside a detection box but no track box
  std::size_t removed_by_residual{0};
  std::size_t inserted{0};       // accepted points: input minus both removals
  std::size_t stored{0};         // accepted points that opened a new map cell
  std::size_t undetermined{0};   // accepted without a residual verdict
  std::size_t merged{0};         // accepted into an occupied cell, not judged
  std::map<std::int64_t, std::size_t> per_track;

  nlohmann::json to_json() const;
};

/// Incremental static map with tracking-driven dynamic point removal.
class DynamicMapper
{
public:
  explicit DynamicMapper(MapperParams params = {});

  /// Moves the cloud to the world frame, drops points in the removal boxes,
  /// then drops points whose residual against the existing map is too high,
  /// and stores the rest.
  RemovalReport integrate_frame(std::int64_t frame, std::span<const CloudPoint> cloud, const Pose & ego,
                                std::span<const RemovalBox> boxes);

  /// Convenience entry that picks boxes according to the configured mode.
  RemovalReport integrate(const SensorFrame & frame, std::span<const track::TrackInstance> tracks);

  const StaticMap & map() const { return map_; }
  const MapperParams & params() const { return params_; }
  const RemovalReport & totals() const { return totals_; }
  std::size_t frames() const { return frames_; }

  /// Summary document for mapping_report.json.
  nlohmann::json report_json() const;

private:
  MapperParams params_;
  StaticMap map_;
  VoxelSet cells_;
  RemovalReport totals_;
  std::size_t frames_{0};
};

}  // namespace rmot::map

#endif  // RMOT__MAP__MAPPER_HPP_

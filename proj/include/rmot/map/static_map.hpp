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


#ifndef RMOT__MAP__STATIC_MAP_HPP_
#define RMOT__MAP__STATIC_MAP_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <span>
#include <unordered_set>
#include <vector>

#include "rmot/geometry.hpp"

namespace rmot::map
{

struct VoxelKey
{
  std::int32_t x{0};
  std::int32_t y{0};
  std::int32_t z{0};

  bool operator==(const VoxelKey &) const = default;
};

struct VoxelKeyHash
{
  std::size_t operator()(const VoxelKey & k) const noexcept
  {
    std::uint64_t h = static_cast<std::uint32_t>(k.x);
    h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(k.y);
    h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(k.z);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

using VoxelSet = std::unordered_set<VoxelKey, VoxelKeyHash>;

/// Floor quantization onto a grid of edge `grid`.
VoxelKey voxel_of(const Vec3 & p, double grid);
VoxelSet voxelize(std::span<const Vec3> points, double grid);

struct Neighbor
{
  std::size_t index{0};  // insertion index in the map
  double distance{0.0};
};

/// Static kd-tree over a fixed point set (exact search).
class KdTree
{
public:
  KdTree() = default;
  KdTree(std::vector<Vec3> points, std::vector<std::uint32_t> ids);

  std::size_t size() const { return points_.size(); }
  const std::vector<Vec3> & points() const { return points_; }
  const std::vector<std::uint32_t> & ids() const { return ids_; }

  /// Adds candidates to a bounded max-heap of (squared distance, id).
  void search(const Vec3 & q, std::size_t k, double max_d2,
              std::vector<std::pair<double, std::uint32_t>> & heap) const;

private:
  void build(std::size_t lo, std::size_t hi);
  void search(std::size_t lo, std::size_t hi, const Vec3 & q, std::size_t k, double max_d2,
              std::vector<std::pair<double, std::uint32_t>> & heap) const;

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> ids_;
  std::vector<std::uint8_t> split_;
  std::vector<std::uint32_t> order_;  // build scratch
};

/// Incremental point store: a logarithmic forest of static kd-trees plus a
/// small linear buffer. Inserts are amortized O(log^2 n); k-NN is exact.
class StaticMap
{
public:
  StaticMap() = default;

  void insert(const Vec3 & p);
  void insert(std::span<const Vec3> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<Vec3> & points() const { return points_; }

  /// Up to k nearest stored points within `max_radius`, ascending by distance
  /// (ties by insertion index).
  std::vector<Neighbor> knn(const Vec3 & q, std::size_t k,
                            double max_radius = std::numeric_limits<double>::infinity()) const;

  VoxelSet voxel_occupancy(double grid) const;

  /// Number of kd-trees currently in the forest (diagnostic).
  std::size_t tree_count() const;

private:
  void flush();

  static constexpr std::size_t kBufferSize = 256;
  std::vector<Vec3> points_;
  std::vector<std::uint32_t> buffer_;
  std::vector<KdTree> levels_;
};

/// ASCII `x y z` lines.
void export_map(const StaticMap & map, const std::filesystem::path & file);
void export_points(std::span<const Vec3> points, const std::filesystem::path & file);
/// Throws Error(Io) or Error(Format).
std::vector<Vec3> import_points(const std::filesystem::path & file);

}  // namespace rmot::map

#endif  // RMOT__MAP__STATIC_MAP_HPP_

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


#include "rmot/map/static_map.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "rmot/error.hpp"

namespace rmot::map
{

namespace
{

constexpr std::size_t kLeaf = 8;

using Heap = std::vector<std::pair<double, std::uint32_t>>;

void offer(Heap & heap, std::size_t k, double d2, std::uint32_t id)
{
  const std::pair<double, std::uint32_t> item(d2, id);
  if (heap.size() < k) {
    heap.push_back(item);
    std::push_heap(heap.begin(), heap.end());
  } else if (item < heap.front()) {
    std::pop_heap(heap.begin(), heap.end());
    heap.back() = item;
    std::push_heap(heap.begin(), heap.end());
  }
}

double bound(const Heap & heap, std::size_t k, double max_d2)
{
  return heap.size() < k ? max_d2 : std::min(max_d2, heap.front().first);
}

std::int32_t cell(double v, double grid)
{
  return static_cast<std::int32_t>(std::floor(v / grid));
}

}  // namespace

VoxelKey voxel_of(const Vec3 & p, double grid)
{
  if (!(grid > 0.0)) fail(ErrorCode::InvalidArgument, "voxel grid must be positive");
  return {cell(p.x(), grid), cell(p.y(), grid), cell(p.z(), grid)};
}

VoxelSet voxelize(std::span<const Vec3> points, double grid)
{
  VoxelSet out;
  out.reserve(points.size());
  for (const auto & p : points) out.insert(voxel_of(p, grid));
  return out;
}

KdTree::KdTree(std::vector<Vec3> points, std::vector<std::uint32_t> ids)
: points_(std::move(points)), ids_(std::move(ids)), split_(points_.size(), 0)
{
  if (points_.size() != ids_.size()) fail(ErrorCode::InvalidArgument, "kd-tree id count mismatch");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), std::uint32_t{0});
  build(0, points_.size());
  std::vector<Vec3> p(points_.size());
  std::vector<std::uint32_t> id(ids_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) {
    p[i] = points_[order_[i]];
    id[i] = ids_[order_[i]];
  }
  points_ = std::move(p);
  ids_ = std::move(id);
  order_.clear();
  order_.shrink_to_fit();
}

void KdTree::build(std::size_t lo, std::size_t hi)
{
  if (hi - lo <= kLeaf) return;
  Vec3 mn = points_[order_[lo]], mx = mn;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    mn = mn.cwiseMin(points_[order_[i]]);
    mx = mx.cwiseMax(points_[order_[i]]);
  }
  int d = 0;
  (mx - mn).maxCoeff(&d);
  const std::size_t mid = lo + (hi - lo) / 2;
  std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                   [&](std::uint32_t a, std::uint32_t b) { return points_[a][d] < points_[b][d]; });
  split_[mid] = static_cast<std::uint8_t>(d);
  build(lo, mid);
  build(mid + 1, hi);
}

void KdTree::search(const Vec3 & q, std::size_t k, double max_d2, Heap & heap) const
{
  if (k == 0 || points_.empty()) return;
  search(0, points_.size(), q, k, max_d2, heap);
}

void KdTree::search(std::size_t lo, std::size_t hi, const Vec3 & q, std::size_t k, double max_d2,
                    Heap & heap) const
{
  if (hi - lo <= kLeaf) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double d2 = (points_[i] - q).squaredNorm();
      if (d2 <= max_d2) offer(heap, k, d2, ids_[i]);
    }
    return;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  const int d = split_[mid];
  const double diff = q[d] - points_[mid][d];
  const double d2 = (points_[mid] - q).squaredNorm();
  if (d2 <= max_d2) offer(heap, k, d2, ids_[mid]);
  const bool left_first = diff <= 0.0;
  if (left_first) {
    search(lo, mid, q, k, max_d2, heap);
  } else {
    search(mid + 1, hi, q, k, max_d2, heap);
  }
  // Equality keeps ties reachable so index order is honoured.
  if (diff * diff <= bound(heap, k, max_d2)) {
    if (left_first) {
      search(mid + 1, hi, q, k, max_d2, heap);
    } else {
      search(lo, mid, q, k, max_d2, heap);
    }
  }
}

void StaticMap::insert(const Vec3 & p)
{
  if (!p.allFinite()) fail(ErrorCode::InvalidArgument, "map point is not finite");
  if (points_.size() >= std::numeric_limits<std::uint32_t>::max()) fail(ErrorCode::InvalidArgument, "map is full");
  buffer_.push_back(static_cast<std::uint32_t>(points_.size()));
  points_.push_back(p);
  if (buffer_.size() >= kBufferSize) flush();
}

void StaticMap::insert(std::span<const Vec3> points)
{
  for (const auto & p : points) insert(p);
}

void StaticMap::flush()
{
  // Binary-counter merge: the buffer plus every occupied low level become one
  // tree at the first free level.
  std::vector<std::uint32_t> ids = std::move(buffer_);
  buffer_.clear();
  std::size_t level = 0;
  for (; level < levels_.size() && levels_[level].size() > 0; ++level) {
    const auto & t = levels_[level].ids();
    ids.insert(ids.end(), t.begin(), t.end());
    levels_[level] = KdTree();
  }
  if (level == levels_.size()) levels_.emplace_back();
  std::vector<Vec3> pts;
  pts.reserve(ids.size());
  for (const auto id : ids) pts.push_back(points_[id]);
  levels_[level] = KdTree(std::move(pts), std::move(ids));
}

std::vector<Neighbor> StaticMap::knn(const Vec3 & q, std::size_t k, double max_radius) const
{
  if (!q.allFinite()) fail(ErrorCode::InvalidArgument, "query point is not finite");
  if (max_radius < 0.0) fail(ErrorCode::InvalidArgument, "search radius must be non-negative");
  std::vector<Neighbor> out;
  if (k == 0 || points_.empty()) return out;
  const double max_d2 = std::isinf(max_radius) ? max_radius : max_radius * max_radius;
  Heap heap;
  heap.reserve(k + 1);
  // Largest trees first: they usually hold the answer and tighten the bound.
  for (auto it = levels_.rbegin(); it != levels_.rend(); ++it) it->search(q, k, max_d2, heap);
  for (const auto id : buffer_) {
    const double d2 = (points_[id] - q).squaredNorm();
    if (d2 <= max_d2) offer(heap, k, d2, id);
  }
  std::sort_heap(heap.begin(), heap.end());
  out.reserve(heap.size());
  for (const auto & [d2, id] : heap) out.push_back({id, std::sqrt(d2)});
  return out;
}

VoxelSet StaticMap::voxel_occupancy(double grid) const { return voxelize(points_, grid); }

std::size_t StaticMap::tree_count() const
{
  return static_cast<std::size_t>(
    std::count_if(levels_.begin(), levels_.end(), [](const KdTree & t) { return t.size() > 0; }));
}

void export_map(const StaticMap & map, const std::filesystem::path & file) { export_points(map.points(), file); }

void export_points(std::span<const Vec3> points, const std::filesystem::path & file)
{
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + file.string());
  std::string line;
  char buf[64];
  for (const auto & p : points) {
    line.clear();
    for (int i = 0; i < 3; ++i) {
      const auto r = std::to_chars(buf, buf + sizeof(buf), p[i]);
      line.append(buf, r.ptr);
      line.push_back(i < 2 ? ' ' : '\n');
    }
    out << line;
  }
  if (!out) fail(ErrorCode::Io, "write failed for " + file.string());
}

std::vector<Vec3> import_points(const std::filesystem::path & file)
{
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + file.string());
  std::vector<Vec3> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const char * p = line.data();
    const char * end = p + line.size();
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
      while (p < end && *p == ' ') ++p;
      const auto r = std::from_chars(p, end, v[i]);
      if (r.ec != std::errc()) fail(ErrorCode::Format, file.string() + ":" + std::to_string(lineno) + ": bad number");
      p = r.ptr;
    }
    while (p < end && *p == ' ') ++p;
    if (p != end) fail(ErrorCode::Format, file.string() + ":" + std::to_string(lineno) + ": trailing data");
    out.push_back(v);
  }
  return out;
}

}  // namespace rmot::map

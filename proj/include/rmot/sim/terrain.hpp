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

#ifndef RMOT__SIM__TERRAIN_HPP_
#define RMOT__SIM__TERRAIN_HPP_

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace rmot::sim
{

/// One smooth value-noise layer.
struct Octave
{
  double wavelength{20.0};  // m, lattice spacing of the noise
  double amplitude{1.0};    // m, max |contribution|
};

struct TerrainParams
{
  Eigen::Vector2d origin{-100.0, -100.0};  // m, lower-left corner
  Eigen::Vector2d size{200.0, 200.0};      // m
  double cell_size{0.5};                    // m
  std::vector<Octave> octaves;
  std::uint64_t seed{0};  // 0: use the scenario seed

  void validate() const;
  double amplitude_bound() const;
};

/// Heightfield sampled on a regular grid. Heights between grid nodes are
/// bilinearly interpolated.
class TerrainField
{
public:
  TerrainField() = default;
  TerrainField(TerrainParams params, int nx, int ny, std::vector<double> heights);

  const TerrainParams & params() const { return params_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double node(int ix, int iy) const { return heights_[static_cast<size_t>(iy) * nx_ + ix]; }
  const std::vector<double> & heights() const { return heights_; }

  bool contains(double x, double y) const;
  /// Throws Error(OutOfExtent) outside the grid.
  double height_at(double x, double y) const;

private:
  TerrainParams params_;
  int nx_{0};
  int ny_{0};
  std::vector<double> heights_;
};

/// Sum of smooth noise octaves. Deterministic in `seed`; |z| never exceeds the
/// sum of octave amplitudes.
TerrainField generate_terrain(std::uint64_t seed, const TerrainParams & params);

}  // namespace rmot::sim

#endif  // RMOT__SIM__TERRAIN_HPP_

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

#include "rmot/sim/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "rmot/error.hpp"

namespace rmot::sim
{

void TerrainParams::validate() const
{
  if (!(cell_size > 0.0)) fail(ErrorCode::Config, "terrain.cell_size must be positive");
  if (!(size.x() >= cell_size && size.y() >= cell_size)) {
    fail(ErrorCode::Config, "terrain.size must cover at least one cell");
  }
  if (!origin.allFinite()) fail(ErrorCode::Config, "terrain.origin must be finite");
  for (const auto & o : octaves) {
    if (!(o.wavelength > 0.0)) fail(ErrorCode::Config, "terrain octave wavelength must be positive");
    if (!(o.amplitude >= 0.0)) fail(ErrorCode::Config, "terrain octave amplitude must be >= 0");
  }
}

double TerrainParams::amplitude_bound() const
{
  double s = 0.0;
  for (const auto & o : octaves) s += o.amplitude;
  return s;
}

TerrainField::TerrainField(TerrainParams params, int nx, int ny, std::vector<double> heights)
: params_(std::move(params)), nx_(nx), ny_(ny), heights_(std::move(heights))
{
  if (nx_ < 2 || ny_ < 2 || heights_.size() != static_cast<size_t>(nx_) * ny_) {
    fail(ErrorCode::InvalidArgument, "terrain grid dimensions do not match height count");
  }
}

bool TerrainField::contains(double x, double y) const
{
  const double u = x - params_.origin.x();
  const double v = y - params_.origin.y();
  const double maxu = (nx_ - 1) * params_.cell_size;
  const double maxv = (ny_ - 1) * params_.cell_size;
  return u >= 0.0 && v >= 0.0 && u <= maxu && v <= maxv;
}

double TerrainField::height_at(double x, double y) const
{
  if (!contains(x, y)) {
    fail(ErrorCode::OutOfExtent,
         "terrain query (" + std::to_string(x) + ", " + std::to_string(y) + ") is outside the field");
  }
  const double u = (x - params_.origin.x()) / params_.cell_size;
  const double v = (y - params_.origin.y()) / params_.cell_size;
  const int i = std::min(static_cast<int>(std::floor(u)), nx_ - 2);
  const int j = std::min(static_cast<int>(std::floor(v)), ny_ - 2);
  const double fu = u - i;
  const double fv = v - j;
  const double h00 = node(i, j);
  const double h10 = node(i + 1, j);
  const double h01 = node(i, j + 1);
  const double h11 = node(i + 1, j + 1);
  return (1 - fu) * (1 - fv) * h00 + fu * (1 - fv) * h10 + (1 - fu) * fv * h01 + fu * fv * h11;
}

namespace
{

// Value noise on a coarse lattice, smoothstep-interpolated. Each sample is a
// convex combination of lattice values in [-1, 1].
class ValueNoise
{
public:
  ValueNoise(std::uint64_t seed, const Eigen::Vector2d & origin, const Eigen::Vector2d & size,
             double wavelength)
  : origin_(origin), wavelength_(wavelength)
  {
    lx_ = static_cast<int>(std::ceil(size.x() / wavelength)) + 2;
    ly_ = static_cast<int>(std::ceil(size.y() / wavelength)) + 2;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    lattice_.resize(static_cast<size_t>(lx_) * ly_);
    for (auto & v : lattice_) v = u(rng);
  }

  double operator()(double x, double y) const
  {
    const double u = (x - origin_.x()) / wavelength_;
    const double v = (y - origin_.y()) / wavelength_;
    const int i = std::clamp(static_cast<int>(std::floor(u)), 0, lx_ - 2);
    const int j = std::clamp(static_cast<int>(std::floor(v)), 0, ly_ - 2);
    const double fu = smooth(std::clamp(u - i, 0.0, 1.0));
    const double fv = smooth(std::clamp(v - j, 0.0, 1.0));
    const double a = at(i, j), b = at(i + 1, j), c = at(i, j + 1), d = at(i + 1, j + 1);
    return (1 - fu) * (1 - fv) * a + fu * (1 - fv) * b + (1 - fu) * fv * c + fu * fv * d;
  }

private:
  static double smooth(double t) { return t * t * (3.0 - 2.0 * t); }
  double at(int i, int j) const { return lattice_[static_cast<size_t>(j) * lx_ + i]; }

  Eigen::Vector2d origin_;
  double wavelength_;
  int lx_{0};
  int ly_{0};
  std::vector<double> lattice_;
};

}  // namespace

TerrainField generate_terrain(std::uint64_t seed, const TerrainParams & params)
{
  params.validate();
  const int nx = static_cast<int>(std::floor(params.size.x() / params.cell_size + 1e-9)) + 1;
  const int ny = static_cast<int>(std::floor(params.size.y() / params.cell_size + 1e-9)) + 1;
  std::vector<double> heights(static_cast<size_t>(nx) * ny, 0.0);
  for (size_t k = 0; k < params.octaves.size(); ++k) {
    const auto & oct = params.octaves[k];
    if (oct.amplitude == 0.0) continue;
    const ValueNoise noise(seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL * (k + 1), params.origin,
                           params.size, oct.wavelength);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double x = params.origin.x() + i * params.cell_size;
        const double y = params.origin.y() + j * params.cell_size;
        heights[static_cast<size_t>(j) * nx + i] += oct.amplitude * noise(x, y);
      }
    }
  }
  return TerrainField(params, nx, ny, std::move(heights));
}

}  // namespace rmot::sim

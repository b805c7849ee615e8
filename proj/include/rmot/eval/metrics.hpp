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


#ifndef RMOT__EVAL__METRICS_HPP_
#define RMOT__EVAL__METRICS_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "json.hpp"

#include "rmot/geometry.hpp"
#include "rmot/map/static_map.hpp"
#include "rmot/sim/frames.hpp"

namespace rmot::eval
{

/// One reported (confirmed) track in one frame.
struct ReportedObject
{
  std::int64_t id{0};
  Vec3 position{Vec3::Zero()};
  ObjectClass cls{ObjectClass::Person};
};

struct FrameEvalCounts
{
  std::int64_t frame{0};
  int gt{0};
  int tp{0};
  int fn{0};
  int fp{0};
  int idsw{0};
  int tl{0};                   // matches with the correct class
  int ignored{0};              // reports absorbed by don't-care ground truth
  std::vector<double> errors;  // one distance per match, m

  bool consistent() const;
  nlohmann::json to_json() const;
};

struct TrackingTotals
{
  long gt{0}, tp{0}, fn{0}, fp{0}, idsw{0}, tl{0}, ignored{0};
  double error_sum{0.0};
  std::size_t frames{0};

  void add(const FrameEvalCounts & c);
};

TrackingTotals accumulate(std::span<const FrameEvalCounts> frames);

/// 1 - sum(FN + FP + IDsw) / sum(GT). Throws Error(EmptyInput) when sum(GT) = 0.
double mota(const TrackingTotals & t);
/// Mean matched distance. Throws Error(NoMatches) when sum(TP) = 0.
double motp(const TrackingTotals & t);
/// Fraction of matches with the correct class. Throws Error(NoMatches).
double oca(const TrackingTotals & t);

double mota(std::span<const FrameEvalCounts> frames);
double motp(std::span<const FrameEvalCounts> frames);
double oca(std::span<const FrameEvalCounts> frames);

struct MatcherParams
{
  double gate{0.5};  // m
  // A ground-truth object only counts once it has been visible for this many
  // consecutive frames; before that, and while invisible, it is don't-care:
  // a report on it is neither a hit nor a false positive, and missing it is
  // not a miss.
  int min_visible_run{3};

  void validate() const;
};

/// Per-frame optimal matching of reports to ground truth with identity-switch
/// memory across frames. Frames must be fed in order.
class GtMatcher
{
public:
  explicit GtMatcher(MatcherParams params = {});

  FrameEvalCounts match(std::int64_t frame, std::span<const ReportedObject> reports,
                        std::span<const AgentTruth> truth);

  /// Last track id matched to each ground-truth id.
  const std::map<int, std::int64_t> & correspondence() const { return last_match_; }

private:
  MatcherParams params_;
  std::map<int, std::int64_t> last_match_;
  std::map<int, int> visible_run_;
  std::int64_t last_frame_{-1};
};

/// One predicted trajectory and the ground truth over the same frames.
struct PredictionSample
{
  std::vector<Vec3> predicted;
  std::vector<Vec3> truth;
};

using PredictionEvalSet = std::vector<PredictionSample>;

/// Mean per-point distance over all samples. Throws Error(EmptyInput) on an
/// empty set and Error(InvalidArgument) on misaligned samples.
double ade(std::span<const PredictionSample> set);
/// Mean final-point distance.
double fde(std::span<const PredictionSample> set);
/// Mean absolute final-point error along z.
double fde_z(std::span<const PredictionSample> set);

struct MapEvalCounts
{
  std::size_t n_sp{0};  // static voxels present in the map
  std::size_t n_sa{0};  // static voxels in the original data
  std::size_t n_dp{0};  // dynamic voxels present in the map
  std::size_t n_da{0};  // dynamic voxels in the original data

  nlohmann::json to_json() const;
};

/// Voxelized truth accumulated from labeled clouds. A cell touched by any
/// static point is static; a cell is dynamic only if no static point hit it.
class MapTruth
{
public:
  explicit MapTruth(double grid = 0.2);

  void add(std::span<const CloudPoint> cloud, const Pose & ego);
  void add_static(const Vec3 & world);
  void add_dynamic(const Vec3 & world);

  double grid() const { return grid_; }
  const map::VoxelSet & static_voxels() const { return static_; }
  /// Dynamic-only cells.
  map::VoxelSet dynamic_voxels() const;

private:
  double grid_;
  map::VoxelSet static_;
  map::VoxelSet dynamic_;
};

MapEvalCounts map_counts(const map::VoxelSet & output, const MapTruth & truth);

struct PrRr
{
  double pr{0.0};
  double rr{0.0};
};

/// PR = N_sp / N_sa and RR = 1 - N_dp / N_da. Throws Error(EmptyInput) when
/// the original data has no static cells. With no dynamic cells RR is 1.
PrRr map_pr_rr(const MapEvalCounts & c);
PrRr map_pr_rr(std::span<const Vec3> output_map, const MapTruth & truth);

/// Harmonic mean of PR and RR. Throws Error(BothZero) or Error(InvalidArgument).
double f1(double pr, double rr);

}  // namespace rmot::eval

#endif  // RMOT__EVAL__METRICS_HPP_

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


#include "rmot/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rmot/error.hpp"
#include "rmot/track/assignment.hpp"

namespace rmot::eval
{

bool FrameEvalCounts::consistent() const
{
  return gt >= 0 && tp >= 0 && fn >= 0 && fp >= 0 && idsw >= 0 && tl >= 0 && tp + fn == gt && tl <= tp &&
         idsw <= tp && errors.size() == static_cast<std::size_t>(tp);
}

nlohmann::json FrameEvalCounts::to_json() const
{
  double sum = 0.0;
  for (double e : errors) sum += e;
  return {{"frame", frame}, {"gt", gt},   {"tp", tp},           {"fn", fn},          {"fp", fp},
          {"idsw", idsw},   {"tl", tl},   {"ignored", ignored}, {"error_sum", sum}};
}

void TrackingTotals::add(const FrameEvalCounts & c)
{
  gt += c.gt;
  tp += c.tp;
  fn += c.fn;
  fp += c.fp;
  idsw += c.idsw;
  tl += c.tl;
  ignored += c.ignored;
  for (double e : c.errors) error_sum += e;
  ++frames;
}

TrackingTotals accumulate(std::span<const FrameEvalCounts> frames)
{
  TrackingTotals t;
  for (const auto & f : frames) t.add(f);
  return t;
}

double mota(const TrackingTotals & t)
{
  if (t.gt <= 0) fail(ErrorCode::EmptyInput, "MOTA needs at least one ground-truth object");
  return 1.0 - static_cast<double>(t.fn + t.fp + t.idsw) / static_cast<double>(t.gt);
}

double motp(const TrackingTotals & t)
{
  if (t.tp <= 0) fail(ErrorCode::NoMatches, "MOTP needs at least one match");
  return t.error_sum / static_cast<double>(t.tp);
}

double oca(const TrackingTotals & t)
{
  if (t.tp <= 0) fail(ErrorCode::NoMatches, "OCA needs at least one match");
  return static_cast<double>(t.tl) / static_cast<double>(t.tp);
}

double mota(std::span<const FrameEvalCounts> frames) { return mota(accumulate(frames)); }
double motp(std::span<const FrameEvalCounts> frames) { return motp(accumulate(frames)); }
double oca(std::span<const FrameEvalCounts> frames) { return oca(accumulate(frames)); }

void MatcherParams::validate() const
{
  if (!(gate > 0.0)) fail(ErrorCode::Config, "matching gate must be positive");
  if (min_visible_run < 1) fail(ErrorCode::Config, "min_visible_run must be >= 1");
}

GtMatcher::GtMatcher(MatcherParams params) : params_(params) { params_.validate(); }

FrameEvalCounts GtMatcher::match(std::int64_t frame, std::span<const ReportedObject> reports,
                                 std::span<const AgentTruth> truth)
{
  if (frame <= last_frame_) fail(ErrorCode::OutOfOrder, "evaluation frames must increase");
  const bool contiguous = frame == last_frame_ + 1;
  last_frame_ = frame;

  std::map<int, int> runs;
  std::vector<int> scored, dont_care;
  for (std::size_t g = 0; g < truth.size(); ++g) {
    const auto & a = truth[g];
    if (a.visible) {
      const auto it = visible_run_.find(a.id);
      runs[a.id] = (contiguous && it != visible_run_.end() ? it->second : 0) + 1;
    }
    const bool counts = a.visible && runs[a.id] >= params_.min_visible_run;
    (counts ? scored : dont_care).push_back(static_cast<int>(g));
  }
  visible_run_ = std::move(runs);

  FrameEvalCounts out;
  out.frame = frame;
  out.gt = static_cast<int>(scored.size());

  auto distances = [&](const std::vector<int> & rows, const std::vector<int> & cols) {
    Eigen::MatrixXd c(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < cols.size(); ++j) {
        c(i, j) = euclidean3(reports[rows[i]].position, truth[cols[j]].position);
      }
    }
    return c;
  };

  std::vector<int> all_reports(reports.size());
  for (std::size_t i = 0; i < reports.size(); ++i) all_reports[i] = static_cast<int>(i);

  const Eigen::MatrixXd cost = distances(all_reports, scored);
  const auto primary = track::hungarian_assign(cost, params_.gate);
  for (const auto & [r, g] : primary.matches) {
    const ReportedObject & rep = reports[r];
    const AgentTruth & gt = truth[scored[g]];
    ++out.tp;
    out.errors.push_back(cost(r, g));
    if (rep.cls == gt.cls) ++out.tl;
    const auto it = last_match_.find(gt.id);
    if (it != last_match_.end() && it->second != rep.id) ++out.idsw;
    last_match_[gt.id] = rep.id;
  }
  out.fn = out.gt - out.tp;

  std::vector<int> leftover;
  for (const int r : primary.unmatched_rows) leftover.push_back(r);
  int absorbed = 0;
  if (!leftover.empty() && !dont_care.empty()) {
    const auto secondary = track::hungarian_assign(distances(leftover, dont_care), params_.gate);
    absorbed = static_cast<int>(secondary.matches.size());
  }
  out.ignored = absorbed;
  out.fp = static_cast<int>(leftover.size()) - absorbed;
  return out;
}

namespace
{

void check_set(std::span<const PredictionSample> set)
{
  if (set.empty()) fail(ErrorCode::EmptyInput, "prediction set is empty");
  for (const auto & s : set) {
    if (s.predicted.empty() || s.predicted.size() != s.truth.size()) {
      fail(ErrorCode::InvalidArgument, "prediction and ground truth are not aligned");
    }
  }
}

}  // namespace

double ade(std::span<const PredictionSample> set)
{
  check_set(set);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto & s : set) {
    for (std::size_t j = 0; j < s.predicted.size(); ++j) sum += euclidean3(s.predicted[j], s.truth[j]);
    n += s.predicted.size();
  }
  return sum / static_cast<double>(n);
}

double fde(std::span<const PredictionSample> set)
{
  check_set(set);
  double sum = 0.0;
  for (const auto & s : set) sum += euclidean3(s.predicted.back(), s.truth.back());
  return sum / static_cast<double>(set.size());
}

double fde_z(std::span<const PredictionSample> set)
{
  check_set(set);
  double sum = 0.0;
  for (const auto & s : set) sum += std::abs(s.predicted.back().z() - s.truth.back().z());
  return sum / static_cast<double>(set.size());
}

nlohmann::json MapEvalCounts::to_json() const
{
  return {{"n_sp", n_sp}, {"n_sa", n_sa}, {"n_dp", n_dp}, {"n_da", n_da}};
}

MapTruth::MapTruth(double grid) : grid_(grid)
{
  if (!(grid > 0.0)) fail(ErrorCode::InvalidArgument, "evaluation grid must be positive");
}

void MapTruth::add(std::span<const CloudPoint> cloud, const Pose & ego)
{
  const Eigen::Isometry3d T = ego.isometry();
  for (const auto & p : cloud) {
    const Vec3 w = T * p.p.cast<double>();
    if (p.label == kStaticLabel) {
      add_static(w);
    } else {
      add_dynamic(w);
    }
  }
}

void MapTruth::add_static(const Vec3 & world) { static_.insert(map::voxel_of(world, grid_)); }
void MapTruth::add_dynamic(const Vec3 & world) { dynamic_.insert(map::voxel_of(world, grid_)); }

map::VoxelSet MapTruth::dynamic_voxels() const
{
  map::VoxelSet out;
  for (const auto & k : dynamic_) {
    if (!static_.count(k)) out.insert(k);
  }
  return out;
}

MapEvalCounts map_counts(const map::VoxelSet & output, const MapTruth & truth)
{
  MapEvalCounts c;
  c.n_sa = truth.static_voxels().size();
  for (const auto & k : truth.static_voxels()) c.n_sp += output.count(k);
  const auto dyn = truth.dynamic_voxels();
  c.n_da = dyn.size();
  for (const auto & k : dyn) c.n_dp += output.count(k);
  return c;
}

PrRr map_pr_rr(const MapEvalCounts & c)
{
  if (c.n_sa == 0) fail(ErrorCode::EmptyInput, "original data has no static cells");
  if (c.n_sp > c.n_sa || c.n_dp > c.n_da) fail(ErrorCode::InvalidArgument, "inconsistent map counts");
  PrRr out;
  out.pr = static_cast<double>(c.n_sp) / static_cast<double>(c.n_sa);
  out.rr = c.n_da == 0 ? 1.0 : 1.0 - static_cast<double>(c.n_dp) / static_cast<double>(c.n_da);
  return out;
}

PrRr map_pr_rr(std::span<const Vec3> output_map, const MapTruth & truth)
{
  return map_pr_rr(map_counts(map::voxelize(output_map, truth.grid()), truth));
}

double f1(double pr, double rr)
{
  if (!(pr >= 0.0 && pr <= 1.0 && rr >= 0.0 && rr <= 1.0)) fail(ErrorCode::InvalidArgument, "PR and RR must lie in [0, 1]");
  if (pr == 0.0 && rr == 0.0) fail(ErrorCode::BothZero, "F1 is undefined when PR and RR are both zero");
  return 2.0 * pr * rr / (pr + rr);
}

}  // namespace rmot::eval

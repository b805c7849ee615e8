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


#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "rmot/error.hpp"
#include "rmot/sim/simulator.hpp"
#include "rmot/track/assignment.hpp"
#include "rmot/track/association.hpp"
#include "rmot/track/kalman.hpp"
#include "rmot/track/lifecycle.hpp"
#include "rmot/track/tracker.hpp"
#include "test_support.hpp"

namespace rmot::track
{
namespace
{

// ---------------------------------------------------------------- Kalman

KalmanCV filter_at(const Vec3 & p, const Vec3 & v)
{
  KalmanCV kf = KalmanCV::init(p, KalmanParams{});
  kf.x.tail<3>() = v;
  return kf;
}

TEST(Kalman, PredictMovesAlongVelocity)
{
  const KalmanCV kf = filter_at(Vec3::Zero(), Vec3(2, 0, 0));
  const KalmanCV out = kf_predict(kf, 0.5);
  EXPECT_TRUE(out.position().isApprox(Vec3(1, 0, 0)));
  EXPECT_TRUE(kf.position().isZero());  // input untouched
}

TEST(Kalman, ZeroVelocityHoldsPositionAndGrowsCovariance)
{
  const KalmanCV kf = filter_at(Vec3(1, 2, 3), Vec3::Zero());
  const KalmanCV out = kf_predict(kf, 0.1);
  EXPECT_EQ(out.position(), kf.position());
  EXPECT_GT(out.P.trace(), kf.P.trace());
}

TEST(Kalman, TwoSmallStepsEqualOneLargeStepInMean)
{
  const KalmanCV kf = filter_at(Vec3(1, -2, 0.5), Vec3(0.3, 1.7, -0.2));
  const KalmanCV a = kf_predict(kf_predict(kf, 0.1), 0.1);
  const KalmanCV b = kf_predict(kf, 0.2);
  EXPECT_LT((a.x - b.x).norm(), 1e-12);
  EXPECT_THROW(kf_predict(kf, 0.0), Error);
}

TEST(Kalman, PerfectMeasurementLimit)
{
  KalmanCV kf = filter_at(Vec3::Zero(), Vec3(1, 0, 0));
  kf.r = 1e-16;
  const Vec3 z(0.4, -0.2, 1.0);
  EXPECT_LT((kf_update(kf, z).position() - z).norm(), 1e-6);
}

TEST(Kalman, UselessMeasurementLimit)
{
  KalmanCV kf = filter_at(Vec3(1, 1, 1), Vec3(1, 0, 0));
  kf.r = 1e12;
  const KalmanCV out = kf_update(kf, Vec3(5, -3, 2));
  EXPECT_LT((out.x - kf.x).norm(), 1e-6);
}

TEST(Kalman, ScalarGainMatchesClosedForm)
{
  // Decoupled axes with no position/velocity correlation reduce to a scalar
  // filter on each position coordinate: k = p / (p + r).
  KalmanCV kf;
  kf.x << 1.0, 2.0, 3.0, 0.5, 0.0, 0.0;
  kf.P = Cov6::Identity();
  kf.P.diagonal() << 0.7, 0.7, 0.7, 2.0, 2.0, 2.0;
  kf.r = 0.3;
  const Vec3 z(2.0, 2.0, 2.0);
  const KalmanCV out = kf_update(kf, z);
  const double k = 0.7 / (0.7 + 0.3);
  EXPECT_NEAR(out.x(0), 1.0 + k * (2.0 - 1.0), 1e-12);
  EXPECT_NEAR(out.x(2), 3.0 + k * (2.0 - 3.0), 1e-12);
  EXPECT_NEAR(out.P(0, 0), (1.0 - k) * 0.7, 1e-12);
  EXPECT_NEAR(out.x(3), 0.5, 1e-12);  // uncorrelated velocity untouched
  EXPECT_LE(out.P.trace(), kf.P.trace());
}

TEST(Kalman, SingularInnovationIsNumericError)
{
  KalmanCV kf;
  kf.P = Cov6::Zero();
  kf.r = 0.0;
  try {
    kf_update(kf, Vec3::Zero());
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::Numeric);
  }
}

TEST(Kalman, CovarianceStaysSpdOverRandomCycles)
{
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dt(0.01, 0.5);
  std::normal_distribution<double> g(0.0, 3.0);
  KalmanParams params;
  params.meas_sigma = 0.05;
  KalmanCV kf = KalmanCV::init(Vec3::Zero(), params);
  for (int i = 0; i < 10000; ++i) {
    kf = kf_predict(kf, dt(rng));
    if (i % 3 != 0) kf = kf_update(kf, kf.position() + Vec3(g(rng), g(rng), g(rng)));
    ASSERT_LT((kf.P - kf.P.transpose()).norm(), 1e-12);
    const Eigen::SelfAdjointEigenSolver<Cov6> es(kf.P);
    ASSERT_GT(es.eigenvalues().minCoeff(), 1e-12) << "cycle " << i;
  }
}

// ------------------------------------------------------------ Assignment

struct Best
{
  int count{-1};
  double cost{0.0};
};

// Exhaustive oracle over all partial matchings: most pairs, then least cost.
void enumerate(const Eigen::MatrixXd & c, const Eigen::MatrixXd & g, int row, std::vector<char> & used, int count,
               double cost, Best & best)
{
  if (row == c.rows()) {
    if (count > best.count || (count == best.count && cost < best.cost - 1e-12)) best = {count, cost};
    return;
  }
  enumerate(c, g, row + 1, used, count, cost, best);
  for (int j = 0; j < c.cols(); ++j) {
    if (used[j] || !(c(row, j) <= g(row, j))) continue;
    used[j] = 1;
    enumerate(c, g, row + 1, used, count + 1, cost + c(row, j), best);
    used[j] = 0;
  }
}

Best brute_force(const Eigen::MatrixXd & c, const Eigen::MatrixXd & g)
{
  Best best;
  std::vector<char> used(c.cols(), 0);
  enumerate(c, g, 0, used, 0, 0.0, best);
  return best;
}

void check_consistent(const AssignmentResult & r, int n, int m)
{
  std::vector<int> rows(n, 0), cols(m, 0);
  for (const auto & [i, j] : r.matches) {
    rows[i]++;
    cols[j]++;
  }
  for (int i : r.unmatched_rows) rows[i]++;
  for (int j : r.unmatched_cols) cols[j]++;
  for (int v : rows) EXPECT_EQ(v, 1);
  for (int v : cols) EXPECT_EQ(v, 1);
}

TEST(Assignment, TwoByTwo)
{
  Eigen::MatrixXd c(2, 2);
  c << 1, 2, 3, 1;
  const AssignmentResult r = hungarian_assign(c);
  ASSERT_EQ(r.matches.size(), 2u);
  EXPECT_EQ(r.matches[0], std::make_pair(0, 0));
  EXPECT_EQ(r.matches[1], std::make_pair(1, 1));
  EXPECT_DOUBLE_EQ(r.total_cost, 2.0);
}

TEST(Assignment, GatedOut)
{
  Eigen::MatrixXd c(1, 1);
  c << 1.0;
  const AssignmentResult r = hungarian_assign(c, 0.5);
  EXPECT_TRUE(r.matches.empty());
  EXPECT_EQ(r.unmatched_rows, std::vector<int>{0});
  EXPECT_EQ(r.unmatched_cols, std::vector<int>{0});
}

TEST(Assignment, EmptyInputs)
{
  const AssignmentResult a = hungarian_assign(Eigen::MatrixXd(0, 3));
  EXPECT_TRUE(a.matches.empty());
  EXPECT_EQ(a.unmatched_cols.size(), 3u);
  const AssignmentResult b = hungarian_assign(Eigen::MatrixXd(2, 0));
  EXPECT_EQ(b.unmatched_rows.size(), 2u);
}

TEST(Assignment, RandomFiveByFiveMatchesPermutationOracle)
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::MatrixXd c(5, 5);
    for (int i = 0; i < 25; ++i) c.data()[i] = u(rng);
    std::vector<int> perm(5);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double s = 0.0;
      for (int i = 0; i < 5; ++i) s += c(i, perm[i]);
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const AssignmentResult r = hungarian_assign(c);
    EXPECT_EQ(r.matches.size(), 5u);
    EXPECT_NEAR(r.total_cost, best, 1e-9);
  }
}

TEST(Assignment, GatedRectangularPropertyAgainstExhaustiveOracle)
{
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<int> dim(0, 6);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = dim(rng), m = dim(rng);
    Eigen::MatrixXd c(n, m), g(n, m);
    for (int i = 0; i < n * m; ++i) {
      c.data()[i] = u(rng);
      g.data()[i] = trial % 3 == 0 ? std::numeric_limits<double>::infinity() : u(rng);
    }
    const AssignmentResult r = hungarian_assign(c, g);
    check_consistent(r, n, m);
    for (const auto & [i, j] : r.matches) EXPECT_LE(c(i, j), g(i, j));
    const Best b = brute_force(c, g);
    EXPECT_EQ(static_cast<int>(r.matches.size()), b.count);
    EXPECT_NEAR(r.total_cost, b.cost, 1e-9);
  }
}

// ------------------------------------------------------------ Association

TEST(AdaptiveGate, Formula)
{
  EXPECT_DOUBLE_EQ(adaptive_threshold(0, 0, {1.0, 0.5, 50}), 0.5);
  EXPECT_DOUBLE_EQ(adaptive_threshold(3, 4, {1.0, 0.5, 50}), 5.5);
  EXPECT_DOUBLE_EQ(adaptive_threshold(0, 5, {0.2, 1.0, 50}), 2.0);
}

TEST(AdaptiveGate, MonotoneInSpeedProperty)
{
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-10, 10), pa(0, 2), pb(0.01, 3);
  for (int i = 0; i < 1000; ++i) {
    const AdaptiveGateParams p{pa(rng), pb(rng), 50};
    const double vx = u(rng), vy = u(rng), s = 1.0 + std::abs(u(rng));
    EXPECT_GE(adaptive_threshold(s * vx, s * vy, p), adaptive_threshold(vx, vy, p));
    EXPECT_EQ(adaptive_threshold(0, 0, p), p.b);
  }
}

OrientedBox3 det_at(const Vec3 & lidar)
{
  OrientedBox3 b;
  b.center = lidar;
  b.size = Vec3(0.6, 0.6, 1.7);
  return b;
}

Detection2D image_of(const Vec3 & lidar, const CameraModel & cam)
{
  Detection2D d;
  d.center = project_to_image(lidar, cam);
  d.extent = Eigen::Vector2d(20, 40);
  return d;
}

TEST(Association, PerfectAgreementIsMatched)
{
  const CameraModel cam;
  const Pose ego;
  const Vec3 p(10, 1, 0);
  const std::vector<TrackPrediction> tracks{{p, Vec3::Zero()}};
  const std::vector<OrientedBox3> d3{det_at(p)};
  const std::vector<Detection2D> d2{image_of(p, cam)};
  const AssociationOutcome out = associate_frame(tracks, ego, d3, d2, cam, AdaptiveGateParams{});
  ASSERT_EQ(out.track_condition.size(), 1u);
  EXPECT_EQ(out.track_condition[0], Condition::Matched);
  EXPECT_EQ(out.track_measurement[0], 0);
  EXPECT_TRUE(out.new_instances.empty());
}

TEST(Association, ConsistentPairWithoutTracksIsNewInstance)
{
  const CameraModel cam;
  const Vec3 p(12, -2, 0.3);
  const std::vector<OrientedBox3> d3{det_at(p)};
  const std::vector<Detection2D> d2{image_of(p, cam)};
  const AssociationOutcome out = associate_frame({}, Pose{}, d3, d2, cam, AdaptiveGateParams{});
  EXPECT_EQ(out.new_instances, std::vector<int>{0});
  EXPECT_EQ(out.new_instance_image, std::vector<int>{0});
}

TEST(Association, LidarOnlyDetectionDoesNotSpawn)
{
  const CameraModel cam;
  const std::vector<OrientedBox3> d3{det_at(Vec3(12, -2, 0.3))};
  const AssociationOutcome out = associate_frame({}, Pose{}, d3, {}, cam, AdaptiveGateParams{});
  EXPECT_TRUE(out.new_instances.empty());
  EXPECT_EQ(out.unmatched_det3d, std::vector<int>{0});
}

TEST(Association, NoDetectionsMeansMiss)
{
  const std::vector<TrackPrediction> tracks{{Vec3(10, 0, 0), Vec3(1, 0, 0)}};
  const AssociationOutcome out = associate_frame(tracks, Pose{}, {}, {}, CameraModel{}, AdaptiveGateParams{});
  EXPECT_EQ(out.track_condition[0], Condition::Miss);
  EXPECT_EQ(out.unmatched_tracks, std::vector<int>{0});
}

TEST(Association, MissingImageAgreementIsMatchedNoImage)
{
  const CameraModel cam;
  const Vec3 p(10, 0, 0);
  const std::vector<TrackPrediction> tracks{{p, Vec3::Zero()}};
  const std::vector<OrientedBox3> d3{det_at(p + Vec3(0.2, 0, 0))};
  const AssociationOutcome out = associate_frame(tracks, Pose{}, d3, {}, cam, AdaptiveGateParams{});
  EXPECT_EQ(out.track_condition[0], Condition::MatchedNoImage);
  EXPECT_EQ(out.track_measurement[0], 0);
}

TEST(Association, ImageOnlyTrackDoesNotReceiveMeasurement)
{
  const CameraModel cam;
  const Vec3 p(10, 0, 0);
  const std::vector<TrackPrediction> tracks{{p, Vec3::Zero()}};
  const std::vector<Detection2D> d2{image_of(p, cam)};
  const AssociationOutcome out = associate_frame(tracks, Pose{}, {}, d2, cam, AdaptiveGateParams{});
  EXPECT_EQ(out.track_condition[0], Condition::ImageOnly);
  EXPECT_EQ(out.track_measurement[0], -1);
}

TEST(Association, AdaptiveGateAdmitsFastTarget)
{
  const CameraModel cam;
  const Vec3 pred(10, 0, 0);
  const Vec3 det = pred + Vec3(1.5, 0, 0);
  const std::vector<TrackPrediction> tracks{{pred, Vec3(5, 0, 0)}};
  const std::vector<OrientedBox3> d3{det_at(det)};
  const AdaptiveGateParams adaptive{0.3, 0.5, 50};
  ASSERT_DOUBLE_EQ(adaptive_threshold(5, 0, adaptive), 2.0);
  EXPECT_EQ(associate_frame(tracks, Pose{}, d3, {}, cam, adaptive).track_measurement[0], 0);
  const AdaptiveGateParams fixed{0.0, 0.5, 50};
  EXPECT_EQ(associate_frame(tracks, Pose{}, d3, {}, cam, fixed).track_measurement[0], -1);
}

TEST(Association, UsesEgoPoseForWorldTracks)
{
  const CameraModel cam;
  const Pose ego = Pose::from_yaw(Vec3(100, 50, 3), 1.0);
  const Vec3 lidar(8, 1, -0.5);
  const Vec3 world = transform_point(lidar, ego);
  const std::vector<TrackPrediction> tracks{{world, Vec3::Zero()}};
  const std::vector<OrientedBox3> d3{det_at(lidar)};
  const std::vector<Detection2D> d2{image_of(lidar, cam)};
  const AssociationOutcome out = associate_frame(tracks, ego, d3, d2, cam, AdaptiveGateParams{});
  EXPECT_EQ(out.track_condition[0], Condition::Matched);
}

TEST(Association, EachDetectionUsedAtMostOncePerPairingProperty)
{
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> fx(3, 30), fy(-10, 10), fz(-1, 1);
  std::uniform_int_distribution<int> cnt(0, 6);
  const CameraModel cam;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TrackPrediction> tracks(cnt(rng));
    for (auto & t : tracks) t = {Vec3(fx(rng), fy(rng), fz(rng)), Vec3(fy(rng), fy(rng), 0)};
    std::vector<OrientedBox3> d3(cnt(rng));
    for (auto & d : d3) d = det_at(Vec3(fx(rng), fy(rng), fz(rng)));
    std::vector<Detection2D> d2;
    for (const auto & d : d3) {
      if (cnt(rng) % 2 == 0) d2.push_back(image_of(d.center, cam));
    }
    const AssociationOutcome out = associate_frame(tracks, Pose{}, d3, d2, cam, AdaptiveGateParams{0.5, 1.0, 50});
    std::vector<int> used3(d3.size(), 0);
    for (int j : out.track_measurement) {
      if (j >= 0) used3[j]++;
    }
    for (int j : out.new_instances) used3[j]++;
    for (int j : out.unmatched_det3d) used3[j]++;
    for (int v : used3) EXPECT_EQ(v, 1);
  }
}

// ------------------------------------------------------------- Lifecycle

Lifecycle born() { return Lifecycle{}; }

TEST(Lifecycle, ConfirmsOnThirdConsecutiveHit)
{
  const LifecycleParams p;
  Lifecycle s = born();  // frame 1
  EXPECT_EQ(s.phase, Phase::Birth);
  s = lifecycle_step(s, Condition::Matched, p).state;  // frame 2
  EXPECT_EQ(s.phase, Phase::Birth);
  s = lifecycle_step(s, Condition::MatchedNoImage, p).state;  // frame 3
  EXPECT_EQ(s.phase, Phase::Tracking);
}

TEST(Lifecycle, DeletesOnFifthConsecutiveMiss)
{
  const LifecycleParams p;
  Lifecycle s{Phase::Tracking, 3, 0};
  for (int k = 1; k <= 4; ++k) {
    const LifecycleStep st = lifecycle_step(s, Condition::Miss, p);
    EXPECT_FALSE(st.remove) << k;
    EXPECT_EQ(st.state.phase, Phase::DeathPending);
    EXPECT_EQ(st.state.miss_count, k);
    s = st.state;
  }
  EXPECT_TRUE(lifecycle_step(s, Condition::Miss, p).remove);
}

TEST(Lifecycle, MeasurementResetsMissCount)
{
  const LifecycleParams p;
  Lifecycle s{Phase::DeathPending, 3, 4};
  s = lifecycle_step(s, Condition::Matched, p).state;
  EXPECT_EQ(s.phase, Phase::Tracking);
  EXPECT_EQ(s.miss_count, 0);
}

TEST(Lifecycle, BirthMissResetsHitStreak)
{
  const LifecycleParams p;
  Lifecycle s = born();
  s = lifecycle_step(s, Condition::Matched, p).state;  // frame 2
  const LifecycleStep st = lifecycle_step(s, Condition::Miss, p);  // frame 3
  EXPECT_EQ(st.state.phase, Phase::Birth);
  EXPECT_EQ(st.state.miss_count, 1);
  EXPECT_EQ(st.state.hit_count, 0);
  EXPECT_FALSE(st.remove);
  // Three further consecutive hits are needed.
  s = st.state;
  s = lifecycle_step(s, Condition::Matched, p).state;
  s = lifecycle_step(s, Condition::Matched, p).state;
  EXPECT_EQ(s.phase, Phase::Birth);
  s = lifecycle_step(s, Condition::Matched, p).state;
  EXPECT_EQ(s.phase, Phase::Tracking);
}

TEST(Lifecycle, BirthTracksAlsoDieAfterFiveMisses)
{
  const LifecycleParams p;
  Lifecycle s = born();
  for (int k = 1; k < 5; ++k) s = lifecycle_step(s, Condition::Miss, p).state;
  EXPECT_TRUE(lifecycle_step(s, Condition::Miss, p).remove);
}

TEST(Lifecycle, ImageOnlyCountsAsMiss)
{
  const LifecycleParams p;
  Lifecycle s = born();
  for (int k = 0; k < p.confirm_frames; ++k) s = lifecycle_step(s, Condition::Matched, p).state;
  ASSERT_EQ(s.phase, Phase::Tracking);
  for (int k = 1; k < p.delete_misses; ++k) {
    const LifecycleStep st = lifecycle_step(s, Condition::ImageOnly, p);
    EXPECT_FALSE(st.remove);
    EXPECT_EQ(st.state.phase, Phase::DeathPending);
    s = st.state;
  }
  EXPECT_TRUE(lifecycle_step(s, Condition::ImageOnly, p).remove);
}

TEST(Lifecycle, CountersStayInRangeProperty)
{
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> pick(0, 3);
  const Condition conds[] = {Condition::Matched, Condition::MatchedNoImage, Condition::ImageOnly, Condition::Miss};
  const LifecycleParams p;
  for (int trial = 0; trial < 200; ++trial) {
    Lifecycle s = born();
    for (int k = 0; k < 50; ++k) {
      const LifecycleStep st = lifecycle_step(s, conds[pick(rng)], p);
      ASSERT_GE(st.state.hit_count, 0);
      ASSERT_LE(st.state.hit_count, p.confirm_frames);
      ASSERT_GE(st.state.miss_count, 0);
      ASSERT_LE(st.state.miss_count, p.delete_misses);
      if (st.remove) break;
      s = st.state;
    }
  }
}

// --------------------------------------------------------------- Tracker

TrackerConfig noiseless_tracker(const CameraModel & cam)
{
  TrackerConfig c;
  c.camera = cam;
  c.kalman.meas_sigma = 0.0;
  return c;
}

TEST(Tracker, EmptyStream)
{
  Tracker t(TrackerConfig{});
  EXPECT_TRUE(t.tracks().empty());
}

TEST(Tracker, OutOfOrderTimestampsRejected)
{
  Tracker t(TrackerConfig{});
  SensorFrame f;
  f.timestamp = 1.0;
  t.step(f);
  f.timestamp = 1.0;
  try {
    t.step(f);
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfOrder);
  }
}

TEST(Tracker, NoiselessSingleAgentKeepsOneIdAndExactPositions)
{
  sim::ScenarioConfig c = rmot::testing::quiet_scene(10.0);
  c.agents.push_back(rmot::testing::straight_agent(1, {8, -6}, {25, 6}, 1.5));
  const sim::SimulatedRun run = sim::simulate(c);
  Tracker tracker(noiseless_tracker(c.camera));
  std::int64_t id = -1;
  for (size_t i = 0; i < run.frames.size(); ++i) {
    const auto & tracks = tracker.step(run.frames[i]);
    ASSERT_EQ(tracks.size(), 1u);
    const TrackInstance & tr = tracks[0];
    if (i < 2) {
      EXPECT_FALSE(tr.life.confirmed());
    } else {
      EXPECT_TRUE(tr.life.confirmed());
    }
    if (id < 0) id = tr.id;
    EXPECT_EQ(tr.id, id);
    EXPECT_LT((tr.position - run.truth[i].agents[0].position).norm(), 1e-6);
    EXPECT_EQ(tr.reported_class(), ObjectClass::Person);
  }
}

TEST(Tracker, AgentLeavingViewIsDeletedFiveFramesLater)
{
  sim::ScenarioConfig c = rmot::testing::quiet_scene(8.0);
  auto a = rmot::testing::straight_agent(1, {10, 0}, {20, 0}, 1.0);
  a.despawn_frame = 50;  // last seen in frame 49
  c.agents.push_back(a);
  const sim::SimulatedRun run = sim::simulate(c);
  Tracker tracker(noiseless_tracker(c.camera));
  for (size_t i = 0; i < run.frames.size(); ++i) {
    const auto & tracks = tracker.step(run.frames[i]);
    if (i < 54) {
      EXPECT_EQ(tracks.size(), 1u) << "frame " << i;
    } else {
      EXPECT_TRUE(tracks.empty()) << "frame " << i;
    }
    if (i == 54) {
      EXPECT_EQ(tracker.deleted_last_step().size(), 1u);
    }
  }
}

TEST(Tracker, CoastingReportsKalmanPrediction)
{
  const CameraModel cam;
  Tracker tracker(noiseless_tracker(cam));
  for (int k = 0; k < 5; ++k) {
    SensorFrame f;
    f.index = k;
    f.timestamp = 0.1 * k;
    const Vec3 p(10 + 0.1 * k, 0, 0);
    f.detections3d = {det_at(p)};
    f.detections2d = {image_of(p, cam)};
    tracker.step(f);
  }
  ASSERT_EQ(tracker.tracks().size(), 1u);
  const KalmanCV expected = kf_predict(tracker.tracks()[0].kf, 0.1);
  SensorFrame f;
  f.index = 5;
  f.timestamp = 0.5;
  const auto & tracks = tracker.step(f);
  ASSERT_EQ(tracks.size(), 1u);
  EXPECT_EQ(tracks[0].last_condition, Condition::Miss);
  EXPECT_EQ(tracks[0].position, expected.position());
  EXPECT_EQ(tracks[0].life.miss_count, 1);
}

TEST(Tracker, TwoSeparatedAgentsNeverSwapIds)
{
  sim::ScenarioConfig c = rmot::testing::quiet_scene(20.0);
  c.agents.push_back(rmot::testing::straight_agent(1, {10, -6}, {25, -2}, 2.0));
  c.agents.push_back(rmot::testing::straight_agent(2, {25, 2}, {10, 6}, 2.0, ObjectClass::Trolley));
  const sim::SimulatedRun run = sim::simulate(c);
  Tracker tracker(noiseless_tracker(c.camera));
  std::map<int, std::int64_t> owner;
  for (size_t i = 0; i < run.frames.size(); ++i) {
    const auto & tracks = tracker.step(run.frames[i]);
    ASSERT_EQ(tracks.size(), 2u);
    for (const auto & a : run.truth[i].agents) {
      for (const auto & t : tracks) {
        if ((t.position - a.position).norm() < 1e-6) {
          if (owner.count(a.id)) EXPECT_EQ(owner[a.id], t.id);
          owner[a.id] = t.id;
          EXPECT_EQ(t.reported_class(), a.cls);
        }
      }
    }
  }
  EXPECT_EQ(owner.size(), 2u);
}

TEST(Tracker, HistoryIsBoundedAndIncreasing)
{
  sim::ScenarioConfig c = rmot::testing::quiet_scene(10.0);
  c.agents.push_back(rmot::testing::straight_agent(1, {8, -6}, {25, 6}, 1.5));
  const sim::SimulatedRun run = sim::simulate(c);
  TrackerConfig cfg = noiseless_tracker(c.camera);
  cfg.history_capacity = 16;
  Tracker tracker(cfg);
  for (const auto & f : run.frames) tracker.step(f);
  const auto & h = tracker.tracks().at(0).history;
  EXPECT_EQ(h.size(), 16u);
  for (size_t i = 1; i < h.size(); ++i) EXPECT_GT(h[i].t, h[i - 1].t);
}

}  // namespace
}  // namespace rmot::track

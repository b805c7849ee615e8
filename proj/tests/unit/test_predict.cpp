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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <fstream>
#include <random>

#include "rmot/error.hpp"
#include "rmot/predict/memory_bank.hpp"
#include "rmot/predict/predictor.hpp"
#include "rmot/predict/trajectory.hpp"
#include "rmot/track/kalman.hpp"
#include "test_support.hpp"

namespace rmot::predict
{
namespace
{

std::vector<Vec3> line(const Vec3 & start, const Vec3 & step, int n)
{
  std::vector<Vec3> out;
  for (int i = 0; i < n; ++i) out.push_back(start + step * i);
  return out;
}

std::vector<Vec3> arc(double radius, double speed, double fr, int n, double phase = 0.0, double climb = 0.0)
{
  std::vector<Vec3> out;
  const double w = speed / radius;
  for (int i = 0; i < n; ++i) {
    const double a = phase + w * i / fr;
    out.emplace_back(radius * std::cos(a), radius * std::sin(a), climb * i / fr);
  }
  return out;
}

std::vector<Vec3> rigid(const std::vector<Vec3> & pts, double yaw, const Vec3 & t)
{
  const Anchor a{t, yaw};
  return from_canonical(pts, a);
}

TEST(Normalize, TrajectoryAlongYBecomesAlongX)
{
  const auto w = line(Vec3(5, 0, 2), Vec3(0, 0.5, 0.1), 11);  // ends at (5,5,3)
  const CanonicalWindow c = normalize_trajectory(w);
  EXPECT_TRUE(c.points.back().isZero(1e-12));
  for (size_t i = 0; i < w.size(); ++i) {
    const double back = 10.0 - static_cast<double>(i);
    EXPECT_NEAR(c.points[i].x(), -0.5 * back, 1e-12);
    EXPECT_NEAR(c.points[i].y(), 0.0, 1e-12);
    EXPECT_NEAR(c.points[i].z(), -0.1 * back, 1e-12);
  }
  EXPECT_NEAR(c.anchor.yaw, std::numbers::pi / 2, 1e-12);
}

TEST(Normalize, StationaryIsDegenerate)
{
  const auto w = line(Vec3(1, 2, 3), Vec3::Zero(), 5);
  try {
    normalize_trajectory(w);
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateHeading);
  }
  EXPECT_THROW(normalize_trajectory(std::vector<Vec3>{Vec3::Zero()}), Error);
}

TEST(Normalize, RoundTripProperty)
{
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-20, 20);
  for (int k = 0; k < 200; ++k) {
    std::vector<Vec3> w;
    for (int i = 0; i < 20; ++i) w.emplace_back(u(rng), u(rng), u(rng));
    const CanonicalWindow c = normalize_trajectory(w);
    const auto back = from_canonical(c.points, c.anchor);
    for (size_t i = 0; i < w.size(); ++i) EXPECT_LT((back[i] - w[i]).norm(), 1e-9);
  }
}

TEST(Encoder, ConstantVelocity)
{
  const auto w = line(Vec3(3, 4, 0), Vec3(0.06, 0.08, 0.0), 20);  // 1 m/s at 10 Hz
  const FeatureVector f = encode_history(normalize_trajectory(w).points);
  ASSERT_EQ(f.size(), 3 * 19);
  for (int i = 0; i < 19; ++i) {
    EXPECT_NEAR(f(2 * i), 0.1, 1e-12);
    EXPECT_NEAR(f(2 * i + 1), 0.0, 1e-12);
    EXPECT_NEAR(f(38 + i), 0.0, 1e-12);
  }
  EXPECT_EQ(f, encode_history(normalize_trajectory(w).points));
  EXPECT_EQ(reference_encoder()->feature_dim(20), 57);
}

TEST(Encoder, RampSlopeIsTangentOfGrade)
{
  const double grade = std::numbers::pi / 6;
  const double run = 0.1;
  const auto w = line(Vec3::Zero(), Vec3(run * std::cos(0.4), run * std::sin(0.4), run * std::tan(grade)), 20);
  const FeatureVector f = encode_history(normalize_trajectory(w).points);
  for (int i = 0; i < 19; ++i) EXPECT_NEAR(f(38 + i), std::tan(grade), 1e-12);
}

TEST(Encoder, PoseInvarianceProperty)
{
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-50, 50), ang(-3.1, 3.1);
  for (int k = 0; k < 200; ++k) {
    const auto w = arc(5.0 + std::abs(u(rng)) * 0.2, 1.5, 10.0, 20, ang(rng), 0.2);
    const auto moved = rigid(w, ang(rng), Vec3(u(rng), u(rng), u(rng)));
    const FeatureVector a = encode_history(normalize_trajectory(w).points);
    const FeatureVector b = encode_history(normalize_trajectory(moved).points);
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Cosine, Examples)
{
  FeatureVector u(3), v(3);
  u << 1, 2, 3;
  EXPECT_NEAR(cosine_distance(u, u), 0.0, 1e-15);
  v << -2, 1, 0;
  EXPECT_NEAR(cosine_distance(u, v), 1.0, 1e-15);
  EXPECT_NEAR(cosine_distance(u, -u), 2.0, 1e-15);
  try {
    cosine_distance(u, FeatureVector::Zero(3));
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroVector);
  }
}

std::vector<Vec3> flat_future(int f, double v = 1.0)
{
  return line(Vec3(0.1 * v, 0, 0), Vec3(0.1 * v, 0, 0), f);
}

TEST(MemoryBank, SingleEntryAndExactQuery)
{
  MemoryBank bank(3, 2, 2, 10, 0.5);
  FeatureVector a(3), b(3);
  a << 1, 0, 0;
  b << 0, 1, 0;
  try {
    bank.retrieve_topk(a, 5);
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyBank);
  }
  ASSERT_TRUE(bank.write(a, flat_future(2), 1.0));
  auto r = bank.retrieve_topk(b, 5);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].entry, 0u);
  ASSERT_TRUE(bank.write(b, flat_future(2), 1.0));
  r = bank.retrieve_topk(b, 5);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].entry, 1u);
  EXPECT_NEAR(r[0].distance, 0.0, 1e-15);
}

TEST(MemoryBank, TopKMatchesExhaustiveScanProperty)
{
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> sz(1, 1000);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = trial < 5 ? trial + 1 : sz(rng);
    MemoryBank bank(6, 3, 1, 2000, 0.0);
    std::vector<FeatureVector> feats;
    for (int i = 0; i < n; ++i) {
      FeatureVector f(6);
      for (int d = 0; d < 6; ++d) f(d) = g(rng);
      if (i % 7 == 3 && !feats.empty()) f = feats[i / 2];  // duplicates exercise the tie rule
      feats.push_back(f);
      ASSERT_TRUE(bank.write(f, std::vector<Vec3>{Vec3(1, 0, 0)}, 1.0));
    }
    FeatureVector q(6);
    for (int d = 0; d < 6; ++d) q(d) = g(rng);
    if (trial % 2 == 0) q = feats[0];
    std::vector<std::pair<double, int>> oracle;
    for (int i = 0; i < n; ++i) oracle.push_back({1.0 - feats[i].dot(q) / (feats[i].norm() * q.norm()), i});
    std::stable_sort(oracle.begin(), oracle.end(), [](auto & a, auto & b) { return a.first < b.first; });
    for (size_t k : {size_t{1}, size_t{5}, size_t{12}}) {
      const auto r = bank.retrieve_topk(q, k);
      ASSERT_EQ(r.size(), std::min<size_t>(k, n));
      for (size_t i = 0; i < r.size(); ++i) {
        EXPECT_NEAR(r[i].distance, oracle[i].first, 1e-12);
        if (i + 1 < r.size() && std::abs(oracle[i].first - oracle[i + 1].first) > 1e-12) {
          EXPECT_EQ(static_cast<int>(bank.entry(r[i].entry).insertion), oracle[i].second);
        }
      }
    }
  }
}

TEST(MemoryBank, WritePolicy)
{
  MemoryBank bank(3, 2, 2, 10, 0.5);
  FeatureVector a(3);
  a << 1, 2, 3;
  EXPECT_FALSE(bank.write(a, flat_future(2), 0.0));
  EXPECT_FALSE(bank.write(a, flat_future(2), 0.5));
  EXPECT_EQ(bank.size(), 0u);
  EXPECT_TRUE(bank.write(a, flat_future(2), 0.51));
  EXPECT_EQ(bank.size(), 1u);
  EXPECT_FALSE(bank.write(a, flat_future(2), 0.2));  // idempotent below threshold
  EXPECT_EQ(bank.size(), 1u);
}

TEST(MemoryBank, EvictsLeastRecentlyRetrieved)
{
  MemoryBank bank(3, 2, 2, 2, 0.5);
  FeatureVector e1(3), e2(3), e3(3);
  e1 << 1, 0, 0;
  e2 << 0, 1, 0;
  e3 << 0, 0, 1;
  ASSERT_TRUE(bank.write(e1, flat_future(2), 1.0));
  ASSERT_TRUE(bank.write(e2, flat_future(2), 1.0));
  const auto got = bank.retrieve_topk(e1, 1);
  ASSERT_EQ(bank.entry(got[0].entry).insertion, 0u);
  bank.touch(got);
  ASSERT_TRUE(bank.write(e3, flat_future(2), 1.0));
  ASSERT_EQ(bank.size(), 2u);
  std::vector<std::uint64_t> ids;
  for (const auto & e : bank.entries()) ids.push_back(e.insertion);
  std::sort(ids.begin(), ids.end());
  EXPECT_EQ(ids, (std::vector<std::uint64_t>{0, 2}));
}

TEST(MemoryBank, NeverExceedsCapacityProperty)
{
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  MemoryBank bank(4, 2, 1, 17, 0.1);
  for (int i = 0; i < 500; ++i) {
    FeatureVector f(4);
    for (int d = 0; d < 4; ++d) f(d) = g(rng);
    bank.write(f, std::vector<Vec3>{Vec3::Zero()}, std::abs(g(rng)));
    if (i % 3 == 0 && !bank.empty()) bank.touch(bank.retrieve_topk(f, 3));
    ASSERT_LE(bank.size(), bank.capacity());
  }
}

TEST(MemoryBank, SaveLoadRoundTripAndErrors)
{
  const auto dir = rmot::testing::scratch_dir("membank");
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  MemoryBank bank(5, 3, 2, 8, 0.25);
  for (int i = 0; i < 12; ++i) {
    FeatureVector f(5);
    for (int d = 0; d < 5; ++d) f(d) = g(rng);
    bank.write(f, std::vector<Vec3>{Vec3(g(rng), g(rng), g(rng)), Vec3(g(rng), g(rng), g(rng))}, 1.0);
  }
  bank.touch(bank.retrieve_topk(bank.entry(2).feature, 2));
  bank.save(dir / "membank.dat");
  const MemoryBank back = MemoryBank::load(dir / "membank.dat");
  ASSERT_EQ(back.size(), bank.size());
  EXPECT_EQ(back.capacity(), bank.capacity());
  EXPECT_EQ(back.write_threshold(), bank.write_threshold());
  for (size_t i = 0; i < bank.size(); ++i) {
    EXPECT_EQ(back.entry(i).feature, bank.entry(i).feature);
    EXPECT_EQ(back.entry(i).future, bank.entry(i).future);
    EXPECT_EQ(back.entry(i).insertion, bank.entry(i).insertion);
    EXPECT_EQ(back.entry(i).last_used, bank.entry(i).last_used);
  }
  // Dimension mismatch against a predictor.
  const Predictor p(PredictorConfig{});
  EXPECT_THROW(p.check_bank(back), Error);
  // Truncation.
  std::string text;
  {
    std::ifstream in(dir / "membank.dat");
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  {
    std::ofstream out(dir / "membank.dat", std::ios::trunc);
    out << text.substr(0, text.size() / 2);
  }
  try {
    MemoryBank::load(dir / "membank.dat");
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::Format);
  }
  EXPECT_THROW(MemoryBank::load(dir / "absent.dat"), Error);
  std::filesystem::remove_all(dir);
}

track::KalmanCV kf_with(const Vec3 & p, const Vec3 & v)
{
  track::KalmanCV kf;
  kf.x.head<3>() = p;
  kf.x.tail<3>() = v;
  return kf;
}

TEST(ShortHorizon, Examples)
{
  const auto pts = kf_short_horizon(kf_with(Vec3::Zero(), Vec3(1, 0, 0)), 10.0);
  ASSERT_EQ(pts.size(), 10u);
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(pts[i].x(), 0.1 * (i + 1), 1e-12);
  for (const auto & p : kf_short_horizon(kf_with(Vec3(1, 2, 3), Vec3::Zero()), 10.0)) {
    EXPECT_EQ(p, Vec3(1, 2, 3));
  }
}

TEST(ShortHorizon, MatchesIteratedPredict)
{
  track::KalmanCV kf = kf_with(Vec3(1, -1, 0.5), Vec3(0.7, -1.3, 0.2));
  const auto pts = kf_short_horizon(kf, 10.0);
  for (const auto & p : pts) {
    kf = track::kf_predict(kf, 0.1);
    EXPECT_LT((p - kf.position()).norm(), 1e-12);
  }
}

TEST(SelectBest, Examples)
{
  const auto ind = line(Vec3(0.1, 0, 0), Vec3(0.1, 0, 0), 10);
  std::vector<std::vector<Vec3>> cands{ind, line(Vec3(0.1, 1, 0), Vec3(0.1, 0, 0), 30)};
  cands[0] = line(Vec3(0.1, 0, 0), Vec3(0.1, 0, 0), 30);
  EXPECT_EQ(select_best(cands, ind).index, 0u);
  EXPECT_EQ(select_best(std::vector<std::vector<Vec3>>{cands[1]}, ind).index, 0u);
  std::vector<std::vector<Vec3>> three;
  for (double off : {0.3, 0.1, 0.2}) three.push_back(line(Vec3(0.1, off, 0), Vec3(0.1, 0, 0), 12));
  const Selection s = select_best(three, ind);
  EXPECT_EQ(s.index, 1u);
  EXPECT_NEAR(s.errors[0], 0.3, 1e-12);
  EXPECT_NEAR(s.errors[2], 0.2, 1e-12);
}

TEST(SelectBest, NeverWorseThanAnyCandidateProperty)
{
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 300; ++trial) {
    const auto ind = line(Vec3(g(rng), g(rng), 0), Vec3(g(rng), g(rng), 0) * 0.1, 10);
    std::vector<std::vector<Vec3>> c(1 + trial % 5);
    for (auto & x : c) x = line(Vec3(g(rng), g(rng), g(rng)), Vec3(g(rng), g(rng), g(rng)) * 0.1, 30);
    const Selection s = select_best(c, ind);
    for (size_t i = 0; i < c.size(); ++i) {
      EXPECT_LE(s.errors[s.index], mean_distance(std::span<const Vec3>(c[i]).first(10), ind) + 1e-15);
    }
  }
}

track::TrackInstance track_with_history(const std::vector<Vec3> & pts, double fr = 10.0)
{
  track::TrackInstance t;
  t.life.phase = track::Phase::Tracking;
  for (size_t i = 0; i < pts.size(); ++i) t.history.push_back({static_cast<double>(i) / fr, pts[i]});
  t.position = pts.back();
  Vec3 v = pts.size() > 1 ? Vec3((pts.back() - pts[pts.size() - 2]) * fr) : Vec3::Zero();
  t.kf = kf_with(pts.back(), v);
  return t;
}

TEST(Predict, FallbacksAlwaysReturnFullHorizon)
{
  const Predictor p(PredictorConfig{});
  MemoryBank bank(p.feature_dim(), 20, 30, 100, 0.5);
  const auto shortt = track_with_history(line(Vec3::Zero(), Vec3(0.1, 0, 0), 3));
  PredictionResult r = p.predict(shortt, &bank);
  EXPECT_EQ(r.source, PredictionSource::Kalman);
  EXPECT_EQ(r.points.size(), 30u);
  const auto moving = track_with_history(line(Vec3::Zero(), Vec3(0.1, 0, 0), 25));
  r = p.predict(moving, &bank);
  EXPECT_EQ(r.source, PredictionSource::Kalman);
  EXPECT_EQ(r.fallback_reason, "empty bank");
  EXPECT_TRUE(r.feature.has_value());
  r = p.predict(moving, nullptr);
  EXPECT_EQ(r.source, PredictionSource::Kalman);
  const auto still = track_with_history(line(Vec3(1, 1, 1), Vec3::Zero(), 25));
  r = p.predict(still, &bank);
  EXPECT_EQ(r.source, PredictionSource::Kalman);
  EXPECT_EQ(r.points.size(), 30u);
}

TEST(Predict, MemoryBeatsKalmanOnSeededCurvedFamily)
{
  PredictorConfig cfg;
  const Predictor p(cfg);
  MemoryBank bank(p.feature_dim(), cfg.history, cfg.future, 5000, cfg.write_threshold);
  // Seed with arcs of several radii and speeds traversed counter-clockwise.
  for (double radius : {4.0, 6.0, 8.0, 12.0}) {
    for (double speed : {1.0, 1.5, 2.0}) {
      const auto pts = arc(radius, speed, 10.0, 50);
      const std::vector<Vec3> hist(pts.begin(), pts.begin() + 20);
      const CanonicalWindow c = normalize_trajectory(hist);
      const std::vector<Vec3> fut(pts.begin() + 20, pts.end());
      bank.write(encode_history(c.points), to_canonical(fut, c.anchor), 1e9);
    }
  }
  // Query: same family, different place and orientation.
  const auto pts = rigid(arc(6.0, 1.5, 10.0, 50, 0.0), 1.2, Vec3(30, -7, 2));
  const std::vector<Vec3> hist(pts.begin(), pts.begin() + 20);
  const std::vector<Vec3> truth(pts.begin() + 20, pts.end());
  track::TrackInstance t = track_with_history(hist);
  // Kalman state with the true instantaneous velocity.
  const Vec3 v = (pts[20] - pts[18]) * 5.0;
  t.kf = kf_with(hist.back(), v);
  const PredictionResult mem = p.predict(t, &bank);
  ASSERT_EQ(mem.source, PredictionSource::Memory);
  ASSERT_EQ(mem.candidates.size(), 5u);
  PredictorConfig kcfg = cfg;
  kcfg.kalman_only = true;
  const PredictionResult kal = Predictor(kcfg).predict(t, &bank);
  const double ade_mem = mean_distance(mem.points, truth);
  const double ade_kal = mean_distance(kal.points, truth);
  EXPECT_LT(ade_mem, ade_kal);
  // The exact family member is retrieved first.
  EXPECT_LT(mem.retrieved[0].distance, 1e-12);
  EXPECT_LT(mean_distance(mem.candidates[0], truth), 1e-9);
}

TEST(Predict, RampVerticalProfileReproduced)
{
  PredictorConfig cfg;
  const Predictor p(cfg);
  MemoryBank bank(p.feature_dim(), cfg.history, cfg.future, 100, cfg.write_threshold);
  const auto seed = line(Vec3::Zero(), Vec3(0.15, 0, 0.05), 50);
  {
    const std::vector<Vec3> hist(seed.begin(), seed.begin() + 20);
    const CanonicalWindow c = normalize_trajectory(hist);
    bank.write(encode_history(c.points), to_canonical(std::vector<Vec3>(seed.begin() + 20, seed.end()), c.anchor),
               1e9);
  }
  const auto pts = rigid(line(Vec3::Zero(), Vec3(0.15, 0, 0.05), 50), -0.7, Vec3(-4, 9, 1));
  const std::vector<Vec3> hist(pts.begin(), pts.begin() + 20);
  track::TrackInstance t = track_with_history(hist);
  t.kf = kf_with(hist.back(), (pts[20] - pts[19]) * 10.0);
  const PredictionResult r = p.predict(t, &bank);
  ASSERT_EQ(r.source, PredictionSource::Memory);
  for (int i = 0; i < 30; ++i) {
    const Vec3 d = r.points[i] - pts[20 + i];
    EXPECT_LT(std::abs(d.z()), 1e-9);
    EXPECT_LT(d.head<2>().norm(), 1e-9);
  }
}

TEST(OnlineWriter, WritesOnlySurprisingPredictions)
{
  PredictorConfig cfg;
  cfg.history = 5;
  cfg.future = 4;
  const Predictor p(cfg);
  MemoryBank bank(p.feature_dim(), cfg.history, cfg.future, 100, cfg.write_threshold);
  OnlineMemoryWriter writer(cfg);
  // Straight motion: the Kalman rollout is exact, nothing is written.
  auto pts = line(Vec3::Zero(), Vec3(0.2, 0, 0), 30);
  track::TrackInstance t = track_with_history(std::vector<Vec3>(pts.begin(), pts.begin() + 6));
  for (int f = 5; f < 20; ++f) {
    t = track_with_history(std::vector<Vec3>(pts.begin(), pts.begin() + f + 1));
    t.id = 7;
    writer.record(f, 7, p.predict(t, &bank));
    const std::vector<track::TrackInstance> alive{t};
    writer.resolve(f, alive, bank);
  }
  EXPECT_EQ(bank.size(), 0u);
  // A sharp turn makes the rollout wrong by more than the threshold.
  std::vector<Vec3> turn = line(Vec3::Zero(), Vec3(0.5, 0, 0), 10);
  for (int i = 1; i <= 10; ++i) turn.push_back(turn[9] + Vec3(0, 0.5 * i, 0));
  for (int f = 5; f < 20; ++f) {
    t = track_with_history(std::vector<Vec3>(turn.begin(), turn.begin() + f + 1));
    t.id = 8;
    writer.record(f, 8, p.predict(t, &bank));
    const std::vector<track::TrackInstance> alive{t};
    writer.resolve(f, alive, bank);
  }
  EXPECT_GT(bank.size(), 0u);
}

}  // namespace
}  // namespace rmot::predict

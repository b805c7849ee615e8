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


#include "rmot/app/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "rmot/error.hpp"
#include "rmot/predict/trajectory.hpp"

namespace rmot::app
{

using nlohmann::json;

namespace
{

/// Strict reader for one override object: every key must be consumed.
class Section
{
public:
  Section(const json & j, std::string name) : j_(j), name_(std::move(name))
  {
    if (!j_.is_object()) fail(ErrorCode::Config, name_ + " overrides must be an object");
  }

  template <typename T>
  void get(const char * key, T & out)
  {
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    seen_.push_back(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw std::invalid_argument("bool");
      } else if constexpr (std::is_arithmetic_v<T>) {
        if (!it->is_number()) throw std::invalid_argument("number");
        if constexpr (std::is_integral_v<T>) {
          if (!it->is_number_integer() && !it->is_number_unsigned()) throw std::invalid_argument("integer");
          if constexpr (std::is_unsigned_v<T>) {
            if (it->is_number_integer() && it->get<std::int64_t>() < 0) throw std::invalid_argument("non-negative");
          }
        }
      } else {
        if (!it->is_string()) throw std::invalid_argument("string");
      }
      out = it->get<T>();
    } catch (const std::exception & e) {
      fail(ErrorCode::Config, name_ + "." + key + " must be " + (std::string(e.what()).empty() ? "valid" : e.what()));
    }
  }

  const json * object(const char * key)
  {
    const auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.push_back(key);
    return &*it;
  }

  void finish() const
  {
    for (const auto & [k, v] : j_.items()) {
      if (std::find(seen_.begin(), seen_.end(), k) == seen_.end()) {
        fail(ErrorCode::Config, "unknown override key " + name_ + "." + k);
      }
    }
  }

private:
  const json & j_;
  std::string name_;
  std::vector<std::string> seen_;
};

double ms_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void ensure_history(RunConfig & c)
{
  const auto need = static_cast<std::size_t>(c.predictor.history + c.predictor.future + 1);
  c.tracker.history_capacity = std::max(c.tracker.history_capacity, need);
}

std::ofstream open_out(const std::filesystem::path & file)
{
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + file.string());
  return out;
}

}  // namespace

RunConfig RunConfig::for_dataset(const sim::DatasetHeader & header, const std::optional<json> & scenario)
{
  RunConfig c;
  c.tracker.camera = header.camera;
  c.predictor.frame_rate = header.frame_rate;
  if (scenario && scenario->contains("noise")) {
    const auto & n = scenario->at("noise");
    if (n.contains("sigma3d") && n.at("sigma3d").is_number()) c.tracker.kalman.meas_sigma = n.at("sigma3d").get<double>();
  }
  ensure_history(c);
  return c;
}

void RunConfig::apply(const json & overrides)
{
  if (overrides.is_null()) return;
  Section root(overrides, "config");
  if (const json * g = root.object("gate")) {
    Section s(*g, "gate");
    s.get("a", tracker.gate.a);
    s.get("b", tracker.gate.b);
    s.get("pixel_gate", tracker.gate.pixel_gate);
    s.finish();
  }
  if (const json * l = root.object("lifecycle")) {
    Section s(*l, "lifecycle");
    s.get("confirm_frames", tracker.lifecycle.confirm_frames);
    s.get("delete_misses", tracker.lifecycle.delete_misses);
    s.finish();
  }
  if (const json * k = root.object("kalman")) {
    Section s(*k, "kalman");
    s.get("accel_noise", tracker.kalman.accel_noise);
    s.get("accel_noise_z", tracker.kalman.accel_noise_z);
    s.get("meas_sigma", tracker.kalman.meas_sigma);
    s.get("init_pos_sigma", tracker.kalman.init_pos_sigma);
    s.get("init_vel_sigma", tracker.kalman.init_vel_sigma);
    s.finish();
  }
  if (const json * p = root.object("predictor")) {
    Section s(*p, "predictor");
    s.get("enabled", predict_enabled);
    s.get("online_write", online_write);
    s.get("history", predictor.history);
    s.get("future", predictor.future);
    s.get("top_k", predictor.top_k);
    s.get("indicator_horizon", predictor.indicator_horizon);
    s.get("write_threshold", predictor.write_threshold);
    s.get("capacity", predictor.capacity);
    s.get("kalman_only", predictor.kalman_only);
    s.get("freeze_z", predictor.freeze_z);
    s.finish();
  }
  if (const json * m = root.object("mapper")) {
    Section s(*m, "mapper");
    s.get("enabled", map_enabled);
    std::string mode(map::removal_mode_name(mapper.mode));
    s.get("mode", mode);
    mapper.mode = map::parse_removal_mode(mode);
    s.get("residual_filter", mapper.residual_filter);
    s.get("detection_boxes", mapper.detection_boxes);
    s.get("box_margin", mapper.box_margin);
    s.get("map_resolution", mapper.map_resolution);
    s.get("skip_occupied", mapper.skip_occupied);
    s.get("eval_grid", mapper.eval_grid);
    s.get("threads", mapper.threads);
    s.get("k_neighbors", mapper.residual.k_neighbors);
    s.get("min_neighbors", mapper.residual.min_neighbors);
    s.get("s_threshold", mapper.residual.s_threshold);
    s.get("search_radius", mapper.residual.search_radius);
    s.finish();
  }
  if (const json * b = root.object("baselines")) {
    if (!b->is_array()) fail(ErrorCode::Config, "config.baselines must be an array of names");
    for (const auto & name : *b) {
      if (!name.is_string()) fail(ErrorCode::Config, "config.baselines must be an array of names");
      apply_baseline(name.get<std::string>());
    }
  }
  root.get("frame_rate", predictor.frame_rate);
  root.get("history_capacity", tracker.history_capacity);
  root.finish();
  ensure_history(*this);
  validate();
}

void RunConfig::apply_baseline(const std::string & name)
{
  if (name == "fixed-gate") {
    tracker.gate.a = 0.0;
  } else if (name == "kf-only") {
    predictor.kalman_only = true;
  } else if (name == "single-frame-removal") {
    mapper.mode = map::RemovalMode::SingleFrame;
  } else {
    fail(ErrorCode::Config, "unknown baseline '" + name + "'");
  }
  if (std::find(baselines.begin(), baselines.end(), name) == baselines.end()) baselines.push_back(name);
}

void RunConfig::validate() const
{
  tracker.validate();
  predictor.validate();
  mapper.validate();
  if (tracker.history_capacity < static_cast<std::size_t>(predictor.history + predictor.future + 1)) {
    fail(ErrorCode::Config, "track history is shorter than history + future + 1");
  }
}

json RunConfig::to_json() const
{
  return {
    {"gate", {{"a", tracker.gate.a}, {"b", tracker.gate.b}, {"pixel_gate", tracker.gate.pixel_gate}}},
    {"lifecycle",
     {{"confirm_frames", tracker.lifecycle.confirm_frames}, {"delete_misses", tracker.lifecycle.delete_misses}}},
    {"kalman",
     {{"accel_noise", tracker.kalman.accel_noise},
      {"accel_noise_z", tracker.kalman.accel_noise_z},
      {"meas_sigma", tracker.kalman.meas_sigma},
      {"init_pos_sigma", tracker.kalman.init_pos_sigma},
      {"init_vel_sigma", tracker.kalman.init_vel_sigma}}},
    {"predictor",
     {{"enabled", predict_enabled},
      {"online_write", online_write},
      {"history", predictor.history},
      {"future", predictor.future},
      {"top_k", predictor.top_k},
      {"indicator_horizon", predictor.indicator_horizon},
      {"write_threshold", predictor.write_threshold},
      {"capacity", predictor.capacity},
      {"kalman_only", predictor.kalman_only},
      {"freeze_z", predictor.freeze_z}}},
    {"mapper",
     {{"enabled", map_enabled},
      {"mode", map::removal_mode_name(mapper.mode)},
      {"residual_filter", mapper.residual_filter},
      {"detection_boxes", mapper.detection_boxes},
      {"box_margin", mapper.box_margin},
      {"map_resolution", mapper.map_resolution},
      {"skip_occupied", mapper.skip_occupied},
      {"eval_grid", mapper.eval_grid},
      {"threads", mapper.threads},
      {"k_neighbors", mapper.residual.k_neighbors},
      {"min_neighbors", mapper.residual.min_neighbors},
      {"s_threshold", mapper.residual.s_threshold},
      {"search_radius", mapper.residual.search_radius}}},
    {"baselines", baselines},
    {"frame_rate", predictor.frame_rate},
    {"history_capacity", tracker.history_capacity},
  };
}

predict::MemoryBank empty_bank(const predict::PredictorConfig & config)
{
  const predict::Predictor p(config);
  return predict::MemoryBank(p.feature_dim(), config.history, config.future, config.capacity, config.write_threshold);
}

namespace
{

RunConfig normalized(RunConfig c)
{
  ensure_history(c);
  c.validate();
  return c;
}

}  // namespace

Pipeline::Pipeline(RunConfig config, std::optional<predict::MemoryBank> bank)
: config_(normalized(std::move(config))),
  tracker_(config_.tracker),
  predictor_(config_.predictor),
  bank_(bank ? std::move(*bank) : empty_bank(config_.predictor)),
  writer_(config_.predictor),
  mapper_(config_.mapper)
{
  predictor_.check_bank(bank_);
}

const FrameOutput & Pipeline::step(const SensorFrame & frame)
{
  using clock = std::chrono::steady_clock;
  FrameOutput out;
  out.frame = frame.index;
  out.timestamp = frame.timestamp;

  const auto t0 = clock::now();
  const auto & tracks = tracker_.step(frame);
  out.timing.tracking_ms = ms_since(t0);

  out.track_records.reserve(tracks.size());
  for (const auto & t : tracks) out.track_records.push_back(track::track_record(frame.index, frame.timestamp, t));

  if (config_.predict_enabled) {
    const auto t1 = clock::now();
    if (config_.online_write) out.memory_writes = writer_.resolve(frame.index, tracks, bank_);
    for (const auto & t : tracks) {
      if (t.life.phase != track::Phase::Tracking) continue;
      TrackPrediction tp;
      tp.track_id = t.id;
      tp.position = t.position;
      tp.result = predictor_.predict(t, &bank_);
      if (!tp.result.retrieved.empty()) bank_.touch(tp.result.retrieved);
      if (config_.online_write) writer_.record(frame.index, t.id, tp.result);
      out.predictions.push_back(std::move(tp));
    }
    out.timing.prediction_ms = ms_since(t1);
  }

  if (config_.map_enabled) {
    const auto t2 = clock::now();
    out.removal = mapper_.integrate(frame, tracks);
    out.timing.mapping_ms = ms_since(t2);
  }
  out.timing.total_ms = out.timing.tracking_ms + out.timing.prediction_ms + out.timing.mapping_ms;
  last_ = std::move(out);
  return last_;
}

json RunSummary::to_json() const
{
  return {{"frames", frames},         {"track_records", track_records}, {"predictions", predictions},
          {"map_points", map_points}, {"bank_entries", bank_entries},   {"mean_total_ms", mean_total_ms}};
}

json latency_summary(std::vector<double> samples)
{
  if (samples.empty()) return {{"count", 0}};
  std::sort(samples.begin(), samples.end());
  auto pct = [&](double q) {
    const double pos = q * static_cast<double>(samples.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, samples.size() - 1);
    return samples[lo] + (pos - static_cast<double>(lo)) * (samples[hi] - samples[lo]);
  };
  double sum = 0.0;
  for (double s : samples) sum += s;
  return {{"count", samples.size()},
          {"mean", sum / static_cast<double>(samples.size())},
          {"p50", pct(0.5)},
          {"p90", pct(0.9)},
          {"p99", pct(0.99)},
          {"max", samples.back()}};
}

namespace
{

std::optional<predict::MemoryBank> load_bank(const std::optional<std::filesystem::path> & membank)
{
  if (!membank) return std::nullopt;
  return predict::MemoryBank::load(*membank);
}

}  // namespace

RunSummary run_dataset(const std::filesystem::path & dataset_dir, const std::filesystem::path & out_dir,
                       const json & overrides, const std::optional<std::filesystem::path> & membank, long max_frames)
{
  const sim::Dataset ds = sim::read_dataset(dataset_dir, true);
  RunConfig cfg = RunConfig::for_dataset(ds.header, ds.scenario);
  cfg.apply(overrides);
  Pipeline pipe(cfg, load_bank(membank));

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + out_dir.string());
  auto tracks_out = open_out(out_dir / "tracks.jsonl");
  auto preds_out = open_out(out_dir / "predictions.jsonl");

  RunSummary sum;
  json frames = json::array();
  std::vector<double> trk, prd, map, tot;
  json reports = json::array();
  const std::size_t n =
    max_frames < 0 ? ds.frames.size() : std::min(ds.frames.size(), static_cast<std::size_t>(max_frames));
  for (std::size_t i = 0; i < n; ++i) {
    const FrameOutput & o = pipe.step(ds.frames[i]);
    for (const auto & r : o.track_records) tracks_out << r.dump() << '\n';
    for (const auto & p : o.predictions) preds_out << predict::prediction_record(o.frame, p.track_id, p.result).dump() << '\n';
    sum.track_records += o.track_records.size();
    sum.predictions += o.predictions.size();
    if (o.removal) reports.push_back(o.removal->to_json());
    frames.push_back({{"frame", o.frame},
                      {"tracking_ms", o.timing.tracking_ms},
                      {"prediction_ms", o.timing.prediction_ms},
                      {"mapping_ms", o.timing.mapping_ms},
                      {"total_ms", o.timing.total_ms}});
    trk.push_back(o.timing.tracking_ms);
    prd.push_back(o.timing.prediction_ms);
    map.push_back(o.timing.mapping_ms);
    tot.push_back(o.timing.total_ms);
  }
  if (!tracks_out || !preds_out) fail(ErrorCode::Io, "write failed in " + out_dir.string());
  sum.frames = n;
  sum.map_points = pipe.mapper().map().size();
  sum.bank_entries = pipe.bank().size();
  double total = 0.0;
  for (double t : tot) total += t;
  sum.mean_total_ms = n ? total / static_cast<double>(n) : 0.0;

  // No map outputs when mapping is off, so evaluation skips the map metrics.
  std::filesystem::remove(out_dir / "map.xyz", ec);
  std::filesystem::remove(out_dir / "mapping_report.json", ec);
  if (cfg.map_enabled) {
    map::export_map(pipe.mapper().map(), out_dir / "map.xyz");
    json mapping = pipe.mapper().report_json();
    mapping["version"] = 1;
    mapping["per_frame"] = std::move(reports);
    sim::write_text_file(out_dir / "mapping_report.json", mapping.dump(2) + "\n");
  }
  json timing{{"version", 1},
              {"frames", std::move(frames)},
              {"tracking_ms", latency_summary(trk)},
              {"prediction_ms", latency_summary(prd)},
              {"mapping_ms", latency_summary(map)},
              {"total_ms", latency_summary(tot)}};
  sim::write_text_file(out_dir / "timing.json", timing.dump(2) + "\n");
  json rc = pipe.config().to_json();
  rc["version"] = 1;
  rc["dataset"] = dataset_dir.string();
  if (membank) rc["membank"] = membank->string();
  sim::write_text_file(out_dir / "run_config.json", rc.dump(2) + "\n");
  return sum;
}

json SeedSummary::to_json() const
{
  return {{"datasets", datasets}, {"windows", windows}, {"written", written}, {"bank_size", bank_size},
          {"warnings", warnings}};
}

std::size_t seed_from_frames(std::span<const SensorFrame> frames, const RunConfig & config,
                             predict::MemoryBank & bank, int stride, std::size_t * windows)
{
  if (stride < 1) fail(ErrorCode::InvalidArgument, "stride must be >= 1");
  RunConfig cfg = normalized(config);
  const predict::Predictor predictor(cfg.predictor);
  predictor.check_bank(bank);
  const int H = cfg.predictor.history;
  const int F = cfg.predictor.future;
  track::Tracker tracker(cfg.tracker);
  std::map<std::int64_t, long> seen;
  std::size_t written = 0;
  for (const auto & f : frames) {
    const auto & tracks = tracker.step(f);
    for (const auto & t : tracks) {
      if (t.life.phase != track::Phase::Tracking) continue;
      const std::vector<Vec3> w = predict::history_window(t, H + F, cfg.predictor.frame_rate);
      if (w.empty()) continue;
      if (windows) ++*windows;
      if (seen[t.id]++ % stride != 0) continue;
      const std::span<const Vec3> hist(w.data(), static_cast<std::size_t>(H));
      const std::span<const Vec3> fut(w.data() + H, static_cast<std::size_t>(F));
      predict::CanonicalWindow canon;
      try {
        canon = predict::normalize_trajectory(hist);
      } catch (const Error & e) {
        if (e.code() != ErrorCode::DegenerateHeading) throw;
        continue;
      }
      const predict::FeatureVector h = predictor.encoder().encode(canon.points);
      if (h.norm() == 0.0 || !h.allFinite()) continue;
      if (bank.write(h, predict::to_canonical(fut, canon.anchor), std::numeric_limits<double>::infinity())) ++written;
    }
  }
  return written;
}

SeedSummary seed_memory(const std::vector<std::filesystem::path> & datasets, predict::MemoryBank & bank,
                        const json & overrides, int stride)
{
  SeedSummary s;
  for (const auto & dir : datasets) {
    const sim::Dataset ds = sim::read_dataset(dir, false);
    RunConfig cfg = RunConfig::for_dataset(ds.header, ds.scenario);
    cfg.apply(overrides);
    ++s.datasets;
    if (ds.frames.empty()) {
      s.warnings.push_back("dataset " + dir.string() + " has no frames");
      continue;
    }
    s.written += seed_from_frames(ds.frames, cfg, bank, stride, &s.windows);
  }
  if (s.written == 0) s.warnings.push_back("no trajectory windows were written");
  s.bank_size = bank.size();
  return s;
}

json bench_dataset(const std::filesystem::path & dataset_dir, const json & overrides, int repeat,
                   const std::optional<std::filesystem::path> & membank)
{
  if (repeat < 1) fail(ErrorCode::InvalidArgument, "repeat must be >= 1");
  const sim::Dataset ds = sim::read_dataset(dataset_dir, true);
  RunConfig cfg = RunConfig::for_dataset(ds.header, ds.scenario);
  cfg.apply(overrides);
  std::optional<predict::MemoryBank> bank = load_bank(membank);
  std::vector<double> trk, prd, map, tot;
  double points = 0.0;
  for (int r = 0; r < repeat; ++r) {
    Pipeline pipe(cfg, bank);
    for (const auto & f : ds.frames) {
      const auto & o = pipe.step(f);
      trk.push_back(o.timing.tracking_ms);
      prd.push_back(o.timing.prediction_ms);
      map.push_back(o.timing.mapping_ms);
      tot.push_back(o.timing.total_ms);
      points += static_cast<double>(f.cloud.size());
    }
  }
  const double frames = static_cast<double>(tot.size());
  return {{"version", 1},
          {"repeat", repeat},
          {"frames_per_repeat", ds.frames.size()},
          {"mean_points_per_frame", frames > 0 ? points / frames : 0.0},
          {"tracking_ms", latency_summary(trk)},
          {"prediction_ms", latency_summary(prd)},
          {"mapping_ms", latency_summary(map)},
          {"total_ms", latency_summary(tot)}};
}

}  // namespace rmot::app

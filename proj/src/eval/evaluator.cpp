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


#include "rmot/eval/evaluator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "rmot/error.hpp"
#include "rmot/map/static_map.hpp"
#include "rmot/sim/dataset.hpp"

namespace rmot::eval
{

using nlohmann::json;

namespace
{

json opt(const std::optional<double> & v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json EvalReport::to_json(bool per_frame_detail) const
{
  json t{{"gt", tracking.gt},   {"tp", tracking.tp}, {"fn", tracking.fn},
         {"fp", tracking.fp},   {"idsw", tracking.idsw}, {"tl", tracking.tl},
         {"ignored", tracking.ignored}, {"frames", tracking.frames},
         {"mota", opt(mota)},   {"motp", opt(motp)}, {"oca", opt(oca)}};
  json p{{"events", prediction.events}, {"evaluated", prediction.evaluated}, {"ade", opt(prediction.ade)},
         {"fde", opt(prediction.fde)},  {"fde_z", opt(prediction.fde_z)}};
  json m = json::object();
  if (map_counts) {
    m = map_counts->to_json();
    m["pr"] = opt(pr);
    m["rr"] = opt(rr);
    m["f1"] = opt(f1);
  }
  json j{{"version", 1}, {"tracking", t}, {"prediction", p}, {"map", m}};
  if (per_frame_detail) {
    json frames = json::array();
    for (const auto & f : per_frame) frames.push_back(f.to_json());
    j["per_frame"] = std::move(frames);
  }
  return j;
}

RunEvaluator::RunEvaluator(std::span<const GroundTruthFrame> truth, EvalOptions options)
: truth_(truth), options_(options), matcher_(options.matcher), map_truth_(options.grid)
{
}

const GroundTruthFrame * RunEvaluator::truth_at(std::int64_t frame) const
{
  if (frame >= 0 && static_cast<std::size_t>(frame) < truth_.size() && truth_[frame].index == frame) {
    return &truth_[frame];
  }
  for (const auto & g : truth_) {
    if (g.index == frame) return &g;
  }
  return nullptr;
}

void RunEvaluator::add_tracks(std::int64_t frame, std::span<const ReportedObject> reports)
{
  const GroundTruthFrame * g = truth_at(frame);
  if (!g) fail(ErrorCode::Format, "no ground truth for frame " + std::to_string(frame));
  frames_.push_back(matcher_.match(frame, reports, g->agents));
}

void RunEvaluator::add_prediction(std::int64_t frame, const Vec3 & position, std::span<const Vec3> points)
{
  ++prediction_events_;
  const GroundTruthFrame * g = truth_at(frame);
  if (!g) fail(ErrorCode::Format, "no ground truth for frame " + std::to_string(frame));
  if (points.empty()) return;
  const AgentTruth * best = nullptr;
  double best_d = options_.prediction_gate;
  for (const auto & a : g->agents) {
    const double d = euclidean3(a.position, position);
    if (d <= best_d) {
      best_d = d;
      best = &a;
    }
  }
  if (!best) return;
  PredictionSample s;
  s.predicted.assign(points.begin(), points.end());
  for (std::size_t j = 1; j <= points.size(); ++j) {
    const GroundTruthFrame * gf = truth_at(frame + static_cast<std::int64_t>(j));
    if (!gf) return;
    const auto it = std::find_if(gf->agents.begin(), gf->agents.end(), [&](const AgentTruth & a) { return a.id == best->id; });
    if (it == gf->agents.end()) return;
    s.truth.push_back(it->position);
  }
  samples_.push_back(std::move(s));
}

void RunEvaluator::add_cloud(std::span<const CloudPoint> cloud, const Pose & ego)
{
  map_truth_.add(cloud, ego);
  has_cloud_ = true;
}

EvalReport RunEvaluator::finish(const std::vector<Vec3> * map_points) const
{
  EvalReport r;
  r.per_frame = frames_;
  r.tracking = accumulate(frames_);
  if (r.tracking.gt > 0) r.mota = mota(r.tracking);
  if (r.tracking.tp > 0) {
    r.motp = motp(r.tracking);
    r.oca = oca(r.tracking);
  }
  r.prediction.events = prediction_events_;
  r.prediction.evaluated = samples_.size();
  if (!samples_.empty()) {
    r.prediction.ade = ade(samples_);
    r.prediction.fde = fde(samples_);
    r.prediction.fde_z = fde_z(samples_);
  }
  if (map_points && has_cloud_ && !map_truth_.static_voxels().empty()) {
    r.map_counts = map_counts(map::voxelize(*map_points, options_.grid), map_truth_);
    const PrRr pr = map_pr_rr(*r.map_counts);
    r.pr = pr.pr;
    r.rr = pr.rr;
    if (pr.pr > 0.0 || pr.rr > 0.0) r.f1 = eval::f1(pr.pr, pr.rr);
  }
  return r;
}

namespace
{

std::vector<json> read_jsonl(const std::filesystem::path & file)
{
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + file.string());
  std::vector<json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception & e) {
      fail(ErrorCode::Format, file.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

Vec3 vec(const json & j) { return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()); }

}  // namespace

EvalReport evaluate_run(const std::filesystem::path & run_dir, const std::filesystem::path & dataset_dir,
                        const EvalOptions & options)
{
  namespace fs = std::filesystem;
  if (!fs::exists(dataset_dir / "gt.jsonl")) fail(ErrorCode::Io, "missing ground truth in " + dataset_dir.string());
  if (!fs::exists(run_dir / "tracks.jsonl")) fail(ErrorCode::Io, "missing tracks.jsonl in " + run_dir.string());
  const bool with_map = fs::exists(run_dir / "map.xyz");
  const sim::Dataset ds = sim::read_dataset(dataset_dir, with_map);

  // Frames covered by the run.
  std::size_t n = ds.truth.size();
  if (fs::exists(run_dir / "timing.json")) {
    const json timing = json::parse(sim::read_text_file(run_dir / "timing.json"));
    n = std::min(n, timing.at("frames").size());
  }

  std::map<std::int64_t, std::vector<ReportedObject>> reported;
  std::map<std::pair<std::int64_t, std::int64_t>, Vec3> position;
  try {
    for (const auto & r : read_jsonl(run_dir / "tracks.jsonl")) {
      const auto frame = r.at("frame").get<std::int64_t>();
      const auto id = r.at("id").get<std::int64_t>();
      const Vec3 p = vec(r.at("p"));
      position[{frame, id}] = p;
      if (frame < 0 || static_cast<std::size_t>(frame) >= n) {
        fail(ErrorCode::Format, "track record for frame " + std::to_string(frame) + " is outside the ground truth");
      }
      if (r.at("lifecycle").get<std::string>() == "birth") continue;
      reported[frame].push_back({id, p, parse_class(r.at("class").get<std::string>())});
    }
  } catch (const json::exception & e) {
    fail(ErrorCode::Format, std::string("tracks.jsonl: ") + e.what());
  }

  RunEvaluator ev(std::span<const GroundTruthFrame>(ds.truth.data(), n), options);
  for (std::size_t k = 0; k < n; ++k) {
    const auto idx = static_cast<std::int64_t>(k);
    const auto it = reported.find(idx);
    ev.add_tracks(ds.truth[k].index,
                  it == reported.end() ? std::span<const ReportedObject>() : std::span<const ReportedObject>(it->second));
    if (with_map) ev.add_cloud(ds.frames[k].cloud, ds.frames[k].ego_pose);
  }

  if (fs::exists(run_dir / "predictions.jsonl")) {
    try {
      for (const auto & r : read_jsonl(run_dir / "predictions.jsonl")) {
        const auto frame = r.at("frame").get<std::int64_t>();
        const auto id = r.at("id").get<std::int64_t>();
        const auto it = position.find({frame, id});
        if (it == position.end()) fail(ErrorCode::Format, "prediction for unknown track " + std::to_string(id));
        std::vector<Vec3> pts;
        for (const auto & p : r.at("points")) pts.push_back(vec(p));
        ev.add_prediction(frame, it->second, pts);
      }
    } catch (const json::exception & e) {
      fail(ErrorCode::Format, std::string("predictions.jsonl: ") + e.what());
    }
  }

  std::vector<Vec3> map_points;
  if (with_map) map_points = map::import_points(run_dir / "map.xyz");
  return ev.finish(with_map ? &map_points : nullptr);
}

namespace
{

struct Row
{
  const char * name;
  std::optional<double> value;
};

std::vector<Row> rows(const EvalReport & r)
{
  return {{"MOTA", r.mota},
          {"MOTP_m", r.motp},
          {"OCA", r.oca},
          {"IDsw", static_cast<double>(r.tracking.idsw)},
          {"FN", static_cast<double>(r.tracking.fn)},
          {"FP", static_cast<double>(r.tracking.fp)},
          {"ADE_m", r.prediction.ade},
          {"FDE_m", r.prediction.fde},
          {"FDE_z_m", r.prediction.fde_z},
          {"PR", r.pr},
          {"RR", r.rr},
          {"F1", r.f1}};
}

std::string fmt(const std::optional<double> & v)
{
  if (!v) return "-";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", *v);
  return buf;
}

}  // namespace

std::string summary_csv(const EvalReport & r, const std::string & label)
{
  std::ostringstream head, line;
  head << "run";
  line << label;
  for (const auto & row : rows(r)) {
    head << ',' << row.name;
    line << ',' << (row.value ? fmt(row.value) : "");
  }
  return head.str() + "\n" + line.str() + "\n";
}

std::string summary_table(const EvalReport & r, const std::string & label)
{
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-10s %14s\n", "metric", label.c_str());
  out << buf;
  for (const auto & row : rows(r)) {
    std::snprintf(buf, sizeof(buf), "%-10s %14s\n", row.name, fmt(row.value).c_str());
    out << buf;
  }
  return out.str();
}

std::string comparison_table(const EvalReport & a, const std::string & label_a, const EvalReport & b,
                             const std::string & label_b)
{
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-10s %14s %14s %14s\n", "metric", label_a.c_str(), label_b.c_str(), "delta");
  out << buf;
  const auto ra = rows(a), rb = rows(b);
  for (std::size_t i = 0; i < ra.size(); ++i) {
    std::optional<double> d;
    if (ra[i].value && rb[i].value) d = *rb[i].value - *ra[i].value;
    std::snprintf(buf, sizeof(buf), "%-10s %14s %14s %14s\n", ra[i].name, fmt(ra[i].value).c_str(),
                  fmt(rb[i].value).c_str(), fmt(d).c_str());
    out << buf;
  }
  return out.str();
}

json comparison_json(const EvalReport & a, const EvalReport & b)
{
  json out = json::object();
  const auto ra = rows(a), rb = rows(b);
  for (std::size_t i = 0; i < ra.size(); ++i) {
    json d = nullptr;
    if (ra[i].value && rb[i].value) d = *rb[i].value - *ra[i].value;
    out[ra[i].name] = {{"a", opt(ra[i].value)}, {"b", opt(rb[i].value)}, {"delta", d}};
  }
  return out;
}

}  // namespace rmot::eval

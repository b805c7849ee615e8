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

#include "rmot/sim/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rmot/error.hpp"
#include "rmot/sim/scenario.hpp"

namespace rmot::sim
{

using nlohmann::json;
namespace fs = std::filesystem;

namespace
{

constexpr const char * kFramesFormat = "rmot-frames";
constexpr const char * kTruthFormat = "rmot-gt";
constexpr const char * kCloudTag = "# rmot-cloud";

json pixel_json(const Eigen::Vector2d & v) { return json::array({v.x(), v.y()}); }

Eigen::Vector2d pixel_from(const json & j)
{
  if (!j.is_array() || j.size() != 2) fail(ErrorCode::Format, "expected a 2-vector");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<std::string> read_lines(const fs::path & file)
{
  std::ifstream in(file);
  if (!in) fail(ErrorCode::Io, "cannot open " + file.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

json parse_line(const std::string & line, const fs::path & file, size_t n)
{
  try {
    return json::parse(line);
  } catch (const json::exception & e) {
    fail(ErrorCode::Format, file.filename().string() + " line " + std::to_string(n + 1) + ": " + e.what());
  }
}

void check_header(const json & h, const char * format, const fs::path & file)
{
  if (!h.is_object() || h.value("format", std::string()) != format) {
    fail(ErrorCode::Format, file.filename().string() + ": missing '" + format + "' header");
  }
  const int version = h.value("version", -1);
  if (version != kDatasetVersion) {
    fail(ErrorCode::Format, file.filename().string() + ": unsupported format version " + std::to_string(version));
  }
}

template <typename T>
void append_number(std::string & out, T v)
{
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

std::string read_text_file(const fs::path & file)
{
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path & file, const std::string & text)
{
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + file.string());
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed for " + file.string());
}

json vec3_json(const Vec3 & v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from(const json & j)
{
  if (!j.is_array() || j.size() != 3) fail(ErrorCode::Format, "expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::string cloud_file_name(std::int64_t index)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "cloud_%06lld.xyz", static_cast<long long>(index));
  return buf;
}

json frame_to_json(const SensorFrame & f)
{
  json d3 = json::array();
  for (const auto & b : f.detections3d) {
    d3.push_back({{"c", vec3_json(b.center)}, {"s", vec3_json(b.size)}, {"yaw", b.yaw},
                  {"cls", std::string(class_name(b.label))}, {"score", b.score}});
  }
  json d2 = json::array();
  for (const auto & d : f.detections2d) {
    d2.push_back({{"uv", pixel_json(d.center)}, {"wh", pixel_json(d.extent)},
                  {"cls", std::string(class_name(d.label))}, {"score", d.score}});
  }
  const auto & q = f.ego_pose.orientation;
  return {{"frame", f.index},
          {"t", f.timestamp},
          {"ego", {{"p", vec3_json(f.ego_pose.position)}, {"q", json::array({q.w(), q.x(), q.y(), q.z()})}}},
          {"det3d", d3},
          {"det2d", d2},
          {"points", f.cloud.size()}};
}

SensorFrame frame_from_json(const json & j)
{
  SensorFrame f;
  f.index = j.at("frame").get<std::int64_t>();
  f.timestamp = j.at("t").get<double>();
  const auto & ego = j.at("ego");
  f.ego_pose.position = vec3_from(ego.at("p"));
  const auto & q = ego.at("q");
  if (!q.is_array() || q.size() != 4) fail(ErrorCode::Format, "ego quaternion must have 4 components");
  f.ego_pose.orientation = Eigen::Quaterniond(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                                              q[3].get<double>());
  for (const auto & b : j.at("det3d")) {
    OrientedBox3 box;
    box.center = vec3_from(b.at("c"));
    box.size = vec3_from(b.at("s"));
    box.yaw = b.at("yaw").get<double>();
    box.label = parse_class(b.at("cls").get<std::string>());
    box.score = b.value("score", 1.0);
    f.detections3d.push_back(box);
  }
  for (const auto & d : j.at("det2d")) {
    Detection2D det;
    det.center = pixel_from(d.at("uv"));
    det.extent = pixel_from(d.at("wh"));
    det.label = parse_class(d.at("cls").get<std::string>());
    det.score = d.value("score", 1.0);
    f.detections2d.push_back(det);
  }
  return f;
}

json truth_to_json(const GroundTruthFrame & g)
{
  json agents = json::array();
  for (const auto & a : g.agents) {
    agents.push_back({{"id", a.id}, {"cls", std::string(class_name(a.cls))}, {"p", vec3_json(a.position)},
                      {"v", vec3_json(a.velocity)}, {"s", vec3_json(a.size)}, {"yaw", a.yaw},
                      {"visible", a.visible}});
  }
  return {{"frame", g.index}, {"t", g.timestamp}, {"agents", agents}};
}

GroundTruthFrame truth_from_json(const json & j)
{
  GroundTruthFrame g;
  g.index = j.at("frame").get<std::int64_t>();
  g.timestamp = j.at("t").get<double>();
  for (const auto & a : j.at("agents")) {
    AgentTruth t;
    t.id = a.at("id").get<int>();
    t.cls = parse_class(a.at("cls").get<std::string>());
    t.position = vec3_from(a.at("p"));
    t.velocity = vec3_from(a.at("v"));
    t.size = a.contains("s") ? vec3_from(a.at("s")) : Vec3::Ones();
    t.yaw = a.value("yaw", 0.0);
    t.visible = a.value("visible", true);
    g.agents.push_back(t);
  }
  return g;
}

void write_cloud(const fs::path & file, std::span<const CloudPoint> cloud)
{
  std::string out;
  out.reserve(48 * cloud.size() + 32);
  out += kCloudTag;
  out += ' ';
  append_number(out, kDatasetVersion);
  out += ' ';
  append_number(out, cloud.size());
  out += '\n';
  for (const auto & c : cloud) {
    append_number(out, c.p.x());
    out += ' ';
    append_number(out, c.p.y());
    out += ' ';
    append_number(out, c.p.z());
    out += ' ';
    append_number(out, c.label);
    out += '\n';
  }
  write_text_file(file, out);
}

std::vector<CloudPoint> read_cloud(const fs::path & file)
{
  const std::string text = read_text_file(file);
  const char * p = text.data();
  const char * end = p + text.size();
  const std::string tag = kCloudTag;
  if (text.compare(0, tag.size(), tag) != 0) fail(ErrorCode::Format, file.filename().string() + ": missing cloud header");
  p += tag.size();
  auto skip_ws = [&]() {
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r' || *p == '\n')) ++p;
  };
  auto bad = [&]() { fail(ErrorCode::Format, file.filename().string() + ": malformed or truncated cloud file"); };
  int version = 0;
  size_t count = 0;
  skip_ws();
  if (auto r = std::from_chars(p, end, version); r.ec != std::errc()) bad(); else p = r.ptr;
  if (version != kDatasetVersion) fail(ErrorCode::Format, file.filename().string() + ": unsupported cloud version");
  skip_ws();
  if (auto r = std::from_chars(p, end, count); r.ec != std::errc()) bad(); else p = r.ptr;
  std::vector<CloudPoint> cloud(count);
  for (size_t i = 0; i < count; ++i) {
    auto & c = cloud[i];
    for (int k = 0; k < 3; ++k) {
      skip_ws();
      float v = 0.0f;
      auto r = std::from_chars(p, end, v);
      if (r.ec != std::errc()) bad();
      p = r.ptr;
      c.p[k] = v;
    }
    skip_ws();
    auto r = std::from_chars(p, end, c.label);
    if (r.ec != std::errc()) bad();
    p = r.ptr;
  }
  skip_ws();
  if (p != end) bad();
  return cloud;
}

void write_dataset(const fs::path & dir, const DatasetHeader & header, std::span<const SensorFrame> frames,
                   std::span<const GroundTruthFrame> truth, const json * scenario)
{
  if (frames.size() != truth.size()) fail(ErrorCode::InvalidArgument, "frame and truth streams differ in length");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());

  json fh = {{"format", kFramesFormat}, {"version", kDatasetVersion}, {"frame_rate", header.frame_rate},
             {"frame_count", frames.size()}, {"camera", camera_to_json(header.camera)}};
  std::string ftext = fh.dump() + "\n";
  for (const auto & f : frames) {
    ftext += frame_to_json(f).dump();
    ftext += '\n';
    write_cloud(dir / cloud_file_name(f.index), f.cloud);
  }
  write_text_file(dir / "frames.jsonl", ftext);

  json gh = {{"format", kTruthFormat}, {"version", kDatasetVersion}, {"frame_count", truth.size()}};
  std::string gtext = gh.dump() + "\n";
  for (const auto & g : truth) {
    gtext += truth_to_json(g).dump();
    gtext += '\n';
  }
  write_text_file(dir / "gt.jsonl", gtext);
  if (scenario) write_text_file(dir / "scenario.json", scenario->dump(2) + "\n");
}

DatasetHeader read_dataset_header(const fs::path & dir)
{
  const fs::path file = dir / "frames.jsonl";
  std::ifstream in(file);
  if (!in) fail(ErrorCode::Io, "cannot open " + file.string());
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::Format, "frames.jsonl is empty");
  const json h = parse_line(line, file, 0);
  check_header(h, kFramesFormat, file);
  DatasetHeader header;
  try {
    header.frame_rate = h.at("frame_rate").get<double>();
    header.frame_count = h.at("frame_count").get<std::int64_t>();
    header.camera = camera_from_json(h.at("camera"));
  } catch (const json::exception & e) {
    fail(ErrorCode::Format, std::string("frames.jsonl header: ") + e.what());
  }
  return header;
}

Dataset read_dataset(const fs::path & dir, bool load_clouds)
{
  if (!fs::is_directory(dir)) fail(ErrorCode::Io, "dataset directory not found: " + dir.string());
  Dataset ds;
  ds.header = read_dataset_header(dir);

  const fs::path ffile = dir / "frames.jsonl";
  const auto flines = read_lines(ffile);
  if (static_cast<std::int64_t>(flines.size()) - 1 != ds.header.frame_count) {
    fail(ErrorCode::Format, "frames.jsonl holds " + std::to_string(flines.size() - 1) + " frames, header says " +
                                std::to_string(ds.header.frame_count) + " (truncated?)");
  }
  const fs::path gfile = dir / "gt.jsonl";
  const auto glines = read_lines(gfile);
  if (glines.empty()) fail(ErrorCode::Format, "gt.jsonl is empty");
  const json gh = parse_line(glines[0], gfile, 0);
  check_header(gh, kTruthFormat, gfile);
  if (gh.value("frame_count", -1LL) != ds.header.frame_count ||
      static_cast<std::int64_t>(glines.size()) - 1 != ds.header.frame_count) {
    fail(ErrorCode::Format, "gt.jsonl frame count does not match frames.jsonl (truncated?)");
  }

  ds.frames.reserve(flines.size() - 1);
  ds.truth.reserve(glines.size() - 1);
  for (size_t i = 1; i < flines.size(); ++i) {
    const json j = parse_line(flines[i], ffile, i);
    SensorFrame f;
    try {
      f = frame_from_json(j);
    } catch (const json::exception & e) {
      fail(ErrorCode::Format, "frames.jsonl line " + std::to_string(i + 1) + ": " + e.what());
    }
    if (f.index != static_cast<std::int64_t>(i - 1)) fail(ErrorCode::Format, "frames.jsonl frame indices are not sequential");
    if (load_clouds) {
      f.cloud = read_cloud(dir / cloud_file_name(f.index));
      if (j.contains("points") && j.at("points").get<size_t>() != f.cloud.size()) {
        fail(ErrorCode::Format, cloud_file_name(f.index) + ": point count mismatch");
      }
    }
    ds.frames.push_back(std::move(f));
  }
  for (size_t i = 1; i < glines.size(); ++i) {
    const json j = parse_line(glines[i], gfile, i);
    try {
      ds.truth.push_back(truth_from_json(j));
    } catch (const json::exception & e) {
      fail(ErrorCode::Format, "gt.jsonl line " + std::to_string(i + 1) + ": " + e.what());
    }
    if (ds.truth.back().index != static_cast<std::int64_t>(i - 1)) {
      fail(ErrorCode::Format, "gt.jsonl frame indices are not sequential");
    }
  }
  if (fs::exists(dir / "scenario.json")) {
    try {
      ds.scenario = json::parse(read_text_file(dir / "scenario.json"));
    } catch (const json::exception & e) {
      fail(ErrorCode::Format, std::string("scenario.json: ") + e.what());
    }
  }
  return ds;
}

}  // namespace rmot::sim

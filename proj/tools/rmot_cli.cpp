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

// rmot command-line front end. Talks to the library only through rmot.h.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "rmot/rmot.h"

using nlohmann::json;
namespace fs = std::filesystem;

namespace
{

constexpr int kUsageExit = 64;

// Failure carrying the exit status and the machine-readable error kind.
struct CliError
{
  int exit_code;
  std::string kind;
  std::string message;
};

[[noreturn]] void fail(int code, std::string kind, std::string message)
{
  throw CliError{code, std::move(kind), std::move(message)};
}

[[noreturn]] void fail_config(std::string message) { fail(RMOT_E_CONFIG, "config", std::move(message)); }

// Owns a string returned by the library.
class Owned
{
public:
  Owned() = default;
  Owned(const Owned &) = delete;
  Owned & operator=(const Owned &) = delete;
  ~Owned() { rmot_string_free(p_); }
  char ** out() { return &p_; }
  std::string str() const { return p_ != nullptr ? std::string(p_) : std::string(); }

private:
  char * p_{nullptr};
};

void check(rmot_status s)
{
  if (s != RMOT_OK) fail(static_cast<int>(s), rmot_status_name(s), rmot_last_error());
}

std::string read_file(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(RMOT_E_IO, "io", "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path & p, const std::string & text)
{
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) fail(RMOT_E_IO, "io", "cannot write " + p.string());
}

json parse_json(const std::string & text, const std::string & what)
{
  try {
    return json::parse(text);
  } catch (const json::exception & e) {
    fail_config(what + ": " + e.what());
  }
}

// Options shared by all subcommands; flags override the config file.
struct Common
{
  std::string config_path;
  json config = json::object();
  std::optional<std::uint64_t> seed;
  std::string out;
  long frames{-1};
  bool frames_set{false};

  void load()
  {
    if (config_path.empty()) return;
    config = parse_json(read_file(config_path), config_path);
    if (!config.is_object()) fail_config(config_path + ": top level must be an object");
  }

  template <class T>
  std::optional<T> key(const char * name) const
  {
    const auto it = config.find(name);
    if (it == config.end() || it->is_null()) return std::nullopt;
    try {
      return it->get<T>();
    } catch (const json::exception &) {
      fail_config(std::string("config key '") + name + "' has the wrong type");
    }
  }

  // Relative paths in a config file resolve against the file's directory.
  std::string path_key(const char * name) const
  {
    auto v = key<std::string>(name);
    if (!v) return {};
    fs::path p(*v);
    if (p.is_relative() && !config_path.empty()) p = fs::path(config_path).parent_path() / p;
    return p.string();
  }

  std::string out_dir() const
  {
    if (!out.empty()) return out;
    return path_key("out");
  }

  long frame_limit() const
  {
    if (frames_set) return frames;
    return key<long>("frames").value_or(-1);
  }

  json overrides(const std::vector<std::string> & baselines) const
  {
    json o = json::object();
    if (auto it = config.find("pipeline"); it != config.end()) {
      if (!it->is_object()) fail_config("config key 'pipeline' must be an object");
      o = *it;
    }
    if (!baselines.empty()) {
      json & b = o["baselines"];
      if (b.is_null()) b = json::array();
      for (const auto & name : baselines) b.push_back(name);
    }
    return o;
  }
};

void add_common(CLI::App * cmd, Common & c)
{
  cmd->add_option("--config", c.config_path, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Scenario seed");
  cmd->add_option("--out", c.out, "Output location");
  cmd->add_option("--frames", c.frames, "Process at most N frames")->check(CLI::NonNegativeNumber);
}

// Scenario from --preset, the config's "preset", or the config's "scenario"
// (inline object or path); --seed replaces the scenario seed.
std::string resolve_scenario(const Common & c, const std::string & preset_flag)
{
  std::string preset = preset_flag;
  if (preset.empty()) preset = c.key<std::string>("preset").value_or("");
  const std::uint64_t seed = c.seed.value_or(c.key<std::uint64_t>("seed").value_or(1));
  json scenario;
  if (!preset.empty()) {
    Owned s;
    check(rmot_preset_scenario(preset.c_str(), seed, s.out()));
    scenario = json::parse(s.str());
  } else if (auto it = c.config.find("scenario"); it != c.config.end()) {
    if (it->is_string()) {
      scenario = parse_json(read_file(c.path_key("scenario")), it->get<std::string>());
    } else if (it->is_object()) {
      scenario = *it;
    } else {
      fail_config("config key 'scenario' must be an object or a path");
    }
    if (c.seed || c.key<std::uint64_t>("seed")) scenario["seed"] = seed;
  } else {
    fail(kUsageExit, "usage", "no scenario: give --preset or a config with 'preset' or 'scenario'");
  }
  return scenario.dump();
}

void print_json_line(const std::string & text) { std::cout << json::parse(text).dump() << '\n'; }

void cmd_simulate(const Common & c, const std::string & preset)
{
  const std::string out = c.out_dir();
  if (out.empty()) fail(kUsageExit, "usage", "simulate needs --out");
  const std::string scenario = resolve_scenario(c, preset);
  Owned sum;
  check(rmot_simulate(scenario.c_str(), out.c_str(), c.frame_limit(), sum.out()));
  print_json_line(sum.str());
}

void cmd_run(const Common & c, std::string dataset, const std::string & preset,
             const std::vector<std::string> & baselines, std::string membank)
{
  const std::string out = c.out_dir();
  if (out.empty()) fail(kUsageExit, "usage", "run needs --out");
  if (dataset.empty()) dataset = c.path_key("dataset");
  if (membank.empty()) membank = c.path_key("membank");
  if (dataset.empty()) {
    // Simulate first; the dataset lands next to the run outputs.
    const std::string scenario = resolve_scenario(c, preset);
    dataset = (fs::path(out) / "dataset").string();
    check(rmot_simulate(scenario.c_str(), dataset.c_str(), c.frame_limit(), nullptr));
  }
  const std::string overrides = c.overrides(baselines).dump();
  Owned sum;
  check(rmot_run(dataset.c_str(), out.c_str(), overrides.c_str(), membank.empty() ? nullptr : membank.c_str(),
                 c.frame_limit(), sum.out()));
  print_json_line(sum.str());
}

void cmd_seed(const Common & c, std::vector<std::string> datasets, std::string membank, int stride,
              std::size_t capacity)
{
  if (membank.empty()) membank = c.path_key("membank");
  if (membank.empty()) membank = c.out_dir();
  if (membank.empty()) fail(kUsageExit, "usage", "seed-memory needs --membank");
  if (datasets.empty()) {
    if (auto list = c.key<std::vector<std::string>>("datasets")) {
      for (auto & d : *list) {
        fs::path p(d);
        if (p.is_relative() && !c.config_path.empty()) p = fs::path(c.config_path).parent_path() / p;
        datasets.push_back(p.string());
      }
    }
  }
  std::vector<const char *> ptrs;
  for (const auto & d : datasets) ptrs.push_back(d.c_str());
  const std::string overrides = c.overrides({}).dump();
  Owned sum;
  check(rmot_seed_memory(ptrs.data(), ptrs.size(), membank.c_str(), overrides.c_str(), stride, capacity,
                         sum.out()));
  const json j = json::parse(sum.str());
  for (const auto & w : j.value("warnings", json::array())) {
    std::cerr << json{{"warning", w}}.dump() << '\n';
  }
  std::cout << j.dump() << '\n';
}

std::string dataset_of_run(const std::string & run_dir)
{
  const fs::path rc = fs::path(run_dir) / "run_config.json";
  if (!fs::exists(rc)) return {};
  const json j = parse_json(read_file(rc), rc.string());
  return j.value("dataset", std::string());
}

void cmd_eval(const Common & c, std::string run_dir, std::string dataset, const std::string & compare,
              const std::string & csv)
{
  if (run_dir.empty()) run_dir = c.path_key("run");
  if (run_dir.empty()) fail(kUsageExit, "usage", "eval needs --run");
  if (dataset.empty()) dataset = c.path_key("dataset");
  if (dataset.empty()) dataset = dataset_of_run(run_dir);
  if (dataset.empty()) fail(kUsageExit, "usage", "eval needs --dataset (none recorded in the run)");
  const fs::path out = c.out_dir().empty() ? fs::path(run_dir) : fs::path(c.out_dir());

  Owned report, table;
  check(rmot_eval(run_dir.c_str(), dataset.c_str(), fs::path(run_dir).filename().string().c_str(), report.out(),
                  table.out()));
  write_file(out / "eval_report.json", report.str() + "\n");
  if (compare.empty()) {
    std::cout << table.str();
  } else {
    std::string la = fs::path(run_dir).filename().string();
    std::string lb = fs::path(compare).filename().string();
    if (la == lb) la += "_a", lb += "_b";
    Owned cmp, cmp_table;
    check(rmot_eval_compare(run_dir.c_str(), compare.c_str(), dataset.c_str(), la.c_str(), lb.c_str(), cmp.out(),
                            cmp_table.out()));
    write_file(out / "eval_compare.json", cmp.str() + "\n");
    std::cout << cmp_table.str();
  }
  if (!csv.empty()) {
    // Plot data: one row per frame.
    const json r = json::parse(report.str());
    std::ostringstream ss;
    ss << "frame,gt,tp,fp,fn,idsw,ignored\n";
    for (const auto & f : r.value("per_frame", json::array())) {
      ss << f.value("frame", 0L) << ',' << f.value("gt", 0L) << ',' << f.value("tp", 0L) << ',' << f.value("fp", 0L)
         << ',' << f.value("fn", 0L) << ',' << f.value("idsw", 0L) << ',' << f.value("ignored", 0L) << '\n';
    }
    write_file(csv, ss.str());
  }
}

void cmd_bench(const Common & c, std::string dataset, const std::string & preset, int repeat, std::string membank)
{
  if (dataset.empty()) dataset = c.path_key("dataset");
  if (membank.empty()) membank = c.path_key("membank");
  std::optional<fs::path> scratch;
  if (dataset.empty()) {
    const std::string scenario = resolve_scenario(c, preset);
    scratch = fs::temp_directory_path() / ("rmot_bench_" + std::to_string(::getpid()));
    dataset = scratch->string();
    check(rmot_simulate(scenario.c_str(), dataset.c_str(), c.frame_limit(), nullptr));
  }
  const std::string overrides = c.overrides({}).dump();
  Owned result;
  const rmot_status s =
    rmot_bench(dataset.c_str(), overrides.c_str(), repeat, membank.empty() ? nullptr : membank.c_str(), result.out());
  if (scratch) {
    std::error_code ec;
    fs::remove_all(*scratch, ec);
  }
  check(s);
  if (!c.out_dir().empty()) write_file(c.out_dir(), result.str() + "\n");
  std::cout << result.str() << '\n';
}

void emit_error(int code, const std::string & kind, const std::string & message)
{
  std::cerr << json{{"error", kind}, {"code", code}, {"message", message}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Multi-object tracking, trajectory prediction and dynamic-object removal on simulated LiDAR/camera data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rmot_version()));

  Common common;
  std::string preset, dataset, membank, run_dir, compare, csv;
  std::vector<std::string> baselines, datasets;
  int stride = 1, repeat = 5;
  std::size_t capacity = 0;

  auto * presets = app.add_subcommand("presets", "List built-in scenario presets");
  auto * scenario = app.add_subcommand("scenario", "Print the scenario JSON of a preset");
  scenario->add_option("--preset", preset, "Preset name")->required();
  scenario->add_option("--seed", common.seed, "Scenario seed");

  auto * sim = app.add_subcommand("simulate", "Generate a dataset directory");
  add_common(sim, common);
  sim->add_option("--preset", preset, "Preset name instead of a scenario config");

  auto * run = app.add_subcommand("run", "Track, predict and map over a dataset");
  add_common(run, common);
  run->add_option("--dataset", dataset, "Dataset directory (else simulated from the scenario)");
  run->add_option("--preset", preset, "Preset to simulate when no dataset is given");
  run->add_option("--baseline", baselines, "Baseline switch")
    ->check(CLI::IsMember({"fixed-gate", "kf-only", "single-frame-removal"}));
  run->add_option("--membank", membank, "Memory bank file");

  auto * seed = app.add_subcommand("seed-memory", "Build a memory bank from training datasets");
  add_common(seed, common);
  seed->add_option("datasets", datasets, "Training dataset directories");
  seed->add_option("--membank", membank, "Output bank file");
  seed->add_option("--stride", stride, "Window stride per track")->check(CLI::PositiveNumber);
  seed->add_option("--capacity", capacity, "Bank capacity")->check(CLI::PositiveNumber);

  auto * ev = app.add_subcommand("eval", "Score run outputs against ground truth");
  add_common(ev, common);
  ev->add_option("--run", run_dir, "Run output directory");
  ev->add_option("--dataset", dataset, "Dataset with ground truth (default: the one the run used)");
  ev->add_option("--compare", compare, "Second run for side-by-side deltas");
  ev->add_option("--csv", csv, "Write per-frame counts as CSV");

  auto * bench = app.add_subcommand("bench", "Per-stage latency percentiles");
  add_common(bench, common);
  bench->add_option("--dataset", dataset, "Dataset directory (else simulated from the scenario)");
  bench->add_option("--preset", preset, "Preset to simulate when no dataset is given");
  bench->add_option("--repeat", repeat, "Replays of the dataset")->check(CLI::PositiveNumber);
  bench->add_option("--membank", membank, "Memory bank file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp & e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    emit_error(kUsageExit, "usage", e.what());
    return kUsageExit;
  }

  try {
    common.frames_set = common.frames >= 0;
    common.load();
    if (presets->parsed()) {
      Owned names;
      check(rmot_preset_names(names.out()));
      for (const auto & n : json::parse(names.str())) std::cout << n.get<std::string>() << '\n';
    } else if (scenario->parsed()) {
      Owned s;
      check(rmot_preset_scenario(preset.c_str(), common.seed.value_or(1), s.out()));
      std::cout << json::parse(s.str()).dump(2) << '\n';
    } else if (sim->parsed()) {
      cmd_simulate(common, preset);
    } else if (run->parsed()) {
      cmd_run(common, dataset, preset, baselines, membank);
    } else if (seed->parsed()) {
      if (capacity == 0) capacity = common.key<std::size_t>("capacity").value_or(0);
      cmd_seed(common, datasets, membank, stride, capacity);
    } else if (ev->parsed()) {
      cmd_eval(common, run_dir, dataset, compare, csv);
    } else if (bench->parsed()) {
      cmd_bench(common, dataset, preset, repeat, membank);
    }
  } catch (const CliError & e) {
    emit_error(e.exit_code, e.kind, e.message);
    return e.exit_code;
  } catch (const std::exception & e) {
    emit_error(RMOT_E_INTERNAL, "internal", e.what());
    return RMOT_E_INTERNAL;
  }
  return 0;
}

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

#include "rmot/rmot.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "rmot/app/pipeline.hpp"
#include "rmot/app/presets.hpp"
#include "rmot/error.hpp"
#include "rmot/eval/evaluator.hpp"
#include "rmot/map/static_map.hpp"
#include "rmot/sim/dataset.hpp"
#include "rmot/sim/simulator.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

struct rmot_pipeline
{
  rmot::sim::Dataset dataset;
  std::unique_ptr<rmot::app::Pipeline> pipeline;
  std::size_t next{0};
};

namespace
{

thread_local std::string g_error;
thread_local rmot_status g_status = RMOT_OK;

rmot_status to_status(rmot::ErrorCode c) { return static_cast<rmot_status>(static_cast<int>(c) + 1); }

rmot_status set_error(rmot_status s, const std::string & msg)
{
  g_status = s;
  g_error = msg;
  return s;
}

// Runs `f` and maps every exception onto a status code.
template <class F>
rmot_status guarded(F && f) noexcept
{
  try {
    f();
    g_status = RMOT_OK;
    g_error.clear();
    return RMOT_OK;
  } catch (const rmot::Error & e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const json::exception & e) {
    return set_error(RMOT_E_CONFIG, std::string("invalid JSON: ") + e.what());
  } catch (const fs::filesystem_error & e) {
    return set_error(RMOT_E_IO, e.what());
  } catch (const std::exception & e) {
    return set_error(RMOT_E_INTERNAL, e.what());
  } catch (...) {
    return set_error(RMOT_E_INTERNAL, "unknown exception");
  }
}

void require(const void * p, const char * name)
{
  if (p == nullptr) rmot::fail(rmot::ErrorCode::InvalidArgument, std::string(name) + " must not be NULL");
}

char * dup_string(const std::string & s)
{
  char * out = static_cast<char *>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char ** out, const std::string & s)
{
  if (out != nullptr) *out = dup_string(s);
}

json parse_overrides(const char * text)
{
  if (text == nullptr || *text == '\0') return json();
  json j = json::parse(text);
  if (!j.is_object() && !j.is_null()) rmot::fail(rmot::ErrorCode::Config, "overrides must be a JSON object");
  return j;
}

std::optional<fs::path> opt_path(const char * p)
{
  if (p == nullptr || *p == '\0') return std::nullopt;
  return fs::path(p);
}

json frame_json(const rmot::app::FrameOutput & o)
{
  json preds = json::array();
  for (const auto & p : o.predictions) preds.push_back(rmot::predict::prediction_record(o.frame, p.track_id, p.result));
  json j{{"frame", o.frame},
         {"timestamp", o.timestamp},
         {"tracks", o.track_records},
         {"predictions", std::move(preds)},
         {"memory_writes", o.memory_writes},
         {"timing",
          {{"tracking_ms", o.timing.tracking_ms},
           {"prediction_ms", o.timing.prediction_ms},
           {"mapping_ms", o.timing.mapping_ms},
           {"total_ms", o.timing.total_ms}}}};
  j["removal"] = o.removal ? o.removal->to_json() : json();
  return j;
}

}  // namespace

extern "C" {

const char * rmot_version(void) { return "0.1.0"; }

const char * rmot_status_name(rmot_status status)
{
  if (status == RMOT_OK) return "ok";
  const int c = static_cast<int>(status) - 1;
  if (c < 0 || c > static_cast<int>(rmot::ErrorCode::Internal)) return "unknown";
  return rmot::to_string(static_cast<rmot::ErrorCode>(c)).data();
}

const char * rmot_last_error(void) { return g_error.c_str(); }

rmot_status rmot_last_status(void) { return g_status; }

void rmot_string_free(char * s) { std::free(s); }

rmot_status rmot_preset_names(char ** out_json)
{
  return guarded([&] {
    require(out_json, "out_json");
    emit(out_json, json(rmot::app::preset_names()).dump());
  });
}

rmot_status rmot_preset_scenario(const char * name, uint64_t seed, char ** out_json)
{
  return guarded([&] {
    require(name, "name");
    require(out_json, "out_json");
    emit(out_json, rmot::sim::scenario_to_json(rmot::app::make_preset(name, seed)).dump());
  });
}

rmot_status rmot_scenario_normalize(const char * scenario_json, char ** out_json)
{
  return guarded([&] {
    require(scenario_json, "scenario_json");
    require(out_json, "out_json");
    auto cfg = rmot::sim::scenario_from_json(json::parse(scenario_json));
    cfg.validate();
    emit(out_json, rmot::sim::scenario_to_json(cfg).dump());
  });
}

rmot_status rmot_simulate(const char * scenario_json, const char * out_dir, long max_frames, char ** out_summary)
{
  return guarded([&] {
    require(scenario_json, "scenario_json");
    require(out_dir, "out_dir");
    const auto cfg = rmot::sim::scenario_from_json(json::parse(scenario_json));
    const auto run = rmot::sim::simulate(cfg, max_frames < 0 ? -1 : static_cast<int>(max_frames));
    const json sj = rmot::sim::scenario_to_json(run.config);
    const rmot::sim::DatasetHeader header{cfg.frame_rate, cfg.camera, static_cast<std::int64_t>(run.frames.size())};
    rmot::sim::write_dataset(out_dir, header, run.frames, run.truth, &sj);
    std::size_t points = 0;
    for (const auto & f : run.frames) points += f.cloud.size();
    emit(out_summary, json{{"frames", run.frames.size()},
                           {"agents", cfg.agents.size()},
                           {"seed", cfg.seed},
                           {"cloud_points", points},
                           {"dataset", out_dir}}
                        .dump());
  });
}

rmot_status rmot_run(const char * dataset_dir, const char * out_dir, const char * overrides_json,
                     const char * membank, long max_frames, char ** out_summary)
{
  return guarded([&] {
    require(dataset_dir, "dataset_dir");
    require(out_dir, "out_dir");
    const auto sum = rmot::app::run_dataset(dataset_dir, out_dir, parse_overrides(overrides_json), opt_path(membank),
                                            max_frames);
    emit(out_summary, sum.to_json().dump());
  });
}

rmot_status rmot_seed_memory(const char * const * dataset_dirs, size_t count, const char * membank_out,
                             const char * overrides_json, int stride, size_t capacity, char ** out_summary)
{
  return guarded([&] {
    if (count > 0) require(dataset_dirs, "dataset_dirs");
    require(membank_out, "membank_out");
    if (stride < 1) rmot::fail(rmot::ErrorCode::InvalidArgument, "stride must be >= 1");
    std::vector<fs::path> dirs;
    for (size_t i = 0; i < count; ++i) {
      require(dataset_dirs[i], "dataset path");
      dirs.emplace_back(dataset_dirs[i]);
    }
    const json overrides = parse_overrides(overrides_json);
    rmot::app::RunConfig cfg;
    cfg.apply(overrides);
    if (capacity > 0) cfg.predictor.capacity = capacity;
    cfg.predictor.validate();
    auto bank = rmot::app::empty_bank(cfg.predictor);
    const auto sum = rmot::app::seed_memory(dirs, bank, overrides, stride);
    bank.save(membank_out);
    json j = sum.to_json();
    j["capacity"] = bank.capacity();
    j["membank"] = membank_out;
    emit(out_summary, j.dump());
  });
}

rmot_status rmot_eval(const char * run_dir, const char * dataset_dir, const char * label, char ** out_report_json,
                      char ** out_table)
{
  return guarded([&] {
    require(run_dir, "run_dir");
    require(dataset_dir, "dataset_dir");
    const auto report = rmot::eval::evaluate_run(run_dir, dataset_dir);
    const std::string name = label != nullptr ? label : "run";
    if (out_report_json != nullptr) *out_report_json = dup_string(report.to_json().dump(2));
    if (out_table != nullptr) {
      try {
        *out_table = dup_string(rmot::eval::summary_table(report, name));
      } catch (...) {
        if (out_report_json != nullptr) std::free(*out_report_json), *out_report_json = nullptr;
        throw;
      }
    }
  });
}

rmot_status rmot_eval_compare(const char * run_a, const char * run_b, const char * dataset_dir, const char * label_a,
                              const char * label_b, char ** out_json, char ** out_table)
{
  return guarded([&] {
    require(run_a, "run_a");
    require(run_b, "run_b");
    require(dataset_dir, "dataset_dir");
    const auto a = rmot::eval::evaluate_run(run_a, dataset_dir);
    const auto b = rmot::eval::evaluate_run(run_b, dataset_dir);
    const std::string la = label_a != nullptr ? label_a : "a";
    const std::string lb = label_b != nullptr ? label_b : "b";
    const std::string j = json{{"labels", {la, lb}},
                               {la, a.to_json(false)},
                               {lb, b.to_json(false)},
                               {"delta", rmot::eval::comparison_json(a, b)}}
                            .dump(2);
    const std::string t = rmot::eval::comparison_table(a, la, b, lb);
    emit(out_json, j);
    emit(out_table, t);
  });
}

rmot_status rmot_bench(const char * dataset_dir, const char * overrides_json, int repeat, const char * membank,
                       char ** out_json)
{
  return guarded([&] {
    require(dataset_dir, "dataset_dir");
    require(out_json, "out_json");
    if (repeat < 1) rmot::fail(rmot::ErrorCode::InvalidArgument, "repeat must be >= 1");
    emit(out_json, rmot::app::bench_dataset(dataset_dir, parse_overrides(overrides_json), repeat, opt_path(membank))
                     .dump(2));
  });
}

rmot_status rmot_pipeline_open(const char * dataset_dir, const char * overrides_json, const char * membank,
                               rmot_pipeline ** out)
{
  return guarded([&] {
    require(dataset_dir, "dataset_dir");
    require(out, "out");
    *out = nullptr;
    auto p = std::make_unique<rmot_pipeline>();
    p->dataset = rmot::sim::read_dataset(dataset_dir, true);
    auto cfg = rmot::app::RunConfig::for_dataset(p->dataset.header, p->dataset.scenario);
    cfg.apply(parse_overrides(overrides_json));
    std::optional<rmot::predict::MemoryBank> bank;
    if (auto path = opt_path(membank)) bank = rmot::predict::MemoryBank::load(*path);
    p->pipeline = std::make_unique<rmot::app::Pipeline>(cfg, std::move(bank));
    *out = p.release();
  });
}

void rmot_pipeline_close(rmot_pipeline * p) { delete p; }

rmot_status rmot_pipeline_frame_count(const rmot_pipeline * p, size_t * out)
{
  return guarded([&] {
    require(p, "pipeline");
    require(out, "out");
    *out = p->dataset.frames.size();
  });
}

rmot_status rmot_pipeline_step(rmot_pipeline * p, int * has_frame, char ** out_json)
{
  return guarded([&] {
    require(p, "pipeline");
    require(has_frame, "has_frame");
    *has_frame = 0;
    if (p->next >= p->dataset.frames.size()) return;
    const auto & o = p->pipeline->step(p->dataset.frames[p->next]);
    ++p->next;
    emit(out_json, frame_json(o).dump());
    *has_frame = 1;
  });
}

rmot_status rmot_pipeline_map_size(const rmot_pipeline * p, size_t * out)
{
  return guarded([&] {
    require(p, "pipeline");
    require(out, "out");
    *out = p->pipeline->mapper().map().size();
  });
}

rmot_status rmot_pipeline_export_map(const rmot_pipeline * p, const char * file)
{
  return guarded([&] {
    require(p, "pipeline");
    require(file, "file");
    rmot::map::export_map(p->pipeline->mapper().map(), file);
  });
}

}  // extern "C"

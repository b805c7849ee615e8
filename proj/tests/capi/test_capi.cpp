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

// Exercises the shared library through its C header only.

#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "rmot/rmot.h"

using nlohmann::json;
namespace fs = std::filesystem;

namespace
{

struct Str
{
  char * p{nullptr};
  ~Str() { rmot_string_free(p); }
  std::string s() const { return p ? p : ""; }
  json j() const { return json::parse(s()); }
};

std::string slurp(const fs::path & f)
{
  std::ifstream in(f, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path & f)
{
  std::ifstream in(f);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

fs::path scratch(const std::string & tag)
{
  const fs::path d = fs::temp_directory_path() / ("rmot_capi_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string preset(const char * name, std::uint64_t seed)
{
  Str s;
  EXPECT_EQ(rmot_preset_scenario(name, seed, &s.p), RMOT_OK) << rmot_last_error();
  return s.s();
}

class CApi : public ::testing::Test
{
protected:
  static void SetUpTestSuite()
  {
    root_ = scratch("suite");
    dataset_ = root_ / "identity";
    ASSERT_EQ(rmot_simulate(preset("identity", 3).c_str(), dataset_.c_str(), 60, nullptr), RMOT_OK) << rmot_last_error();
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }

  static fs::path root_;
  static fs::path dataset_;
};

fs::path CApi::root_;
fs::path CApi::dataset_;

}  // namespace

TEST(CApiBasics, StatusNamesAndVersion)
{
  EXPECT_STREQ(rmot_status_name(RMOT_OK), "ok");
  EXPECT_STREQ(rmot_status_name(RMOT_E_CONFIG), "config");
  EXPECT_STREQ(rmot_status_name(RMOT_E_INTERNAL), "internal");
  EXPECT_STREQ(rmot_status_name(static_cast<rmot_status>(999)), "unknown");
  EXPECT_STRNE(rmot_version(), "");
}

TEST(CApiBasics, NullArgumentsAreRejected)
{
  EXPECT_EQ(rmot_preset_names(nullptr), RMOT_E_INVALID_ARGUMENT);
  EXPECT_EQ(rmot_last_status(), RMOT_E_INVALID_ARGUMENT);
  EXPECT_NE(std::string(rmot_last_error()).find("NULL"), std::string::npos);
  EXPECT_EQ(rmot_simulate(nullptr, "x", -1, nullptr), RMOT_E_INVALID_ARGUMENT);
  EXPECT_EQ(rmot_pipeline_step(nullptr, nullptr, nullptr), RMOT_E_INVALID_ARGUMENT);
  rmot_pipeline_close(nullptr);
}

TEST(CApiBasics, SuccessClearsLastError)
{
  EXPECT_NE(rmot_preset_names(nullptr), RMOT_OK);
  Str s;
  ASSERT_EQ(rmot_preset_names(&s.p), RMOT_OK);
  EXPECT_STREQ(rmot_last_error(), "");
  EXPECT_EQ(rmot_last_status(), RMOT_OK);
  EXPECT_EQ(s.j().size(), 5u);
}

TEST(CApiBasics, LastErrorIsPerThread)
{
  ASSERT_EQ(rmot_preset_names(nullptr), RMOT_E_INVALID_ARGUMENT);
  std::string other = "unset";
  rmot_status other_status = RMOT_E_INTERNAL;
  std::thread t([&] {
    other = rmot_last_error();
    other_status = rmot_last_status();
  });
  t.join();
  EXPECT_EQ(other, "");
  EXPECT_EQ(other_status, RMOT_OK);
  EXPECT_EQ(rmot_last_status(), RMOT_E_INVALID_ARGUMENT);
}

TEST(CApiBasics, UnknownPresetIsConfigError)
{
  Str s;
  EXPECT_EQ(rmot_preset_scenario("nope", 1, &s.p), RMOT_E_CONFIG);
  EXPECT_EQ(s.p, nullptr);
}

TEST(CApiBasics, DuplicateAgentIdsFailValidation)
{
  json sc = json::parse(preset("identity", 1));
  ASSERT_GE(sc["agents"].size(), 2u);
  sc["agents"][1]["id"] = sc["agents"][0]["id"];
  const fs::path d = scratch("dup");
  Str out;
  EXPECT_EQ(rmot_scenario_normalize(sc.dump().c_str(), &out.p), RMOT_E_CONFIG);
  EXPECT_EQ(rmot_simulate(sc.dump().c_str(), (d / "ds").c_str(), 5, nullptr), RMOT_E_CONFIG);
  EXPECT_FALSE(fs::exists(d / "ds" / "frames.jsonl"));
  fs::remove_all(d);
}

TEST(CApiBasics, MalformedJsonIsConfigError)
{
  EXPECT_EQ(rmot_simulate("{not json", "/tmp/unused", 1, nullptr), RMOT_E_CONFIG);
}

TEST_F(CApi, SimulateWritesDatasetAndRepeatsExactly)
{
  for (const char * f : {"frames.jsonl", "gt.jsonl"}) EXPECT_TRUE(fs::exists(dataset_ / f)) << f;
  const fs::path again = root_ / "identity_again";
  Str sum;
  ASSERT_EQ(rmot_simulate(preset("identity", 3).c_str(), again.c_str(), 60, &sum.p), RMOT_OK);
  EXPECT_EQ(sum.j()["frames"], 60);
  std::size_t files = 0;
  for (const auto & e : fs::recursive_directory_iterator(dataset_)) {
    if (!e.is_regular_file()) continue;
    ++files;
    const fs::path rel = fs::relative(e.path(), dataset_);
    EXPECT_EQ(slurp(e.path()), slurp(again / rel)) << rel;
  }
  EXPECT_GT(files, 60u);  // clouds plus the jsonl files
}

TEST_F(CApi, RunWritesAllOutputsDeterministically)
{
  const fs::path a = root_ / "run_a", b = root_ / "run_b";
  Str sa, sb;
  ASSERT_EQ(rmot_run(dataset_.c_str(), a.c_str(), nullptr, nullptr, -1, &sa.p), RMOT_OK) << rmot_last_error();
  ASSERT_EQ(rmot_run(dataset_.c_str(), b.c_str(), "{}", "", -1, &sb.p), RMOT_OK) << rmot_last_error();
  for (const char * f : {"tracks.jsonl", "predictions.jsonl", "map.xyz", "mapping_report.json", "timing.json"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
  }
  for (const char * f : {"tracks.jsonl", "predictions.jsonl", "map.xyz", "mapping_report.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_EQ(sa.j()["frames"], 60);
  EXPECT_EQ(sa.j()["track_records"], lines(a / "tracks.jsonl").size());
}

TEST_F(CApi, RunRejectsBadOverridesAndMissingDataset)
{
  const fs::path out = root_ / "bad";
  EXPECT_EQ(rmot_run(dataset_.c_str(), out.c_str(), R"({"gate":{"nope":1}})", nullptr, -1, nullptr), RMOT_E_CONFIG);
  EXPECT_NE(std::string(rmot_last_error()).find("nope"), std::string::npos);
  EXPECT_EQ(rmot_run(dataset_.c_str(), out.c_str(), R"({"gate":{"a":"x"}})", nullptr, -1, nullptr), RMOT_E_CONFIG);
  EXPECT_EQ(rmot_run(dataset_.c_str(), out.c_str(), R"({"baselines":["warp"]})", nullptr, -1, nullptr),
            RMOT_E_CONFIG);
  EXPECT_EQ(rmot_run(dataset_.c_str(), out.c_str(), "[1]", nullptr, -1, nullptr), RMOT_E_CONFIG);
  EXPECT_EQ(rmot_run((root_ / "missing").c_str(), out.c_str(), nullptr, nullptr, -1, nullptr), RMOT_E_IO);
  EXPECT_EQ(rmot_run(dataset_.c_str(), out.c_str(), nullptr, (root_ / "missing.dat").c_str(), -1, nullptr),
            RMOT_E_IO);
}

TEST_F(CApi, PipelineSteppingMatchesBatchRun)
{
  const fs::path batch = root_ / "batch";
  ASSERT_EQ(rmot_run(dataset_.c_str(), batch.c_str(), nullptr, nullptr, -1, nullptr), RMOT_OK);
  rmot_pipeline * p = nullptr;
  ASSERT_EQ(rmot_pipeline_open(dataset_.c_str(), nullptr, nullptr, &p), RMOT_OK) << rmot_last_error();
  size_t n = 0;
  ASSERT_EQ(rmot_pipeline_frame_count(p, &n), RMOT_OK);
  EXPECT_EQ(n, 60u);
  std::vector<std::string> streamed;
  size_t steps = 0;
  for (int has = 1;;) {
    Str f;
    ASSERT_EQ(rmot_pipeline_step(p, &has, &f.p), RMOT_OK);
    if (!has) break;
    ++steps;
    const json j = f.j();
    EXPECT_TRUE(j.contains("timing"));
    for (const auto & r : j["tracks"]) streamed.push_back(r.dump());
  }
  EXPECT_EQ(steps, n);
  EXPECT_EQ(streamed, lines(batch / "tracks.jsonl"));
  size_t map_size = 0;
  ASSERT_EQ(rmot_pipeline_map_size(p, &map_size), RMOT_OK);
  EXPECT_GT(map_size, 0u);
  const fs::path xyz = root_ / "stepped.xyz";
  ASSERT_EQ(rmot_pipeline_export_map(p, xyz.c_str()), RMOT_OK);
  EXPECT_EQ(slurp(xyz), slurp(batch / "map.xyz"));
  rmot_pipeline_close(p);
}

TEST_F(CApi, SeedMemoryHonoursCapacityAndWarnsWhenEmpty)
{
  const std::string ds = dataset_.string();
  const char * dirs[] = {ds.c_str()};
  const fs::path bank = root_ / "bank.dat";
  Str s;
  ASSERT_EQ(rmot_seed_memory(dirs, 1, bank.c_str(), nullptr, 1, 10, &s.p), RMOT_OK) << rmot_last_error();
  EXPECT_EQ(s.j()["bank_size"], 10);
  EXPECT_GT(s.j()["written"].get<int>(), 10);
  EXPECT_TRUE(fs::exists(bank));

  Str e;
  const fs::path empty_bank = root_ / "empty.dat";
  ASSERT_EQ(rmot_seed_memory(nullptr, 0, empty_bank.c_str(), nullptr, 1, 0, &e.p), RMOT_OK);
  EXPECT_EQ(e.j()["bank_size"], 0);
  EXPECT_FALSE(e.j()["warnings"].empty());

  // A seeded bank is accepted by a run.
  ASSERT_EQ(rmot_run(dataset_.c_str(), (root_ / "with_bank").c_str(), nullptr, bank.c_str(), 20, nullptr), RMOT_OK)
    << rmot_last_error();
  EXPECT_EQ(rmot_seed_memory(dirs, 1, bank.c_str(), nullptr, 0, 0, nullptr), RMOT_E_INVALID_ARGUMENT);
}

TEST_F(CApi, EvalIdentityAndComparison)
{
  const fs::path a = root_ / "eval_a", b = root_ / "eval_b";
  ASSERT_EQ(rmot_run(dataset_.c_str(), a.c_str(), nullptr, nullptr, -1, nullptr), RMOT_OK);
  ASSERT_EQ(rmot_run(dataset_.c_str(), b.c_str(), R"({"baselines":["single-frame-removal"]})", nullptr, -1, nullptr),
            RMOT_OK);
  Str report, table;
  ASSERT_EQ(rmot_eval(a.c_str(), dataset_.c_str(), "adaptive", &report.p, &table.p), RMOT_OK) << rmot_last_error();
  const json r = report.j();
  EXPECT_DOUBLE_EQ(r["tracking"]["mota"].get<double>(), 1.0);
  EXPECT_EQ(r["tracking"]["idsw"], 0);
  EXPECT_NE(table.s().find("adaptive"), std::string::npos);

  Str cmp, cmp_table;
  ASSERT_EQ(rmot_eval_compare(a.c_str(), b.c_str(), dataset_.c_str(), "tracked", "single", &cmp.p, &cmp_table.p),
            RMOT_OK);
  const json c = cmp.j();
  EXPECT_TRUE(c.contains("tracked"));
  EXPECT_TRUE(c.contains("single"));
  EXPECT_DOUBLE_EQ(c["delta"]["MOTA"]["delta"].get<double>(), 0.0);
  EXPECT_NE(cmp_table.s().find("delta"), std::string::npos);
}

TEST_F(CApi, EvalWithoutGroundTruthFails)
{
  const fs::path run = root_ / "nogt_run", ds = root_ / "nogt_ds";
  ASSERT_EQ(rmot_simulate(preset("identity", 4).c_str(), ds.c_str(), 10, nullptr), RMOT_OK);
  ASSERT_EQ(rmot_run(ds.c_str(), run.c_str(), nullptr, nullptr, -1, nullptr), RMOT_OK);
  fs::remove(ds / "gt.jsonl");
  Str report;
  EXPECT_NE(rmot_eval(run.c_str(), ds.c_str(), nullptr, &report.p, nullptr), RMOT_OK);
  EXPECT_EQ(report.p, nullptr);
  EXPECT_STRNE(rmot_last_error(), "");
}

TEST_F(CApi, BenchReportsPercentiles)
{
  Str out;
  ASSERT_EQ(rmot_bench(dataset_.c_str(), nullptr, 2, nullptr, &out.p), RMOT_OK) << rmot_last_error();
  const json j = out.j();
  ASSERT_TRUE(j.contains("total_ms")) << j.dump();
  EXPECT_EQ(rmot_bench(dataset_.c_str(), nullptr, 0, nullptr, &out.p), RMOT_E_INVALID_ARGUMENT);
}

TEST_F(CApi, DisabledMapperWritesNoMapOutputs)
{
  const fs::path run = root_ / "nomap";
  ASSERT_EQ(rmot_run(dataset_.c_str(), run.c_str(), R"({"mapper":{"enabled":false}})", nullptr, -1, nullptr), RMOT_OK);
  EXPECT_FALSE(fs::exists(run / "map.xyz"));
  EXPECT_FALSE(fs::exists(run / "mapping_report.json"));
  Str report;
  ASSERT_EQ(rmot_eval(run.c_str(), dataset_.c_str(), nullptr, &report.p, nullptr), RMOT_OK) << rmot_last_error();
  EXPECT_TRUE(report.j()["map"].empty());
}

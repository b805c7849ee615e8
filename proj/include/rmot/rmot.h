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

#ifndef RMOT__RMOT_H_
#define RMOT__RMOT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RMOT_BUILDING_LIBRARY)
#    define RMOT_API __declspec(dllexport)
#  else
#    define RMOT_API __declspec(dllimport)
#  endif
#else
#  define RMOT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every function returns one of these; on failure the message
 * is available from rmot_last_error() on the calling thread. */
typedef enum rmot_status
{
  RMOT_OK = 0,
  RMOT_E_INVALID_ARGUMENT = 1,
  RMOT_E_CONFIG = 2,
  RMOT_E_IO = 3,
  RMOT_E_FORMAT = 4,
  RMOT_E_NUMERIC = 5,
  RMOT_E_OUT_OF_ORDER = 6,
  RMOT_E_BEHIND_CAMERA = 7,
  RMOT_E_OUT_OF_EXTENT = 8,
  RMOT_E_DEGENERATE_HEADING = 9,
  RMOT_E_ZERO_VECTOR = 10,
  RMOT_E_EMPTY_BANK = 11,
  RMOT_E_INSUFFICIENT_NEIGHBORS = 12,
  RMOT_E_ZERO_RANGE = 13,
  RMOT_E_EMPTY_INPUT = 14,
  RMOT_E_NO_MATCHES = 15,
  RMOT_E_BOTH_ZERO = 16,
  RMOT_E_INTERNAL = 17
} rmot_status;

typedef struct rmot_pipeline rmot_pipeline;

RMOT_API const char * rmot_version(void);
/* Stable lowercase name such as "config" or "io". */
RMOT_API const char * rmot_status_name(rmot_status status);
/* Message of the last failure on this thread; "" after a success. */
RMOT_API const char * rmot_last_error(void);
RMOT_API rmot_status rmot_last_status(void);

/* Strings returned through char ** outputs are owned by the caller. */
RMOT_API void rmot_string_free(char * s);

/* JSON array of preset names. */
RMOT_API rmot_status rmot_preset_names(char ** out_json);
/* Scenario document for a named preset. */
RMOT_API rmot_status rmot_preset_scenario(const char * name, uint64_t seed, char ** out_json);
/* Parses and validates a scenario document; writes the normalized form. */
RMOT_API rmot_status rmot_scenario_normalize(const char * scenario_json, char ** out_json);

/* Simulates a scenario and writes the dataset directory. max_frames < 0 runs
 * the full duration. out_summary may be NULL. */
RMOT_API rmot_status rmot_simulate(const char * scenario_json, const char * out_dir, long max_frames,
                                   char ** out_summary);

/* Runs track, predict and map over a dataset and writes tracks.jsonl,
 * predictions.jsonl, map.xyz, mapping_report.json, timing.json and
 * run_config.json. overrides_json and membank may be NULL. */
RMOT_API rmot_status rmot_run(const char * dataset_dir, const char * out_dir, const char * overrides_json,
                              const char * membank, long max_frames, char ** out_summary);

/* Replays the tracker over training datasets and writes every valid window
 * into a new bank file. capacity 0 keeps the configured capacity. */
RMOT_API rmot_status rmot_seed_memory(const char * const * dataset_dirs, size_t count, const char * membank_out,
                                      const char * overrides_json, int stride, size_t capacity,
                                      char ** out_summary);

/* Scores one run. Both outputs may be NULL. */
RMOT_API rmot_status rmot_eval(const char * run_dir, const char * dataset_dir, const char * label,
                               char ** out_report_json, char ** out_table);
/* Scores two runs on the same dataset; the JSON holds both reports and deltas. */
RMOT_API rmot_status rmot_eval_compare(const char * run_a, const char * run_b, const char * dataset_dir,
                                       const char * label_a, const char * label_b, char ** out_json,
                                       char ** out_table);

/* Replays a dataset `repeat` times; writes per-stage latency percentiles. */
RMOT_API rmot_status rmot_bench(const char * dataset_dir, const char * overrides_json, int repeat,
                                const char * membank, char ** out_json);

/* Frame-by-frame pipeline over a dataset directory. */
RMOT_API rmot_status rmot_pipeline_open(const char * dataset_dir, const char * overrides_json,
                                        const char * membank, rmot_pipeline ** out);
RMOT_API void rmot_pipeline_close(rmot_pipeline * p);
RMOT_API rmot_status rmot_pipeline_frame_count(const rmot_pipeline * p, size_t * out);
/* Processes the next frame. *has_frame is 0 once the dataset is exhausted;
 * otherwise out_json (may be NULL) receives the frame output. */
RMOT_API rmot_status rmot_pipeline_step(rmot_pipeline * p, int * has_frame, char ** out_json);
/* Number of points in the current static map. */
RMOT_API rmot_status rmot_pipeline_map_size(const rmot_pipeline * p, size_t * out);
RMOT_API rmot_status rmot_pipeline_export_map(const rmot_pipeline * p, const char * file);

#ifdef __cplusplus
}
#endif

#endif /* RMOT__RMOT_H_ */

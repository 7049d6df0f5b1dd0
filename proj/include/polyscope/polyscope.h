// Copyright 2026 The PolyScope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the PolyScope triage engine. All handles are opaque; every
 * fallible call returns a ps_status and leaves a message for ps_last_error()
 * on the calling thread. Strings returned through char** are owned by the
 * caller and released with ps_string_free(). */

#ifndef POLYSCOPE_POLYSCOPE_H
#define POLYSCOPE_POLYSCOPE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(POLYSCOPE_BUILDING_LIBRARY)
#define PS_API __declspec(dllexport)
#else
#define PS_API __declspec(dllimport)
#endif
#else
#define PS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ps_snapshot ps_snapshot;
typedef struct ps_result ps_result;
typedef struct ps_report ps_report;

typedef enum ps_status {
  PS_OK = 0,
  PS_ERR_IO = 1,
  PS_ERR_SYNTAX = 2,
  PS_ERR_SCHEMA = 3,
  PS_ERR_VALUE = 4,
  PS_ERR_INVALID_SNAPSHOT = 5,
  PS_ERR_NOT_APPLICABLE = 6,
  PS_ERR_SIZE_GUARD = 7,
  PS_ERR_SINK_ABORTED = 8,
  PS_ERR_ARGUMENT = 9,
  PS_ERR_INTERNAL = 10
} ps_status;

typedef enum ps_format {
  PS_FORMAT_JSON = 0,
  PS_FORMAT_CSV = 1,
  PS_FORMAT_TABLE = 2
} ps_format;

typedef enum ps_record_category {
  PS_RECORD_IV = 0,
  PS_RECORD_OP = 1,
  PS_RECORD_SQUAT_PREVENTED = 2
} ps_record_category;

/* Message for the last failed call on this thread; empty after success. */
PS_API const char* ps_last_error(void);
PS_API const char* ps_status_name(ps_status status);
PS_API const char* ps_version(void);
PS_API void ps_string_free(char* s);

/* Snapshots */
PS_API ps_status ps_snapshot_load(const char* path, ps_snapshot** out);
PS_API ps_status ps_snapshot_parse(const char* json, size_t len,
                                   ps_snapshot** out);
PS_API void ps_snapshot_free(ps_snapshot* s);
PS_API ps_status ps_snapshot_to_json(const ps_snapshot* s, char** out);
PS_API int ps_snapshot_equal(const ps_snapshot* a, const ps_snapshot* b);
/* One finding per line ("SEVERITY CODE location: message"). */
PS_API ps_status ps_snapshot_validate(const ps_snapshot* s, char** findings,
                                      size_t* error_count,
                                      size_t* warning_count);
PS_API size_t ps_snapshot_legacy_package_count(const ps_snapshot* s);
PS_API size_t ps_snapshot_legacy_root_count(const ps_snapshot* s);

/* Analysis */
typedef struct ps_engine_config {
  size_t worker_count;
  int adversary_expansion;
  int victim_expansion;
  int prescoped_assume_rex_wex;
  int external_only;
  int static_schedule;
} ps_engine_config;

/* One worker, both expansions on, everything analyzed. */
PS_API void ps_engine_config_init(ps_engine_config* cfg);

PS_API ps_status ps_analyze(const ps_snapshot* s, const ps_engine_config* cfg,
                            ps_result** out);
/* Naive reference pipeline; refuses large snapshots unless the guard is off. */
PS_API ps_status ps_oracle_analyze(const ps_snapshot* s,
                                   const ps_engine_config* cfg,
                                   int enforce_size_guard, ps_result** out);
PS_API void ps_result_free(ps_result* r);
/* Compares IVs, attack operations and prevented squats. */
PS_API int ps_result_equal(const ps_result* a, const ps_result* b);
PS_API ps_status ps_result_to_json(const ps_result* r, int include_timing,
                                   char** out);

typedef struct ps_counts {
  size_t ivs;
  size_t ops;
  size_t squat_prevented;
  size_t subjects;
  size_t objects;
} ps_counts;

PS_API void ps_result_counts(const ps_result* r, ps_counts* out);

typedef struct ps_record {
  ps_record_category category;
  const char* kind;
  uint32_t object;
  uint32_t victim;
  uint32_t adversary;
} ps_record;

/* Return nonzero to keep going, zero to stop the analysis. */
typedef int (*ps_record_sink)(const ps_record* record, void* user);

/* Records reach the sink as objects complete, never accumulated. Returns
 * PS_ERR_SINK_ABORTED when the sink stopped the run; counts cover what was
 * delivered. */
PS_API ps_status ps_analyze_streaming(const ps_snapshot* s,
                                      const ps_engine_config* cfg,
                                      ps_record_sink sink, void* user,
                                      ps_counts* delivered);

/* Reports */
PS_API ps_status ps_report_build(const ps_result* r, const ps_snapshot* s,
                                 int include_timing, ps_report** out);
PS_API ps_status ps_report_attach_what_if(ps_report* report,
                                          const ps_result* before,
                                          const ps_result* after);
PS_API ps_status ps_report_render(const ps_report* report, ps_format format,
                                  char** out);
PS_API ps_status ps_report_parse(const char* json, size_t len, ps_report** out);
PS_API int ps_report_equal(const ps_report* a, const ps_report* b);
PS_API void ps_report_free(ps_report* report);

PS_API ps_status ps_what_if_full_scoped(const ps_snapshot* s,
                                        ps_snapshot** out);

/* "1,021 (48%)" */
PS_API ps_status ps_format_share(uint64_t part, uint64_t whole, char** out);

/* Synthetic snapshots */
typedef struct ps_gen_params {
  uint64_t seed;
  size_t subject_count;
  size_t object_count;
  double legacy_fraction;
  double external_fraction;
  int scoped_storage_enabled;
  double skew;
} ps_gen_params;

PS_API void ps_gen_params_init(ps_gen_params* p);
PS_API ps_status ps_generate(const ps_gen_params* p, ps_snapshot** out);

#ifdef __cplusplus
}
#endif

#endif /* POLYSCOPE_POLYSCOPE_H */

/* Copyright 2026 The tsrank Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the two-speed reranking engine.
 *
 * Conventions:
 *  - Every fallible call returns a tsrank_status. On failure the calling
 *    thread's last-error slot holds a message and a machine-readable kind
 *    (tsrank_last_error / tsrank_last_error_kind).
 *  - Handles are opaque and released by their matching *_destroy call.
 *  - Strings returned through `char**` are heap-allocated; release them with
 *    tsrank_string_free. Strings returned as `const char*` from a handle live
 *    as long as the handle.
 *  - An engine may be shared by concurrent callers of tsrank_engine_rank.
 */

#ifndef TSRANK_TSRANK_H_
#define TSRANK_TSRANK_H_

#include <stddef.h>

#if defined(_WIN32)
#define TSRANK_API __declspec(dllexport)
#else
#define TSRANK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as CLI exit codes. */
typedef enum tsrank_status {
  TSRANK_OK = 0,
  TSRANK_ERR_USAGE = 1,    /* bad argument or configuration */
  TSRANK_ERR_DATA = 2,     /* unreadable or invalid input */
  TSRANK_ERR_BACKEND = 3,  /* backend unavailable or protocol violation */
  TSRANK_ERR_INTERNAL = 4
} tsrank_status;

typedef struct tsrank_engine tsrank_engine;
typedef struct tsrank_artifacts tsrank_artifacts;

TSRANK_API const char* tsrank_version(void);

/* Message and kind of the calling thread's most recent failure; "" if none. */
TSRANK_API const char* tsrank_last_error(void);
TSRANK_API const char* tsrank_last_error_kind(void);

TSRANK_API void tsrank_string_free(char* s);

/* ---- engine ------------------------------------------------------------ */

/* `config_json` may be NULL or "" for defaults; keys overlay the defaults. */
TSRANK_API tsrank_status tsrank_engine_create(const char* config_json, tsrank_engine** out);
TSRANK_API void tsrank_engine_destroy(tsrank_engine* engine);

/* Effective configuration as JSON. */
TSRANK_API tsrank_status tsrank_engine_config(const tsrank_engine* engine, char** out_json);

/* Startup reachability check against the configured backend. */
TSRANK_API tsrank_status tsrank_engine_probe(const tsrank_engine* engine);

/* Ranks one CandidateList JSON object; writes the RankOutcome JSON. */
TSRANK_API tsrank_status tsrank_engine_rank(const tsrank_engine* engine, const char* list_json,
                                            char** out_json);

/* Evaluates a JSONL dataset at the configured threshold. Artifacts:
 *   report.json, outcomes.jsonl, table.txt */
TSRANK_API tsrank_status tsrank_engine_evaluate(const tsrank_engine* engine,
                                                const char* dataset_path,
                                                tsrank_artifacts** out);

/* Evaluates each threshold over one scoring pass. Artifacts:
 *   sweep.json, sweep.txt */
TSRANK_API tsrank_status tsrank_engine_sweep(const tsrank_engine* engine,
                                             const char* dataset_path,
                                             const double* thresholds, size_t count,
                                             tsrank_artifacts** out);

/* Parses and validates a JSONL dataset without ranking. Artifact:
 *   validation.json */
TSRANK_API tsrank_status tsrank_validate_dataset(const char* dataset_path,
                                                 tsrank_artifacts** out);

/* ---- curriculum -------------------------------------------------------- */

/* `options_json` (may be NULL) overrides bucket configs, baselines,
 * thresholds and the trend statistic. Exactly one of `shares_path` and
 * `trace_path` must be non-NULL; `q_values_path` is optional with a trace.
 * Artifacts: accounting.json, accounting.txt */
TSRANK_API tsrank_status tsrank_simulate_curriculum(const char* shares_path,
                                                    const char* trace_path,
                                                    const char* q_values_path,
                                                    const char* options_json,
                                                    tsrank_artifacts** out);

/* ---- artifacts --------------------------------------------------------- */

TSRANK_API size_t tsrank_artifacts_count(const tsrank_artifacts* artifacts);
TSRANK_API const char* tsrank_artifacts_name(const tsrank_artifacts* artifacts, size_t i);
TSRANK_API const char* tsrank_artifacts_text(const tsrank_artifacts* artifacts, size_t i);
TSRANK_API size_t tsrank_artifacts_size(const tsrank_artifacts* artifacts, size_t i);
/* NULL when absent. */
TSRANK_API const char* tsrank_artifacts_get(const tsrank_artifacts* artifacts, const char* name);
TSRANK_API void tsrank_artifacts_destroy(tsrank_artifacts* artifacts);

/* ---- pure math --------------------------------------------------------- */

TSRANK_API tsrank_status tsrank_fast_score(double z, double* out_s, double* out_q);
TSRANK_API tsrank_status tsrank_normalized_entropy_of_log_odds(const double* z, size_t m,
                                                               double* out_u);
TSRANK_API double tsrank_expected_slow_overhead(double gate_fraction, double slow_ms);
/* NaN when m or batch is 0. */
TSRANK_API double tsrank_fast_query_time(double per_candidate_ms, size_t m, size_t batch);
TSRANK_API double tsrank_two_speed_query_time(double fast_query_ms, double gate_fraction,
                                              double slow_ms);

#ifdef __cplusplus
}
#endif

#endif /* TSRANK_TSRANK_H_ */

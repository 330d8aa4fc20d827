// Copyright 2026 The batchpref Authors
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

/* C interface to the batchpref engine. Objects are opaque handles; every
 * fallible call returns a bp_status and leaves a message for
 * bp_last_error(). Strings returned through char** are owned by the caller
 * and released with bp_string_free. */
#ifndef BATCHPREF_BATCHPREF_H_
#define BATCHPREF_BATCHPREF_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(BATCHPREF_BUILDING_LIBRARY)
#define BP_API __attribute__((visibility("default")))
#else
#define BP_API
#endif

typedef enum bp_status {
  BP_OK = 0,
  BP_ERR_INVALID_INPUT = 1,
  BP_ERR_CONFIGURATION = 2,
  BP_ERR_STATE = 3,
  BP_ERR_NUMERICAL = 4,
  BP_ERR_NOT_FOUND = 5,
  BP_ERR_IO = 6,
  BP_ERR_DEGENERATE_KERNEL = 7,
  BP_ERR_INSUFFICIENT_DATA = 8,
  BP_ERR_CONFLICT = 9,
  BP_ERR_INTERNAL = 100
} bp_status;

typedef struct bp_dataset bp_dataset;
typedef struct bp_service bp_service;

BP_API const char* bp_version(void);
/* Message of the last failed call on this thread; empty after a success. */
BP_API const char* bp_last_error(void);
/* Stable snake_case name, e.g. "not_found". */
BP_API const char* bp_status_name(bp_status status);
BP_API void bp_string_free(char* s);

/* JSON array of {id, description, feature_dim, horizon, dim_x, dim_u}. */
BP_API bp_status bp_envs_json(char** out_json);

BP_API bp_status bp_dataset_generate(const char* env_id, size_t count, uint64_t seed, int standardize,
                                     bp_dataset** out);
BP_API bp_status bp_dataset_load(const char* path, bp_dataset** out);
/* Fails with BP_ERR_IO if path exists and overwrite is 0. */
BP_API bp_status bp_dataset_save(const bp_dataset* dataset, const char* path, int overwrite);
/* {env, K, d, T, dim_x, dim_u, seed, standardized}. */
BP_API bp_status bp_dataset_info(const bp_dataset* dataset, char** out_json);
/* Copies psi of query index into out (capacity >= d). */
BP_API bp_status bp_dataset_psi(const bp_dataset* dataset, size_t index, double* out, size_t capacity);
BP_API void bp_dataset_free(bp_dataset* dataset);

/* Runs a benchmark described by a JSON config (see docs/benchmark-config.md)
 * and returns the summary JSON. */
BP_API bp_status bp_benchmark_run(const char* config_json, char** out_summary_json);

/* Options JSON: {host, port, data_dir, default_env, dataset_size,
 * dataset_seed, static_dir}; all optional. Restores persisted sessions. */
BP_API bp_status bp_service_create(const char* options_json, bp_service** out);
/* Binds and serves on a background thread; BP_ERR_IO if the port is taken. */
BP_API bp_status bp_service_start(bp_service* service);
BP_API bp_status bp_service_stop(bp_service* service);
/* Bound port after start, else 0. */
BP_API int bp_service_port(const bp_service* service);
/* Dispatches one request without the network layer. */
BP_API bp_status bp_service_handle(bp_service* service, const char* method, const char* path, const char* body,
                                   int* out_http_status, char** out_body);
BP_API void bp_service_free(bp_service* service);

/* Mutual information (bits) of each of the n rows of psis (n x d, row-major)
 * under m posterior samples (m x d, row-major). */
BP_API bp_status bp_mutual_information(const double* psis, size_t n, size_t d, const double* samples, size_t m,
                                       double* out_scores);
BP_API bp_status bp_alignment(const double* a, const double* b, size_t d, double* out);
BP_API bp_status bp_wilcoxon(const double* a, const double* b, size_t n, double* out_p);

#ifdef __cplusplus
}
#endif

#endif /* BATCHPREF_BATCHPREF_H_ */

// Copyright 2026 The flowalert Authors
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

/* C interface to the flowalert engine. Every handle is opaque; every call
 * that can fail returns an fa_status and leaves the message in
 * fa_last_error() for the calling thread. */

#ifndef FLOWALERT_FLOWALERT_H_
#define FLOWALERT_FLOWALERT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FA_API __declspec(dllexport)
#elif defined(__GNUC__)
#define FA_API __attribute__((visibility("default")))
#else
#define FA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fa_status {
  FA_OK = 0,
  FA_ERR_INVALID_ARGUMENT = 1,
  FA_ERR_IO = 2,
  FA_ERR_PARSE = 3,
  FA_ERR_DIMENSION = 4,
  FA_ERR_STATE = 5,
  FA_ERR_NUMERIC = 6,
  FA_ERR_CONFIG = 7,
  FA_ERR_INTERNAL = 99
} fa_status;

FA_API const char* fa_version(void);
/* Message of the last failed call on this thread; "" after a success. */
FA_API const char* fa_last_error(void);
FA_API const char* fa_status_name(fa_status status);

/* ---- change-point detector ------------------------------------------- */

typedef struct fa_detector fa_detector;

typedef struct fa_detector_config {
  size_t max_run_length; /* L */
  double hazard;         /* H */
  double variance_floor;
  size_t warmup; /* W0 */
  size_t dim;
  const double* prior_mean; /* NULL: 0.5 per dimension */
  const double* prior_var;  /* NULL: 1/12 per dimension */
} fa_detector_config;

/* L = 500, H = 1e-3, floor 1e-4, W0 = 30, default priors. */
FA_API void fa_detector_config_default(fa_detector_config* cfg, size_t dim);
FA_API fa_status fa_detector_create(const fa_detector_config* cfg, fa_detector** out);
FA_API void fa_detector_destroy(fa_detector* det);
FA_API fa_status fa_detector_update(fa_detector* det, const double* x, size_t dim, double* score);
FA_API fa_status fa_detector_anomaly_mass(const fa_detector* det, size_t k, double* mass);
FA_API int fa_detector_in_warmup(const fa_detector* det);
FA_API uint64_t fa_detector_flows(const fa_detector* det);

/* ---- calibration ------------------------------------------------------- */

typedef struct fa_calibrator fa_calibrator;

typedef enum fa_calibrator_kind {
  FA_CALIBRATOR_IDENTITY = 0,
  FA_CALIBRATOR_ISOTONIC = 1,
  FA_CALIBRATOR_PLATT = 2
} fa_calibrator_kind;

/* Identity ignores the data and accepts n == 0. */
FA_API fa_status fa_calibrator_fit(fa_calibrator_kind kind, const double* scores, const int* labels, size_t n,
                                   fa_calibrator** out);
FA_API fa_status fa_calibrator_from_json(const char* json, fa_calibrator** out);
FA_API void fa_calibrator_destroy(fa_calibrator* cal);
FA_API fa_status fa_calibrator_apply(const fa_calibrator* cal, double score, double* prob);
/* Caller frees with fa_string_free. */
FA_API fa_status fa_calibrator_to_json(const fa_calibrator* cal, char** json);

/* ---- thresholds -------------------------------------------------------- */

FA_API fa_status fa_elkan_threshold(double cost_fp, double cost_fn, double* tau);
FA_API double fa_overshoot_bound(size_t n0);

typedef struct fa_crc_result {
  int feasible;
  double tau;
  size_t n0;
  size_t negatives_at_or_above;
  int density_collapse;
  double overshoot_bound;
} fa_crc_result;

FA_API fa_status fa_crc_threshold(const double* negative_scores, size_t n0, double alpha, fa_crc_result* out);

/* ---- burn-rate alerting ------------------------------------------------ */

typedef struct fa_burnrate fa_burnrate;

typedef enum fa_level { FA_LEVEL_NONE = 0, FA_LEVEL_TICKET = 1, FA_LEVEL_PAGE_SLOW = 2, FA_LEVEL_PAGE_FAST = 3 } fa_level;

FA_API fa_status fa_burn_rate(double events, double window_minutes, double budget_events, double period_minutes,
                              double* rate);
/* Uses the default page-fast / page-slow / ticket levels. */
FA_API fa_status fa_burnrate_create(double budget_events, double period_minutes, fa_burnrate** out);
FA_API void fa_burnrate_destroy(fa_burnrate* br);
FA_API fa_status fa_burnrate_record(fa_burnrate* br, double timestamp_minutes, int event, fa_level* level);
FA_API fa_status fa_burnrate_window_count(const fa_burnrate* br, double window_minutes, size_t* count);

/* ---- metrics ------------------------------------------------------------ */

FA_API fa_status fa_auc_pr(const double* scores, const int* labels, size_t n, double* out);
FA_API fa_status fa_auc_roc(const double* scores, const int* labels, size_t n, double* out);
FA_API fa_status fa_brier(const double* probs, const int* labels, size_t n, double* out);
FA_API fa_status fa_ece(const double* probs, const int* labels, size_t n, size_t bins, double* out);

/* ---- commands ------------------------------------------------------------ */

typedef struct fa_command_result fa_command_result;

/* command: "simulate", "run", "ablate" or "evaluate"; config: flat JSON
 * object. On FA_OK *out holds the result, which the caller destroys. */
FA_API fa_status fa_command(const char* command, const char* config_json, fa_command_result** out);
FA_API void fa_command_result_destroy(fa_command_result* res);
FA_API int fa_command_crc_infeasible(const fa_command_result* res);
FA_API size_t fa_command_output_count(const fa_command_result* res);
FA_API const char* fa_command_output(const fa_command_result* res, size_t i);
FA_API size_t fa_command_input_count(const fa_command_result* res);
FA_API const char* fa_command_input(const fa_command_result* res, size_t i);
FA_API const char* fa_command_summary(const fa_command_result* res);

FA_API void fa_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* FLOWALERT_FLOWALERT_H_ */

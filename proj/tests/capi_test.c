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

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "flowalert/flowalert.h"

static int failures = 0;

#define EXPECT(cond)                                          \
  do {                                                        \
    if (!(cond)) {                                            \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                             \
    }                                                         \
  } while (0)

static void detector(void) {
  fa_detector_config cfg;
  fa_detector_config_default(&cfg, 1);
  EXPECT(cfg.max_run_length == 500 && cfg.warmup == 30 && cfg.dim == 1);
  fa_detector* det = NULL;
  EXPECT(fa_detector_create(&cfg, &det) == FA_OK);
  double s = -1.0;
  double x = 0.5;
  EXPECT(fa_detector_update(det, &x, 1, &s) == FA_OK);
  EXPECT(s > 0.0 && s <= 1.0);
  EXPECT(fa_detector_in_warmup(det) == 1);
  double two[2] = {0.1, 0.2};
  EXPECT(fa_detector_update(det, two, 2, &s) == FA_ERR_DIMENSION);
  EXPECT(strlen(fa_last_error()) > 0);
  x = NAN;
  EXPECT(fa_detector_update(det, &x, 1, &s) == FA_ERR_NUMERIC);
  for (int i = 0; i < 40; ++i) {
    x = 0.5;
    EXPECT(fa_detector_update(det, &x, 1, &s) == FA_OK);
  }
  EXPECT(fa_detector_flows(det) == 41);
  EXPECT(fa_detector_in_warmup(det) == 0);
  double mass = 0.0;
  EXPECT(fa_detector_anomaly_mass(det, 5, &mass) == FA_OK);
  EXPECT(mass > 0.0 && mass < 0.01);
  fa_detector_destroy(det);

  cfg.hazard = 2.0;
  det = NULL;
  EXPECT(fa_detector_create(&cfg, &det) == FA_ERR_INVALID_ARGUMENT);
  EXPECT(det == NULL);
  EXPECT(fa_detector_create(NULL, &det) == FA_ERR_INVALID_ARGUMENT);
}

static void calibrator(void) {
  const double scores[6] = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  const int labels[6] = {0, 1, 0, 1, 1, 1};
  fa_calibrator* cal = NULL;
  EXPECT(fa_calibrator_fit(FA_CALIBRATOR_ISOTONIC, scores, labels, 6, &cal) == FA_OK);
  double p = 0.0;
  EXPECT(fa_calibrator_apply(cal, 0.25, &p) == FA_OK);
  EXPECT(fabs(p - 0.5) < 1e-12);
  EXPECT(fa_calibrator_apply(cal, 0.15, &p) == FA_OK);
  EXPECT(p == 0.0);
  EXPECT(fa_calibrator_apply(cal, 0.6, &p) == FA_OK);
  EXPECT(p == 1.0);
  char* json = NULL;
  EXPECT(fa_calibrator_to_json(cal, &json) == FA_OK);
  fa_calibrator* back = NULL;
  EXPECT(fa_calibrator_from_json(json, &back) == FA_OK);
  double q = 0.0;
  EXPECT(fa_calibrator_apply(back, 0.35, &q) == FA_OK);
  EXPECT(fa_calibrator_apply(cal, 0.35, &p) == FA_OK);
  EXPECT(p == q);
  fa_string_free(json);
  fa_calibrator_destroy(back);
  fa_calibrator_destroy(cal);
  EXPECT(fa_calibrator_from_json("{", &back) == FA_ERR_PARSE);
  const int one_class[3] = {0, 0, 0};
  EXPECT(fa_calibrator_fit(FA_CALIBRATOR_PLATT, scores, one_class, 3, &cal) == FA_ERR_INVALID_ARGUMENT);
}

static void thresholds(void) {
  double tau = 0.0;
  EXPECT(fa_elkan_threshold(1.0, 10.0, &tau) == FA_OK);
  EXPECT(fabs(tau - 1.0 / 11.0) < 1e-15);
  EXPECT(fa_elkan_threshold(0.0, 10.0, &tau) == FA_ERR_INVALID_ARGUMENT);
  EXPECT(fabs(fa_overshoot_bound(12404) - 1.61e-4) < 1e-6);

  double neg[100];
  for (int i = 0; i < 100; ++i) neg[i] = (i + 1) / 100.0;
  fa_crc_result r;
  EXPECT(fa_crc_threshold(neg, 100, 0.05, &r) == FA_OK);
  EXPECT(r.feasible == 1 && r.n0 == 100);
  EXPECT(r.negatives_at_or_above <= 4);
  EXPECT(fa_crc_threshold(neg, 10, 0.05, &r) == FA_OK);
  EXPECT(r.feasible == 0);
  EXPECT(fa_crc_threshold(neg, 0, 0.05, &r) == FA_ERR_INVALID_ARGUMENT);
}

static void burn(void) {
  double b = 0.0;
  EXPECT(fa_burn_rate(10.0, 60.0, 1000.0, 60.0, &b) == FA_OK);
  EXPECT(fabs(b - 0.01) < 1e-12);
  EXPECT(fa_burn_rate(10.0, 0.0, 1000.0, 60.0, &b) == FA_ERR_INVALID_ARGUMENT);
  fa_burnrate* br = NULL;
  EXPECT(fa_burnrate_create(10.0, 60.0, &br) == FA_OK);
  fa_level lvl = FA_LEVEL_NONE;
  for (int m = 0; m < 10; ++m) {
    for (int k = 0; k < 60; ++k) EXPECT(fa_burnrate_record(br, m + k / 60.0, 1, &lvl) == FA_OK);
  }
  EXPECT(lvl == FA_LEVEL_PAGE_FAST);
  size_t c = 0;
  EXPECT(fa_burnrate_window_count(br, 1.0, &c) == FA_OK);
  EXPECT(c == 60);
  EXPECT(fa_burnrate_record(br, 0.0, 1, &lvl) == FA_ERR_INVALID_ARGUMENT);
  fa_burnrate_destroy(br);
}

static void metrics(void) {
  const double s[4] = {0.9, 0.8, 0.2, 0.1};
  const int y[4] = {1, 1, 0, 0};
  double v = 0.0;
  EXPECT(fa_auc_pr(s, y, 4, &v) == FA_OK && v == 1.0);
  EXPECT(fa_auc_roc(s, y, 4, &v) == FA_OK && v == 1.0);
  EXPECT(fa_brier(s, y, 4, &v) == FA_OK && fabs(v - 0.025) < 1e-12);
  EXPECT(fa_ece(s, y, 4, 15, &v) == FA_OK && fabs(v - 0.15) < 1e-12);
  const int bad[4] = {1, 2, 0, 0};
  EXPECT(fa_auc_roc(s, bad, 4, &v) == FA_ERR_INVALID_ARGUMENT);
}

static void command(void) {
  fa_command_result* res = NULL;
  EXPECT(fa_command("simulate", "{\"kind\":\"mean-shift\",\"length\":50}", &res) == FA_ERR_CONFIG);
  EXPECT(res == NULL);
  EXPECT(fa_command("simulate", "{\"kind\":\"mean-shift\",\"bogus\":1,\"out\":\"x.csv\"}", &res) == FA_ERR_CONFIG);
  EXPECT(fa_command("frobnicate", "{}", &res) != FA_OK);
  EXPECT(fa_command("simulate", "not json", &res) != FA_OK);
}

int main(void) {
  EXPECT(strcmp(fa_version(), "0.1.0") == 0);
  EXPECT(strcmp(fa_status_name(FA_ERR_CONFIG), "") != 0);
  detector();
  calibrator();
  thresholds();
  burn();
  metrics();
  command();
  if (failures) {
    fprintf(stderr, "%d failures\n", failures);
    return 1;
  }
  printf("capi ok\n");
  return 0;
}

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

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "flowalert/bocpd.hpp"
#include "flowalert/burnrate.hpp"
#include "flowalert/calibrate.hpp"
#include "flowalert/commands.hpp"
#include "flowalert/decide.hpp"
#include "flowalert/error.hpp"
#include "flowalert/flowalert.h"
#include "flowalert/metrics.hpp"

#ifndef FLOWALERT_VERSION
#define FLOWALERT_VERSION "0.0.0"
#endif

struct fa_detector {
  flowalert::bocpd::Detector impl;
};

struct fa_calibrator {
  flowalert::calibrate::CalibrationMap impl;
};

struct fa_burnrate {
  flowalert::burnrate::Tracker impl;
};

struct fa_command_result {
  flowalert::commands::CommandResult impl;
};

namespace {

thread_local std::string last_error;

fa_status set_error(fa_status status, const char* what) {
  last_error = what;
  return status;
}

template <class F>
fa_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return FA_OK;
  } catch (const flowalert::Error& e) {
    return set_error(static_cast<fa_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(FA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(FA_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(FA_ERR_INTERNAL, "unknown failure");
  }
}

void need(const void* p, const char* name) {
  if (p == nullptr) flowalert::fail(flowalert::ErrorCode::kInvalidArgument, std::string(name) + " is NULL");
}

template <class T>
std::span<const T> view(const T* p, std::size_t n, const char* name) {
  if (n > 0) need(p, name);
  return {p, n};
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* fa_version(void) { return FLOWALERT_VERSION; }

const char* fa_last_error(void) { return last_error.c_str(); }

const char* fa_status_name(fa_status status) {
  switch (status) {
    case FA_OK: return "ok";
    case FA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case FA_ERR_IO: return "i/o error";
    case FA_ERR_PARSE: return "parse error";
    case FA_ERR_DIMENSION: return "dimension mismatch";
    case FA_ERR_STATE: return "invalid state";
    case FA_ERR_NUMERIC: return "numeric error";
    case FA_ERR_CONFIG: return "configuration error";
    case FA_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void fa_detector_config_default(fa_detector_config* cfg, size_t dim) {
  if (cfg == nullptr) return;
  const flowalert::bocpd::BocpdConfig d;
  cfg->max_run_length = d.max_run_length;
  cfg->hazard = d.hazard;
  cfg->variance_floor = d.variance_floor;
  cfg->warmup = d.warmup;
  cfg->dim = dim;
  cfg->prior_mean = nullptr;
  cfg->prior_var = nullptr;
}

fa_status fa_detector_create(const fa_detector_config* cfg, fa_detector** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = nullptr;
    flowalert::bocpd::BocpdConfig c;
    c.max_run_length = cfg->max_run_length;
    c.hazard = cfg->hazard;
    c.variance_floor = cfg->variance_floor;
    c.warmup = cfg->warmup;
    c.dim = cfg->dim;
    if (cfg->prior_mean != nullptr) c.prior_mean.assign(cfg->prior_mean, cfg->prior_mean + cfg->dim);
    if (cfg->prior_var != nullptr) c.prior_var.assign(cfg->prior_var, cfg->prior_var + cfg->dim);
    *out = new fa_detector{flowalert::bocpd::Detector(c)};
  });
}

void fa_detector_destroy(fa_detector* det) { delete det; }

fa_status fa_detector_update(fa_detector* det, const double* x, size_t dim, double* score) {
  return guarded([&] {
    need(det, "det");
    need(score, "score");
    *score = det->impl.update(view(x, dim, "x"));
  });
}

fa_status fa_detector_anomaly_mass(const fa_detector* det, size_t k, double* mass) {
  return guarded([&] {
    need(det, "det");
    need(mass, "mass");
    *mass = det->impl.anomaly_mass(k);
  });
}

int fa_detector_in_warmup(const fa_detector* det) { return det != nullptr && det->impl.last_in_warmup() ? 1 : 0; }

uint64_t fa_detector_flows(const fa_detector* det) { return det == nullptr ? 0 : det->impl.flows_processed(); }

fa_status fa_calibrator_fit(fa_calibrator_kind kind, const double* scores, const int* labels, size_t n,
                            fa_calibrator** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    flowalert::calibrate::Kind k;
    switch (kind) {
      case FA_CALIBRATOR_IDENTITY: k = flowalert::calibrate::Kind::kIdentity; break;
      case FA_CALIBRATOR_ISOTONIC: k = flowalert::calibrate::Kind::kIsotonic; break;
      case FA_CALIBRATOR_PLATT: k = flowalert::calibrate::Kind::kPlatt; break;
      default: flowalert::fail(flowalert::ErrorCode::kInvalidArgument, "unknown calibrator kind");
    }
    auto map = k == flowalert::calibrate::Kind::kIdentity
                   ? flowalert::calibrate::CalibrationMap::identity()
                   : flowalert::calibrate::fit(k, view(scores, n, "scores"), view(labels, n, "labels"));
    *out = new fa_calibrator{std::move(map)};
  });
}

fa_status fa_calibrator_from_json(const char* json, fa_calibrator** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = nullptr;
    *out = new fa_calibrator{flowalert::calibrate::CalibrationMap::from_json(json)};
  });
}

void fa_calibrator_destroy(fa_calibrator* cal) { delete cal; }

fa_status fa_calibrator_apply(const fa_calibrator* cal, double score, double* prob) {
  return guarded([&] {
    need(cal, "cal");
    need(prob, "prob");
    *prob = cal->impl.apply(score);
  });
}

fa_status fa_calibrator_to_json(const fa_calibrator* cal, char** json) {
  return guarded([&] {
    need(cal, "cal");
    need(json, "json");
    *json = dup_string(cal->impl.to_json());
  });
}

fa_status fa_elkan_threshold(double cost_fp, double cost_fn, double* tau) {
  return guarded([&] {
    need(tau, "tau");
    *tau = flowalert::decide::elkan_threshold({cost_fp, cost_fn});
  });
}

double fa_overshoot_bound(size_t n0) { return flowalert::decide::overshoot_bound(n0); }

fa_status fa_crc_threshold(const double* negative_scores, size_t n0, double alpha, fa_crc_result* out) {
  return guarded([&] {
    need(out, "out");
    const auto neg = view(negative_scores, n0, "negative_scores");
    const auto crc = flowalert::decide::crc_threshold(neg, alpha);
    const auto diag = flowalert::decide::collapse_diagnostics(neg, alpha, crc);
    out->feasible = crc.feasible ? 1 : 0;
    out->tau = crc.tau;
    out->n0 = crc.n0;
    out->negatives_at_or_above = crc.negatives_at_or_above;
    out->density_collapse = diag.density_collapse ? 1 : 0;
    out->overshoot_bound = diag.overshoot_bound;
  });
}

fa_status fa_burn_rate(double events, double window_minutes, double budget_events, double period_minutes,
                       double* rate) {
  return guarded([&] {
    need(rate, "rate");
    *rate = flowalert::burnrate::burn_rate(events, window_minutes, {budget_events, period_minutes});
  });
}

fa_status fa_burnrate_create(double budget_events, double period_minutes, fa_burnrate** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    *out = new fa_burnrate{flowalert::burnrate::Tracker({budget_events, period_minutes},
                                                        flowalert::burnrate::default_levels())};
  });
}

void fa_burnrate_destroy(fa_burnrate* br) { delete br; }

fa_status fa_burnrate_record(fa_burnrate* br, double timestamp_minutes, int event, fa_level* level) {
  return guarded([&] {
    need(br, "br");
    br->impl.record(timestamp_minutes, event != 0);
    if (level != nullptr) *level = static_cast<fa_level>(static_cast<int>(br->impl.escalate()));
  });
}

fa_status fa_burnrate_window_count(const fa_burnrate* br, double window_minutes, size_t* count) {
  return guarded([&] {
    need(br, "br");
    need(count, "count");
    *count = br->impl.count_in_window(window_minutes);
  });
}

fa_status fa_auc_pr(const double* scores, const int* labels, size_t n, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = flowalert::metrics::auc_pr(view(scores, n, "scores"), view(labels, n, "labels"));
  });
}

fa_status fa_auc_roc(const double* scores, const int* labels, size_t n, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = flowalert::metrics::auc_roc(view(scores, n, "scores"), view(labels, n, "labels"));
  });
}

fa_status fa_brier(const double* probs, const int* labels, size_t n, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = flowalert::metrics::brier(view(probs, n, "probs"), view(labels, n, "labels"));
  });
}

fa_status fa_ece(const double* probs, const int* labels, size_t n, size_t bins, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = flowalert::metrics::ece(view(probs, n, "probs"), view(labels, n, "labels"), bins);
  });
}

fa_status fa_command(const char* command, const char* config_json, fa_command_result** out) {
  return guarded([&] {
    need(command, "command");
    need(out, "out");
    *out = nullptr;
    auto res = flowalert::commands::execute(command, config_json == nullptr ? "" : config_json);
    *out = new fa_command_result{std::move(res)};
  });
}

void fa_command_result_destroy(fa_command_result* res) { delete res; }

int fa_command_crc_infeasible(const fa_command_result* res) {
  return res != nullptr && res->impl.crc_infeasible ? 1 : 0;
}

size_t fa_command_output_count(const fa_command_result* res) { return res == nullptr ? 0 : res->impl.outputs.size(); }

const char* fa_command_output(const fa_command_result* res, size_t i) {
  if (res == nullptr || i >= res->impl.outputs.size()) return nullptr;
  return res->impl.outputs[i].c_str();
}

size_t fa_command_input_count(const fa_command_result* res) { return res == nullptr ? 0 : res->impl.inputs.size(); }

const char* fa_command_input(const fa_command_result* res, size_t i) {
  if (res == nullptr || i >= res->impl.inputs.size()) return nullptr;
  return res->impl.inputs[i].c_str();
}

const char* fa_command_summary(const fa_command_result* res) {
  return res == nullptr ? "" : res->impl.summary.c_str();
}

void fa_string_free(char* s) { std::free(s); }

}  // extern "C"

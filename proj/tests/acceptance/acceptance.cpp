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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "../oracles.hpp"
#include "flowalert/bocpd.hpp"
#include "flowalert/burnrate.hpp"
#include "flowalert/calibrate.hpp"
#include "flowalert/commands.hpp"
#include "flowalert/decide.hpp"
#include "flowalert/ingest.hpp"
#include "flowalert/metrics.hpp"
#include "flowalert/pipeline.hpp"
#include "flowalert/synth.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace flowalert;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------- 1-3

Outcome threshold_table() {
  const double ratios[] = {1, 5, 10, 25, 50};
  const double want[] = {0.500, 0.167, 0.091, 0.038, 0.020};
  std::string got;
  bool ok = true;
  for (int i = 0; i < 5; ++i) {
    const double tau = decide::elkan_threshold(decide::CostSpec::from_ratio(ratios[i]));
    ok = ok && std::fabs(std::round(tau * 1000.0) / 1000.0 - want[i]) < 1e-12;
    got += fmt("%s%.3f", i ? " " : "", tau);
  }
  return {ok, "tau* = " + got};
}

Outcome burn_example() {
  const double b = burnrate::burn_rate(50, 5, {1000, 60});
  return {b == 0.6, fmt("b = %.17g", b)};
}

Outcome overshoot() {
  const double a = decide::overshoot_bound(12404);
  const double b = decide::overshoot_bound(187188);
  return {std::fabs(a - 1.61e-4) <= 1e-6 && std::fabs(b - 1.07e-5) <= 1e-7, fmt("%.4g, %.4g", a, b)};
}

// ---------------------------------------------------------------- 4

Outcome truncation_equivalence() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  std::size_t steps = 0;
  for (int stream = 0; stream < 200; ++stream) {
    const std::size_t T = 1 + rng() % 100;
    const std::size_t d = 1 + rng() % 5;
    bocpd::BocpdConfig cfg;
    cfg.dim = d;
    cfg.max_run_length = T + rng() % 20;
    bocpd::Detector det(cfg);
    oracle::ExactBocpd ref(cfg.hazard, cfg.variance_floor, std::vector<double>(d, 0.5),
                           std::vector<double>(d, 1.0 / 12.0));
    double level = u(rng);
    const double noise = 0.01 + 0.2 * u(rng);
    for (std::size_t t = 0; t < T; ++t) {
      if (u(rng) < 0.05) level = u(rng);
      std::vector<double> x(d);
      for (auto& v : x) v = level + noise * (u(rng) - 0.5);
      worst = std::max(worst, std::fabs(det.update(x) - ref.update(x)));
      ++steps;
    }
  }
  return {worst <= 1e-9, fmt("200 streams, %zu steps, max |ds| = %.3g", steps, worst)};
}

// ---------------------------------------------------------------- 5

Outcome pava_equivalence() {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  bool monotone = true;
  for (int inst = 0; inst < 500; ++inst) {
    const std::size_t n = 2 + rng() % 199;
    const bool ties = inst % 3 == 0;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = ties ? std::round(u(rng) * 20.0) / 20.0 : u(rng);
      y[i] = u(rng) < s[i] ? 1 : 0;
    }
    y[0] = 0;
    y[1] = 1;
    const auto m = calibrate::fit_isotonic(s, y);
    double prev = -1.0;
    for (const auto& [score, value] : oracle::brute_pava(s, y)) {
      const double got = m.apply(score);
      worst = std::max(worst, std::fabs(got - value));
      monotone = monotone && got >= prev;
      prev = got;
    }
  }
  return {worst <= 1e-12 && monotone, fmt("500 instances, max |dg| = %.3g, monotone %s", worst, monotone ? "yes" : "no")};
}

// ---------------------------------------------------------------- 6

Outcome crc_validity() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int trials = 2000;
  const std::size_t n_test = 2000;
  bool ok = true;
  std::string detail;
  for (const double alpha : {0.01, 0.05, 0.1}) {
    for (const std::size_t n0 : {std::size_t{200}, std::size_t{2000}}) {
      double sum = 0.0;
      double sumsq = 0.0;
      int within = 0;
      std::vector<double> cal(n0);
      for (int t = 0; t < trials; ++t) {
        for (auto& v : cal) v = u(rng);
        const auto r = decide::crc_threshold(cal, alpha);
        std::size_t fp = 0;
        for (std::size_t i = 0; i < n_test; ++i) fp += (r.feasible && u(rng) >= r.tau) ? 1 : 0;
        const double fpr = static_cast<double>(fp) / n_test;
        sum += fpr;
        sumsq += fpr * fpr;
        within += fpr <= alpha ? 1 : 0;
      }
      const double mean = sum / trials;
      const double se = std::sqrt(std::max(0.0, sumsq / trials - mean * mean) / trials);
      const bool pass = mean <= alpha + 3.0 * se;
      ok = ok && pass;
      detail += fmt("%sa=%g n0=%zu mean=%.5f (<= %.5f, %d%% <= a)", detail.empty() ? "" : "; ", alpha, n0, mean,
                    alpha + 3.0 * se, within * 100 / trials);
    }
  }
  return {ok, detail};
}

// ---------------------------------------------------------------- 7

Outcome crc_infeasibility() {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int infeasible = 0;
  for (int set = 0; set < 100; ++set) {
    const std::size_t n0 = 1 + rng() % 500;
    std::vector<double> s(n0);
    for (auto& v : s) v = u(rng);
    const double alpha = (0.01 + 0.98 * u(rng)) / static_cast<double>(n0 + 1);
    infeasible += decide::crc_threshold(s, alpha).feasible ? 0 : 1;
  }
  std::vector<double> concentrated(200);
  for (auto& v : concentrated) v = 0.3 * u(rng);
  const auto r = decide::crc_threshold(concentrated, 0.005);
  const auto diag = decide::collapse_diagnostics(concentrated, 0.005, r);
  const bool ok = infeasible == 100 && r.feasible && diag.density_collapse;
  return {ok, fmt("%d/100 infeasible; concentrated case tau=%.17g collapse=%s", infeasible, r.tau,
                  diag.density_collapse ? "yes" : "no")};
}

// ---------------------------------------------------------------- 8

Outcome change_point_scenario() {
  synth::ScenarioSpec spec;
  const auto stream = synth::gen_mean_shift(spec);
  bocpd::BocpdConfig cfg;
  cfg.dim = 1;
  bocpd::Detector det(cfg);
  const double tau = decide::elkan_threshold({});
  const std::size_t cp = spec.change_points.front();
  std::size_t pre_crossings = 0;
  long first = -1;
  for (std::size_t t = 0; t < stream.records.size(); ++t) {
    det.update(stream.records[t].features);
    const bool cross = det.anomaly_mass(5) > tau;
    if (t < cp && cross && !det.last_in_warmup()) ++pre_crossings;
    if (t >= cp && cross && first < 0) first = static_cast<long>(t);
  }
  const bool ok = first >= 0 && first - static_cast<long>(cp) <= 5 && pre_crossings == 0;
  return {ok, fmt("first crossing at t=%ld (change at %zu), pre-change crossings after warm-up %zu", first, cp,
                  pre_crossings)};
}

// ---------------------------------------------------------------- 9

Outcome burst_scenario() {
  synth::ScenarioSpec spec;
  spec.kind = synth::ScenarioKind::kBurstAndSustained;
  const auto sc = synth::gen_burst_sustained(spec);
  burnrate::Tracker tracker({1000, 60}, burnrate::default_levels());
  std::size_t pages_before = 0;
  bool fast = false;
  bool slow = false;
  for (std::size_t i = 0; i < sc.timestamps.size(); ++i) {
    tracker.record(sc.timestamps[i], sc.events[i] != 0);
    const auto snap = tracker.evaluate();
    if (sc.timestamps[i] < spec.sustained_start) {
      pages_before += snap.level == burnrate::Level::kPageFast || snap.level == burnrate::Level::kPageSlow;
      continue;
    }
    for (const auto& r : snap.readings) {
      fast = fast || (r.level == burnrate::Level::kPageFast && r.fired);
      slow = slow || (r.level == burnrate::Level::kPageSlow && r.fired);
    }
  }
  return {pages_before == 0 && fast && slow,
          fmt("page-level flows before the attack %zu; page-fast fired %s, page-slow fired %s", pages_before,
              fast ? "yes" : "no", slow ? "yes" : "no")};
}

// ---------------------------------------------------------------- 10

struct Splits {
  std::vector<ingest::FlowRecord> train, val, test;
};

Splits split_scaled(const ingest::FlowStream& stream) {
  const auto idx = ingest::chronological_split(stream.records);
  const auto& r = stream.records;
  std::vector<ingest::FlowRecord> train(r.begin(), r.begin() + static_cast<long>(idx.train_end));
  const auto pre = ingest::fit_preprocess(train);
  Splits s;
  s.train = ingest::apply_preprocess(pre, train);
  s.val = ingest::apply_preprocess(
      pre, std::span(r).subspan(idx.train_end, idx.val_end - idx.train_end));
  s.test = ingest::apply_preprocess(pre, std::span(r).subspan(idx.val_end));
  return s;
}

Outcome ablation_directionality() {
  const std::vector<pipeline::Variant> all{pipeline::Variant::kV1, pipeline::Variant::kV2, pipeline::Variant::kV3,
                                           pipeline::Variant::kV4};
  synth::ScenarioSpec spec;
  spec.kind = synth::ScenarioKind::kRegimePrevalence;
  spec.length = 50000;
  spec.prevalence = 0.05;
  spec.benign_anomaly_rate = 0.03;
  spec.benign_anomaly_mean = {0.5};
  const auto main = split_scaled(synth::gen_regime(spec));
  pipeline::PipelineConfig pc;
  pc.bocpd.hazard = 0.05;
  const auto a = pipeline::run_ablation(main.train, main.val, main.test, pc, all);
  const auto& v1 = a.rows[0];
  const auto& v3 = a.rows[2];
  const auto& v4 = a.rows[3];
  const bool order = v4.fpr > v3.fpr && v3.fpr > v1.fpr && v1.f1 > v4.f1;

  // Attack-dominated stream: too few validation negatives for alpha.
  synth::ScenarioSpec inv = spec;
  inv.length = 2000;
  inv.prevalence = 0.8;
  inv.benign_anomaly_rate = 0.0;
  const auto small = split_scaled(synth::gen_regime(inv));
  const auto b = pipeline::run_ablation(small.train, small.val, small.test, pipeline::PipelineConfig{}, all);
  const bool collapse = b.rows[0].alert_rate == 0.0 && b.rows[1].alert_rate == 0.0 && b.rows[0].f1 == 0.0 &&
                        b.rows[1].f1 == 0.0 && !b.rows[0].feasible && !b.rows[1].feasible;
  return {order && collapse,
          fmt("FPR V4 %.4f > V3 %.4f > V1 %.4f, F1 V1 %.3f > V4 %.3f; collapse regime V1/V2 alert rate %g/%g, F1 "
              "%g/%g",
              v4.fpr, v3.fpr, v1.fpr, v1.f1, v4.f1, b.rows[0].alert_rate, b.rows[1].alert_rate, b.rows[0].f1,
              b.rows[1].f1)};
}

// ---------------------------------------------------------------- 11

Outcome calibration_improvement() {
  std::mt19937_64 rng(1111);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> fit_s, test_s;
  std::vector<int> fit_y, test_y;
  auto draw = [&](std::vector<double>& s, std::vector<int>& y, int n) {
    for (int i = 0; i < n; ++i) {
      const double p = 0.02 + 0.96 * u(rng);
      const double logit = std::log(p / (1 - p));
      s.push_back(1.0 / (1.0 + std::exp(-3.0 * logit)));  // overconfident
      y.push_back(u(rng) < p ? 1 : 0);
    }
  };
  draw(fit_s, fit_y, 10000);
  draw(test_s, test_y, 10000);
  const auto m = calibrate::fit_isotonic(fit_s, fit_y);
  std::vector<double> cal;
  for (const double v : test_s) cal.push_back(m.apply(v));
  const double b0 = metrics::brier(test_s, test_y);
  const double b1 = metrics::brier(cal, test_y);
  const double e0 = metrics::ece(test_s, test_y);
  const double e1 = metrics::ece(cal, test_y);
  return {b1 < b0 && e1 < e0, fmt("Brier %.4f -> %.4f, ECE %.4f -> %.4f", b0, b1, e0, e1)};
}

// ---------------------------------------------------------------- 12

std::size_t resident_pages() {
  std::ifstream in("/proc/self/statm");
  std::size_t size = 0;
  std::size_t resident = 0;
  in >> size >> resident;
  return resident;
}

Outcome performance() {
  const std::size_t d = 20;
  const std::size_t flows = 1000000;
  const std::size_t batch = 10000;
  bocpd::BocpdConfig cfg;
  cfg.dim = d;
  cfg.max_run_length = 500;
  pipeline::StreamingPipeline pipe(bocpd::Detector(cfg), calibrate::CalibrationMap::identity(),
                                   {0.5, decide::TieRule::kInclusive, false}, {1000, 60},
                                   burnrate::default_levels());
  std::mt19937_64 rng(1212);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ingest::FlowRecord> buf(batch);
  for (auto& r : buf) r.features.resize(d);
  double busy = 0.0;
  std::size_t rss_warm = 0;
  std::size_t rss_peak = 0;
  std::size_t alerts = 0;
  for (std::size_t done = 0; done < flows; done += batch) {
    for (std::size_t i = 0; i < batch; ++i) {
      auto& r = buf[i];
      r.timestamp = static_cast<double>(done + i) / 60.0;
      const double centre = u(rng) < 0.01 ? 0.8 : 0.3;
      for (auto& v : r.features) v = centre + noise(rng);
    }
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& r : buf) alerts += static_cast<std::size_t>(pipe.process(r).event);
    busy += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto rss = resident_pages();
    if (done + batch == 100000) rss_warm = rss;
    rss_peak = std::max(rss_peak, rss);
  }
  const double page_kb = static_cast<double>(sysconf(_SC_PAGESIZE)) / 1024.0;
  const double growth_mb = rss_warm ? (static_cast<double>(rss_peak) - static_cast<double>(rss_warm)) * page_kb / 1024.0
                                    : 0.0;
  const double rate = static_cast<double>(flows) / busy;
  const bool ok = rate >= 500.0 && growth_mb <= 4.0;
  return {ok, fmt("L=500 d=20: %.0f flows/s over %zu flows; RSS %.1f MB, growth after 100k flows %.2f MB; "
                  "%zu events, peak retained %zu",
                  rate, flows, static_cast<double>(rss_peak) * page_kb / 1024.0, growth_mb, alerts,
                  pipe.tracker().peak_retained_events())};
}

// ---------------------------------------------------------------- 13

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  const auto dir = fs::temp_directory_path() / "flowalert_acceptance_det";
  fs::remove_all(dir);
  fs::create_directories(dir);
  using nlohmann::json;
  commands::execute("simulate", json{{"kind", "regime"},
                                     {"length", 20000},
                                     {"dim", 3},
                                     {"benign_anomaly_rate", 0.03},
                                     {"out", (dir / "flows.csv").string()}}
                                    .dump());
  json cfg{{"input", (dir / "flows.csv").string()}, {"out_dir", (dir / "a").string()}, {"seed", 7}};
  commands::execute("run", cfg.dump());
  cfg["out_dir"] = (dir / "b").string();
  commands::execute("run", cfg.dump());
  const auto a = slurp(dir / "a" / "outcomes.csv");
  const auto b = slurp(dir / "b" / "outcomes.csv");
  const bool ok = !a.empty() && a == b;
  fs::remove_all(dir);
  return {ok, fmt("outcomes.csv %zu bytes, identical %s", a.size(), a == b ? "yes" : "no")};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "threshold table", 1, threshold_table},
      {2, "burn-rate worked example", 1, burn_example},
      {3, "overshoot bound", 1, overshoot},
      {4, "truncated BOCPD matches exact recursion", 30, truncation_equivalence},
      {5, "PAVA matches brute force", 30, pava_equivalence},
      {6, "CRC validity Monte-Carlo", 120, crc_validity},
      {7, "CRC infeasibility and density collapse", 10, crc_infeasibility},
      {8, "mean-shift change-point scenario", 10, change_point_scenario},
      {9, "burst and sustained attack scenario", 10, burst_scenario},
      {10, "ablation directionality", 180, ablation_directionality},
      {11, "calibration improvement", 30, calibration_improvement},
      {12, "throughput and bounded memory", 2400, performance},
      {13, "run determinism", 60, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit_s) {
      o.pass = false;
      o.detail += fmt("; over the %.0f s limit", c.limit_s);
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %2d %s: %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}

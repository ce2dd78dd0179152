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

// flowalert command-line front end. Talks to the engine only through the C
// interface; every command leaves a manifest that `replay` can re-execute.

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flowalert/flowalert.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInfeasible = 4;

std::optional<std::string> sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) return std::nullopt;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) return std::nullopt;
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

json file_entry(const std::string& path) {
  json e;
  e["path"] = path;
  const auto digest = sha256_file(path);
  e["sha256"] = digest ? json(*digest) : json(nullptr);
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  e["bytes"] = ec ? json(nullptr) : json(size);
  return e;
}

int exit_code_for(fa_status st) {
  switch (st) {
    case FA_OK: return kExitOk;
    case FA_ERR_CONFIG: return kExitUsage;
    case FA_ERR_INTERNAL: return kExitInternal;
    default: return kExitData;
  }
}

struct Outcome {
  int exit_code = kExitOk;
  json inputs = json::array();
  json outputs = json::array();
  json summary;
};

Outcome execute(const std::string& command, const json& config) {
  Outcome o;
  fa_command_result* res = nullptr;
  const auto st = fa_command(command.c_str(), config.dump().c_str(), &res);
  if (st != FA_OK) {
    std::cerr << "flowalert " << command << ": " << fa_status_name(st) << ": " << fa_last_error() << '\n';
    o.exit_code = exit_code_for(st);
    return o;
  }
  std::unique_ptr<fa_command_result, decltype(&fa_command_result_destroy)> guard(res, fa_command_result_destroy);
  for (std::size_t i = 0; i < fa_command_input_count(res); ++i) o.inputs.push_back(file_entry(fa_command_input(res, i)));
  for (std::size_t i = 0; i < fa_command_output_count(res); ++i) {
    o.outputs.push_back(file_entry(fa_command_output(res, i)));
  }
  o.summary = json::parse(fa_command_summary(res));
  if (fa_command_crc_infeasible(res)) {
    std::cerr << "flowalert " << command << ": CRC threshold infeasible";
    if (o.summary.contains("diagnostic")) std::cerr << ": " << o.summary["diagnostic"].get<std::string>();
    std::cerr << '\n';
    o.exit_code = kExitInfeasible;
  }
  return o;
}

bool write_manifest(const std::string& path, const std::string& command, const std::vector<std::string>& argv,
                    const json& config, const Outcome& o, double seconds) {
  json m;
  m["tool"] = "flowalert";
  m["version"] = fa_version();
  m["command"] = command;
  m["argv"] = argv;
  m["config"] = config;
  m["inputs"] = o.inputs;
  m["outputs"] = o.outputs;
  m["summary"] = o.summary;
  m["timings"] = {{"wall_seconds", seconds}};
  m["exit_code"] = o.exit_code;
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(p, std::ios::binary);
  out << m.dump(2) << '\n';
  return static_cast<bool>(out);
}

int run_and_record(const std::string& command, const json& config, const std::string& manifest_path,
                   const std::vector<std::string>& argv) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto o = execute(command, config);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.exit_code != kExitOk && o.exit_code != kExitInfeasible) return o.exit_code;
  if (!write_manifest(manifest_path, command, argv, config, o, secs)) {
    std::cerr << "flowalert " << command << ": cannot write manifest '" << manifest_path << "'\n";
    return kExitData;
  }
  std::cout << o.summary.dump() << '\n';
  return o.exit_code;
}

int replay(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) {
    std::cerr << "flowalert replay: cannot open '" << manifest_path << "'\n";
    return kExitData;
  }
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    std::cerr << "flowalert replay: bad manifest: " << e.what() << '\n';
    return kExitData;
  }
  if (!m.contains("command") || !m.contains("config") || !m.contains("outputs")) {
    std::cerr << "flowalert replay: manifest lacks command, config or outputs\n";
    return kExitData;
  }
  const auto o = execute(m["command"].get<std::string>(), m["config"]);
  if (o.exit_code != kExitOk && o.exit_code != kExitInfeasible) return o.exit_code;
  std::size_t mismatches = 0;
  for (const auto& want : m["outputs"]) {
    const auto path = want["path"].get<std::string>();
    const auto got = sha256_file(path);
    if (!got || want["sha256"].is_null() || *got != want["sha256"].get<std::string>()) {
      std::cerr << "flowalert replay: " << path << " differs from the manifest\n";
      ++mismatches;
    }
  }
  if (mismatches > 0) return kExitData;
  std::cout << "replay: " << m["outputs"].size() << " outputs identical\n";
  return o.exit_code;
}

// Shared option blocks. Each returns a callback that copies the parsed values
// into the config JSON.
struct DataFlags {
  std::string input, train, validation, test;
  std::string timestamp_column = "timestamp";
  std::string label_column = "label";
  bool unlabeled = false;
  std::vector<std::string> features, categorical, drop;
  double split_train = 0.70, split_validation = 0.15, split_test = 0.15;
  bool no_scale = false;

  void add(CLI::App* app) {
    auto* in = app->add_option("--input", input, "Single flow CSV, split chronologically");
    auto* tr = app->add_option("--train", train, "Training CSV");
    auto* va = app->add_option("--validation", validation, "Validation CSV");
    auto* te = app->add_option("--test", test, "Test CSV");
    in->excludes(tr)->excludes(va)->excludes(te);
    tr->needs(va)->needs(te);
    va->needs(tr)->needs(te);
    te->needs(tr)->needs(va);
    app->add_option("--timestamp-column", timestamp_column, "Timestamp column (minutes)")->capture_default_str();
    app->add_option("--label-column", label_column, "Label column, 0 benign / 1 attack")->capture_default_str();
    app->add_flag("--unlabeled", unlabeled, "Input has no label column");
    app->add_option("--features", features, "Numeric feature columns (default: all others)")->delimiter(',');
    app->add_option("--categorical", categorical, "Categorical columns, one-hot encoded")->delimiter(',');
    app->add_option("--drop", drop, "Columns to ignore")->delimiter(',');
    app->add_option("--split-train", split_train, "Train fraction")->capture_default_str();
    app->add_option("--split-validation", split_validation, "Validation fraction")->capture_default_str();
    app->add_option("--split-test", split_test, "Test fraction")->capture_default_str();
    app->add_flag("--no-scale", no_scale, "Skip train-fitted min-max scaling");
  }

  void put(json& j) const {
    if (!input.empty()) j["input"] = input;
    if (!train.empty()) {
      j["train"] = train;
      j["validation"] = validation;
      j["test"] = test;
    }
    j["timestamp_column"] = timestamp_column;
    j["label_column"] = unlabeled ? "" : label_column;
    j["features"] = features;
    j["categorical"] = categorical;
    j["drop"] = drop;
    j["split_train"] = split_train;
    j["split_validation"] = split_validation;
    j["split_test"] = split_test;
    j["scale"] = !no_scale;
  }
};

struct ModelFlags {
  std::size_t max_run_length = 500;
  double hazard = 1e-3;
  double variance_floor = 1e-4;
  std::size_t warmup = 30;
  std::string variant = "V1";
  std::string calibrator;
  bool conservative = false;
  double cost_ratio = 10.0;
  double alpha = 0.01;
  double budget_events = 1000.0;
  double period_minutes = 60.0;
  std::uint64_t seed = 11;

  void add(CLI::App* app) {
    app->add_option("-L,--max-run-length", max_run_length, "Run-length truncation L")->capture_default_str();
    app->add_option("--hazard", hazard, "Constant hazard H")->capture_default_str();
    app->add_option("--variance-floor", variance_floor, "Variance floor")->capture_default_str();
    app->add_option("--warmup", warmup, "Warm-up flows W0")->capture_default_str();
    app->add_option("--variant", variant, "V1, V2, V3 or V4")->capture_default_str();
    app->add_option("--calibrator", calibrator, "Override the V1/V3 calibrator: isotonic or platt");
    app->add_flag("--conservative", conservative, "Use the stricter of tau* and the CRC threshold");
    app->add_option("--cost-ratio", cost_ratio, "C = C_FN / C_FP")->capture_default_str();
    app->add_option("--alpha", alpha, "CRC false-positive budget")->capture_default_str();
    app->add_option("--budget-events", budget_events, "Error budget B per period")->capture_default_str();
    app->add_option("--period-minutes", period_minutes, "SLO period T in minutes")->capture_default_str();
    app->add_option("--seed", seed, "Recorded seed")->capture_default_str();
  }

  void put(json& j) const {
    j["max_run_length"] = max_run_length;
    j["hazard"] = hazard;
    j["variance_floor"] = variance_floor;
    j["warmup"] = warmup;
    j["variant"] = variant;
    if (!calibrator.empty()) j["calibrator"] = calibrator;
    j["conservative"] = conservative;
    j["cost_ratio"] = cost_ratio;
    j["alpha"] = alpha;
    j["budget_events"] = budget_events;
    j["period_minutes"] = period_minutes;
    j["seed"] = seed;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flowalert: change-point scoring, calibration and burn-rate alerting for flow streams"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fa_version()));
  std::string manifest;

  // simulate
  auto* sim = app.add_subcommand("simulate", "Write a synthetic scenario CSV");
  std::string kind, sim_out, burn_out, attack_model = "gaussian";
  std::size_t length = 600, dim = 1;
  std::uint64_t sim_seed = 11;
  std::vector<std::size_t> shift_at{300};
  double shift_sigmas = 3.0, prevalence = 0.05, minutes_per_flow = 1.0 / 60.0, benign_anomaly_rate = 0.0;
  std::vector<double> benign_mean{0.3}, benign_sd{0.05}, attack_mean{0.7}, attack_sd{0.05};
  std::vector<double> anomaly_mean{0.5}, anomaly_sd{0.05};
  double flows_per_minute = 600, duration = 480, base_event_prob = 0.01, burst_start = 120, burst_duration = 3,
         burst_event_prob = 1.0, sustained_start = 300, sustained_event_prob = 0.5, sim_budget = 1000, sim_period = 60;
  sim->add_option("--kind", kind, "mean-shift, regime or burst-sustained")
      ->required()
      ->check(CLI::IsMember({"mean-shift", "regime", "burst-sustained"}));
  sim->add_option("--out", sim_out, "Output CSV")->required();
  sim->add_option("--length", length, "Flows")->capture_default_str();
  sim->add_option("--dim", dim, "Feature dimension")->capture_default_str();
  sim->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
  sim->add_option("--shift-at", shift_at, "Change points (flow index)")->delimiter(',');
  sim->add_option("--shift-sigmas", shift_sigmas, "Mean shift in benign standard deviations")->capture_default_str();
  sim->add_option("--prevalence", prevalence, "Attack prevalence for regime streams")->capture_default_str();
  sim->add_option("--attack-model", attack_model, "gaussian or uniform")->capture_default_str();
  sim->add_option("--benign-mean", benign_mean, "Per-dimension benign mean")->delimiter(',');
  sim->add_option("--benign-sd", benign_sd, "Per-dimension benign sd")->delimiter(',');
  sim->add_option("--attack-mean", attack_mean, "Per-dimension attack mean")->delimiter(',');
  sim->add_option("--attack-sd", attack_sd, "Per-dimension attack sd")->delimiter(',');
  sim->add_option("--benign-anomaly-rate", benign_anomaly_rate, "Share of displaced benign flows")
      ->capture_default_str();
  sim->add_option("--benign-anomaly-mean", anomaly_mean, "Displaced benign mean")->delimiter(',');
  sim->add_option("--benign-anomaly-sd", anomaly_sd, "Displaced benign sd")->delimiter(',');
  sim->add_option("--minutes-per-flow", minutes_per_flow, "Timestamp spacing")->capture_default_str();
  sim->add_option("--flows-per-minute", flows_per_minute, "Burst scenario flow rate")->capture_default_str();
  sim->add_option("--duration", duration, "Burst scenario length, minutes")->capture_default_str();
  sim->add_option("--base-event-prob", base_event_prob, "Benign event probability")->capture_default_str();
  sim->add_option("--burst-start", burst_start, "Burst start, minutes")->capture_default_str();
  sim->add_option("--burst-duration", burst_duration, "Burst length, minutes")->capture_default_str();
  sim->add_option("--burst-event-prob", burst_event_prob, "Event probability inside the burst")
      ->capture_default_str();
  sim->add_option("--sustained-start", sustained_start, "Sustained attack start, minutes")->capture_default_str();
  sim->add_option("--sustained-event-prob", sustained_event_prob, "Event probability during the attack")
      ->capture_default_str();
  sim->add_option("--budget-events", sim_budget, "Error budget B")->capture_default_str();
  sim->add_option("--period-minutes", sim_period, "SLO period T")->capture_default_str();
  sim->add_option("--burn-out", burn_out, "Per-minute burn-rate CSV (burst-sustained only)");
  sim->add_option("--manifest", manifest, "Manifest path (default: <out>.manifest.json)");

  // run
  auto* run = app.add_subcommand("run", "Fit on train + validation, stream the test split");
  DataFlags run_data;
  ModelFlags run_model;
  std::string run_out;
  run_data.add(run);
  run_model.add(run);
  run->add_option("--out-dir", run_out, "Output directory")->required();
  run->add_option("--manifest", manifest, "Manifest path (default: <out-dir>/manifest.json)");

  // ablate
  auto* abl = app.add_subcommand("ablate", "Compare the calibration / threshold variants");
  DataFlags abl_data;
  ModelFlags abl_model;
  std::string abl_out;
  std::vector<std::string> variants{"V1", "V2", "V3", "V4"};
  abl_data.add(abl);
  abl_model.add(abl);
  abl->add_option("--variants", variants, "Subset of V1,V2,V3,V4")->delimiter(',');
  abl->add_option("--out", abl_out, "Ablation CSV")->required();
  abl->add_option("--manifest", manifest, "Manifest path (default: <out>.manifest.json)");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Metrics, reliability data and CRC sweeps from a score file");
  std::string scores, ev_out, calibrate = "none", rule = "strict", score_column = "s_t", ev_label = "label",
                              split_column = "split";
  std::optional<double> tau;
  double ev_cost = 10.0;
  std::vector<double> alphas;
  std::size_t bins = 15;
  ev->add_option("--scores", scores, "CSV with score, label and optional split/warmup columns")->required();
  ev->add_option("--score-column", score_column, "Score column")->capture_default_str();
  ev->add_option("--label-column", ev_label, "Label column")->capture_default_str();
  ev->add_option("--split-column", split_column, "Split column; validation rows fit, test rows evaluate")
      ->capture_default_str();
  ev->add_option("--calibrate", calibrate, "none, isotonic or platt")->capture_default_str();
  ev->add_option("--tau", tau, "Operating threshold (default: tau* from --cost-ratio)");
  ev->add_option("--rule", rule, "strict (p > tau) or inclusive (p >= tau)")->capture_default_str();
  ev->add_option("--cost-ratio", ev_cost, "C = C_FN / C_FP")->capture_default_str();
  ev->add_option("--alphas", alphas, "CRC sweep, e.g. 0.001,0.005,0.01,0.05")->delimiter(',');
  ev->add_option("--bins", bins, "Reliability bins")->capture_default_str();
  ev->add_option("--out-dir", ev_out, "Output directory")->required();
  ev->add_option("--manifest", manifest, "Manifest path (default: <out-dir>/manifest.json)");

  // replay
  auto* rep = app.add_subcommand("replay", "Re-execute a manifest and check the output hashes");
  std::string replay_path;
  rep->add_option("--manifest", replay_path, "Manifest to replay")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const std::vector<std::string> args(argv, argv + argc);
  json config;
  if (*sim) {
    config["kind"] = kind;
    config["length"] = length;
    config["dim"] = dim;
    config["seed"] = sim_seed;
    config["minutes_per_flow"] = minutes_per_flow;
    config["change_points"] = shift_at;
    config["shift_sigmas"] = shift_sigmas;
    config["prevalence"] = prevalence;
    config["attack_model"] = attack_model;
    config["benign_mean"] = benign_mean;
    config["benign_sd"] = benign_sd;
    config["attack_mean"] = attack_mean;
    config["attack_sd"] = attack_sd;
    config["benign_anomaly_rate"] = benign_anomaly_rate;
    config["benign_anomaly_mean"] = anomaly_mean;
    config["benign_anomaly_sd"] = anomaly_sd;
    config["flows_per_minute"] = flows_per_minute;
    config["duration"] = duration;
    config["base_event_prob"] = base_event_prob;
    config["burst_start"] = burst_start;
    config["burst_duration"] = burst_duration;
    config["burst_event_prob"] = burst_event_prob;
    config["sustained_start"] = sustained_start;
    config["sustained_event_prob"] = sustained_event_prob;
    config["budget_events"] = sim_budget;
    config["period_minutes"] = sim_period;
    config["out"] = sim_out;
    if (!burn_out.empty()) config["burn_out"] = burn_out;
    return run_and_record("simulate", config, manifest.empty() ? sim_out + ".manifest.json" : manifest, args);
  }
  if (*run) {
    run_data.put(config);
    run_model.put(config);
    config["out_dir"] = run_out;
    return run_and_record("run", config, manifest.empty() ? (fs::path(run_out) / "manifest.json").string() : manifest,
                          args);
  }
  if (*abl) {
    abl_data.put(config);
    abl_model.put(config);
    config["variants"] = variants;
    config["out"] = abl_out;
    return run_and_record("ablate", config, manifest.empty() ? abl_out + ".manifest.json" : manifest, args);
  }
  if (*ev) {
    config["scores"] = scores;
    config["score_column"] = score_column;
    config["label_column"] = ev_label;
    config["split_column"] = split_column;
    config["calibrator"] = calibrate;
    if (tau) config["tau"] = *tau;
    config["rule"] = rule;
    config["cost_ratio"] = ev_cost;
    if (!alphas.empty()) config["alphas"] = alphas;
    config["bins"] = bins;
    config["out_dir"] = ev_out;
    return run_and_record("evaluate", config,
                          manifest.empty() ? (fs::path(ev_out) / "manifest.json").string() : manifest, args);
  }
  return replay(replay_path);
}

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

#include "flowalert/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>

#include "flowalert/bocpd.hpp"
#include "flowalert/burnrate.hpp"
#include "flowalert/calibrate.hpp"
#include "flowalert/decide.hpp"
#include "flowalert/error.hpp"
#include "flowalert/ingest.hpp"
#include "flowalert/metrics.hpp"
#include "flowalert/pipeline.hpp"
#include "flowalert/report.hpp"
#include "flowalert/synth.hpp"
#include "json.hpp"
#include "text.hpp"

namespace flowalert::commands {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

const std::vector<std::string> kDataKeys = {
    "input", "train", "validation", "test", "timestamp_column", "label_column", "features",
    "categorical", "drop", "split_train", "split_validation", "split_test", "scale"};

const std::vector<std::string> kModelKeys = {
    "max_run_length", "hazard", "variance_floor", "warmup", "variant", "calibrator", "conservative",
    "cost_ratio", "alpha", "budget_events", "period_minutes", "seed"};

const std::map<std::string, std::vector<std::string>, std::less<>>& key_table() {
  static const auto table = [] {
    std::map<std::string, std::vector<std::string>, std::less<>> t;
    t["simulate"] = {"kind", "length", "dim", "seed", "minutes_per_flow", "change_points", "shift_sigmas",
                     "prevalence", "attack_model", "benign_mean", "benign_sd", "attack_mean", "attack_sd",
                     "benign_anomaly_rate", "benign_anomaly_mean", "benign_anomaly_sd", "flows_per_minute",
                     "duration", "base_event_prob", "burst_start", "burst_duration", "burst_event_prob",
                     "sustained_start", "sustained_event_prob", "budget_events", "period_minutes", "out",
                     "burn_out"};
    auto with_data = kDataKeys;
    with_data.insert(with_data.end(), kModelKeys.begin(), kModelKeys.end());
    t["run"] = with_data;
    t["run"].push_back("out_dir");
    t["ablate"] = with_data;
    t["ablate"].insert(t["ablate"].end(), {"variants", "out"});
    t["evaluate"] = {"scores", "score_column", "label_column", "split_column", "calibrator", "tau", "rule",
                     "cost_ratio", "alphas", "bins", "out_dir"};
    for (auto& [name, keys] : t) std::sort(keys.begin(), keys.end());
    return t;
  }();
  return table;
}

class Config {
 public:
  Config(std::string_view command, std::string_view text) {
    const auto it = key_table().find(command);
    if (it == key_table().end()) fail(ErrorCode::kConfig, "unknown command '" + std::string(command) + "'");
    allowed_ = &it->second;
    try {
      j_ = json::parse(text.empty() ? std::string_view("{}") : text);
    } catch (const json::exception& e) {
      fail(ErrorCode::kConfig, std::string("config is not valid JSON: ") + e.what());
    }
    if (!j_.is_object()) fail(ErrorCode::kConfig, "config must be a JSON object");
    for (const auto& [key, value] : j_.items()) {
      if (!std::binary_search(allowed_->begin(), allowed_->end(), key)) {
        fail(ErrorCode::kConfig, "unknown option '" + key + "' for " + std::string(command));
      }
    }
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  template <class T>
  std::optional<T> opt(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(ErrorCode::kConfig, "option '" + key + "' has the wrong type");
    }
  }

  template <class T>
  T get(const std::string& key, T fallback) const {
    auto v = opt<T>(key);
    return v ? std::move(*v) : std::move(fallback);
  }

  template <class T>
  T need(const std::string& key) const {
    auto v = opt<T>(key);
    if (!v) fail(ErrorCode::kConfig, "missing required option '" + key + "'");
    return std::move(*v);
  }

 private:
  json j_;
  const std::vector<std::string>* allowed_ = nullptr;
};

// Validation failures on option values surface as configuration errors.
template <class F>
auto as_config(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) fail(ErrorCode::kConfig, e.what());
    throw;
  }
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorCode::kIo, "cannot create directory '" + path.parent_path().string() + "'");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) fail(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

void write_text(const fs::path& path, const std::string& body, CommandResult& result) {
  auto out = open_out(path);
  out << body << '\n';
  finish(out, path);
  result.outputs.push_back(path.string());
}

// ---------------------------------------------------------------- data

struct Splits {
  std::vector<ingest::FlowRecord> train;
  std::vector<ingest::FlowRecord> validation;
  std::vector<ingest::FlowRecord> test;
  bool labeled = false;
};

Splits load_data(const Config& c, CommandResult& result) {
  ingest::Schema schema;
  schema.timestamp_column = c.get<std::string>("timestamp_column", "timestamp");
  schema.label_column = c.get<std::string>("label_column", "label");
  schema.feature_columns = c.get<std::vector<std::string>>("features", {});
  schema.categorical_columns = c.get<std::vector<std::string>>("categorical", {});
  schema.dropped_columns = c.get<std::vector<std::string>>("drop", {});
  const bool scale = c.get<bool>("scale", true);
  if (!scale && !schema.categorical_columns.empty()) {
    fail(ErrorCode::kConfig, "categorical columns need scaling enabled");
  }

  const auto input = c.opt<std::string>("input");
  const bool split_files = c.has("train") || c.has("validation") || c.has("test");
  if (input.has_value() == split_files) {
    fail(ErrorCode::kConfig, "give either 'input' or all of 'train', 'validation', 'test'");
  }

  Splits s;
  auto load = [&](const std::string& path) {
    auto stream = ingest::load_stream(path, schema);
    result.inputs.push_back(path);
    s.labeled = stream.labeled;
    ingest::sort_chronologically(stream.records);
    return stream.records;
  };
  if (input) {
    ingest::SplitRatios ratios;
    ratios.train = c.get<double>("split_train", ratios.train);
    ratios.validation = c.get<double>("split_validation", ratios.validation);
    ratios.test = c.get<double>("split_test", ratios.test);
    auto records = load(*input);
    const auto idx = as_config([&] { return ingest::chronological_split(records, ratios); });
    auto at = [&](std::size_t i) { return std::make_move_iterator(records.begin() + static_cast<std::ptrdiff_t>(i)); };
    s.train.assign(at(0), at(idx.train_end));
    s.validation.assign(at(idx.train_end), at(idx.val_end));
    s.test.assign(at(idx.val_end), at(idx.total));
  } else {
    s.train = load(c.need<std::string>("train"));
    s.validation = load(c.need<std::string>("validation"));
    s.test = load(c.need<std::string>("test"));
  }
  require(!s.train.empty() && !s.validation.empty() && !s.test.empty(), ErrorCode::kParse,
          "every split needs at least one flow");
  if (scale) {
    const auto spec = ingest::fit_preprocess(s.train);
    s.train = ingest::apply_preprocess(spec, s.train);
    s.validation = ingest::apply_preprocess(spec, s.validation);
    s.test = ingest::apply_preprocess(spec, s.test);
  }
  return s;
}

pipeline::PipelineConfig model_config(const Config& c) {
  pipeline::PipelineConfig pc;
  pc.bocpd.max_run_length = c.get<std::size_t>("max_run_length", pc.bocpd.max_run_length);
  pc.bocpd.hazard = c.get<double>("hazard", pc.bocpd.hazard);
  pc.bocpd.variance_floor = c.get<double>("variance_floor", pc.bocpd.variance_floor);
  pc.bocpd.warmup = c.get<std::size_t>("warmup", pc.bocpd.warmup);
  pc.conservative = c.get<bool>("conservative", false);
  pc.alpha = c.get<double>("alpha", pc.alpha);
  pc.budget.events = c.get<double>("budget_events", pc.budget.events);
  pc.budget.period_minutes = c.get<double>("period_minutes", pc.budget.period_minutes);
  pc.seed = c.get<std::uint64_t>("seed", pc.seed);
  const double ratio = c.get<double>("cost_ratio", pc.costs.ratio());
  as_config([&] {
    pc.variant = pipeline::variant_from_string(c.get<std::string>("variant", "V1"));
    if (const auto cal = c.opt<std::string>("calibrator")) pc.calibrator_override = calibrate::kind_from_string(*cal);
    require(std::isfinite(ratio) && ratio > 0.0, ErrorCode::kInvalidArgument, "cost_ratio must be positive");
    require(pc.alpha > 0.0 && pc.alpha < 1.0, ErrorCode::kInvalidArgument, "alpha must lie in (0, 1)");
    pc.budget.validate();
    auto probe = pc.bocpd;
    probe.dim = 1;
    probe.validate();
    return 0;
  });
  pc.costs = decide::CostSpec::from_ratio(ratio);
  return pc;
}

// ---------------------------------------------------------------- simulate

template <class T>
void maybe(const Config& c, const char* key, T& field) {
  if (auto v = c.opt<T>(key)) field = std::move(*v);
}

CommandResult simulate(const Config& c) {
  CommandResult result;
  synth::ScenarioSpec spec;
  as_config([&] {
    spec.kind = synth::kind_from_string(c.need<std::string>("kind"));
    if (const auto m = c.opt<std::string>("attack_model")) {
      if (*m == "gaussian") {
        spec.attack_model = synth::AttackModel::kGaussian;
      } else if (*m == "uniform") {
        spec.attack_model = synth::AttackModel::kUniform;
      } else {
        fail(ErrorCode::kInvalidArgument, "attack_model must be gaussian or uniform");
      }
    }
    return 0;
  });
  maybe(c, "length", spec.length);
  maybe(c, "dim", spec.dim);
  maybe(c, "seed", spec.seed);
  maybe(c, "minutes_per_flow", spec.minutes_per_flow);
  maybe(c, "change_points", spec.change_points);
  maybe(c, "shift_sigmas", spec.shift_sigmas);
  maybe(c, "prevalence", spec.prevalence);
  maybe(c, "benign_mean", spec.benign_mean);
  maybe(c, "benign_sd", spec.benign_sd);
  maybe(c, "attack_mean", spec.attack_mean);
  maybe(c, "attack_sd", spec.attack_sd);
  maybe(c, "benign_anomaly_rate", spec.benign_anomaly_rate);
  maybe(c, "benign_anomaly_mean", spec.benign_anomaly_mean);
  maybe(c, "benign_anomaly_sd", spec.benign_anomaly_sd);
  maybe(c, "flows_per_minute", spec.flows_per_minute);
  maybe(c, "duration", spec.duration);
  maybe(c, "base_event_prob", spec.base_event_prob);
  maybe(c, "burst_start", spec.burst_start);
  maybe(c, "burst_duration", spec.burst_duration);
  maybe(c, "burst_event_prob", spec.burst_event_prob);
  maybe(c, "sustained_start", spec.sustained_start);
  maybe(c, "sustained_event_prob", spec.sustained_event_prob);
  burnrate::BudgetConfig budget;
  maybe(c, "budget_events", budget.events);
  maybe(c, "period_minutes", budget.period_minutes);
  const fs::path out_path = c.need<std::string>("out");
  const auto burn_out = c.opt<std::string>("burn_out");
  as_config([&] {
    spec.validate();
    budget.validate();
    return 0;
  });
  if (burn_out && spec.kind != synth::ScenarioKind::kBurstAndSustained) {
    fail(ErrorCode::kConfig, "burn_out only applies to the burst-sustained scenario");
  }

  json summary;
  summary["kind"] = std::string(synth::to_string(spec.kind));
  if (spec.kind == synth::ScenarioKind::kBurstAndSustained) {
    const auto sc = synth::gen_burst_sustained(spec);
    auto out = open_out(out_path);
    out << "timestamp,event,label,in_burst\n";
    for (std::size_t i = 0; i < sc.timestamps.size(); ++i) {
      out << text::format_double(sc.timestamps[i]) << ',' << sc.events[i] << ',' << sc.labels[i] << ','
          << sc.in_burst[i] << '\n';
    }
    finish(out, out_path);
    result.outputs.push_back(out_path.string());
    summary["rows"] = sc.timestamps.size();

    // One burn-rate snapshot per simulated minute.
    const auto levels = burnrate::default_levels();
    burnrate::Tracker tracker(budget, levels);
    std::vector<pipeline::AlertLogRow> rows;
    std::map<std::string, std::size_t> minutes_at_level;
    double next_minute = 1.0;
    auto snap = [&] {
      const auto s = tracker.evaluate();
      ++minutes_at_level[std::string(burnrate::to_string(s.level))];
      rows.push_back({s.timestamp, s.level, s.readings});
    };
    for (std::size_t i = 0; i < sc.timestamps.size(); ++i) {
      while (sc.timestamps[i] > next_minute) {
        if (i > 0) snap();
        next_minute += 1.0;
      }
      tracker.record(sc.timestamps[i], sc.events[i] != 0);
    }
    if (!sc.timestamps.empty()) snap();
    summary["minutes_at_level"] = minutes_at_level;
    if (burn_out) {
      auto bo = open_out(*burn_out);
      report::write_alert_log_csv(bo, rows, levels);
      finish(bo, *burn_out);
      result.outputs.push_back(*burn_out);
    }
  } else {
    const auto stream = spec.kind == synth::ScenarioKind::kMeanShift ? synth::gen_mean_shift(spec)
                                                                     : synth::gen_regime(spec);
    auto out = open_out(out_path);
    ingest::write_stream_csv(out, stream);
    finish(out, out_path);
    result.outputs.push_back(out_path.string());
    std::size_t positives = 0;
    for (const auto& r : stream.records) positives += static_cast<std::size_t>(r.label.value_or(0));
    summary["rows"] = stream.records.size();
    summary["positives"] = positives;
  }
  result.summary = summary.dump();
  return result;
}

// ---------------------------------------------------------------- run

CommandResult run(const Config& c) {
  CommandResult result;
  auto pc = model_config(c);
  const fs::path out_dir = c.need<std::string>("out_dir");
  auto data = load_data(c, result);
  const bool uses_crc =
      pipeline::variant_spec(pc.variant).threshold == pipeline::ThresholdSource::kCrc || pc.conservative;
  if (!data.labeled && (uses_crc || pc.calibrator_kind() != calibrate::Kind::kIdentity)) {
    fail(ErrorCode::kParse, "variant " + std::string(pipeline::to_string(pc.variant)) + " needs labelled data");
  }

  auto fitted = pipeline::fit_phase(data.train, data.validation, pc);
  const auto thresholds = fitted.thresholds;
  const auto rule = fitted.rule;
  const auto calibrator_json = fitted.calibrator.to_json();
  std::vector<bocpd::ScoredFlow> train_scores = std::move(fitted.train_scores);
  std::vector<bocpd::ScoredFlow> val_scores = std::move(fitted.validation_scores);

  const auto streamed = pipeline::stream_phase(data.test, std::move(fitted), pc);

  {
    const auto path = out_dir / "outcomes.csv";
    auto out = open_out(path);
    report::write_outcomes_csv(out, streamed.outcomes);
    finish(out, path);
    result.outputs.push_back(path.string());
  }
  {
    const auto path = out_dir / "alerts.csv";
    auto out = open_out(path);
    report::write_alert_log_csv(out, streamed.alert_log, pc.levels);
    finish(out, path);
    result.outputs.push_back(path.string());
  }
  {
    const auto path = out_dir / "scores.csv";
    auto out = open_out(path);
    report::write_scores_csv(out, train_scores, "train");
    report::write_scores_csv(out, val_scores, "validation", false);
    std::vector<bocpd::ScoredFlow> test_scores;
    test_scores.reserve(streamed.outcomes.size());
    for (const auto& o : streamed.outcomes) test_scores.push_back({o.timestamp, o.score, o.label, o.warmup});
    report::write_scores_csv(out, test_scores, "test", false);
    finish(out, path);
    result.outputs.push_back(path.string());
  }

  json th = json::parse(thresholds.to_json());
  th["variant"] = std::string(pipeline::to_string(pc.variant));
  th["calibrator"] = std::string(calibrate::to_string(pc.calibrator_kind()));
  th["conservative"] = pc.conservative;
  th["cost_ratio"] = pc.costs.ratio();
  th["operating_tau"] = rule.never ? json(nullptr) : json(rule.tau);
  th["tie_rule"] = rule.rule == decide::TieRule::kStrict ? "strict" : "inclusive";
  th["never_alert"] = rule.never;
  write_text(out_dir / "thresholds.json", th.dump(2), result);
  write_text(out_dir / "calibrator.json", calibrator_json, result);

  std::vector<double> ranking;
  std::vector<double> probs;
  std::vector<int> alerts;
  std::vector<int> labels;
  std::size_t warm = 0;
  std::map<std::string, std::size_t> flows_at_level;
  for (const auto& o : streamed.outcomes) {
    ++flows_at_level[std::string(burnrate::to_string(o.level))];
    if (o.warmup) {
      ++warm;
      continue;
    }
    if (!o.label) continue;
    ranking.push_back(o.score);
    probs.push_back(o.prob);
    alerts.push_back(o.event);
    labels.push_back(*o.label);
  }
  json m;
  m["variant"] = std::string(pipeline::to_string(pc.variant));
  m["test_flows"] = streamed.outcomes.size();
  m["warmup_flows"] = warm;
  m["alpha"] = pc.alpha;
  if (!labels.empty()) {
    const auto rep = metrics::evaluate(ranking, probs, alerts, labels);
    const auto parsed = json::parse(rep.to_json());
    for (const auto& [k, v] : parsed.items()) m[k] = v;
    m["fpr_within_alpha"] = rep.fpr <= pc.alpha;
  }
  m["flows_at_level"] = flows_at_level;
  m["crc_feasible"] = thresholds.feasible;
  write_text(out_dir / "metrics.json", m.dump(2), result);

  result.crc_infeasible = uses_crc && !thresholds.feasible;
  json summary;
  summary["variant"] = std::string(pipeline::to_string(pc.variant));
  summary["crc_feasible"] = thresholds.feasible;
  summary["n0"] = thresholds.n0;
  json lat;
  lat["flows"] = streamed.latency.flows;
  lat["p50_us"] = streamed.latency.p50_us;
  lat["p95_us"] = streamed.latency.p95_us;
  lat["p99_us"] = streamed.latency.p99_us;
  lat["mean_us"] = streamed.latency.mean_us;
  lat["flows_per_second"] = streamed.latency.flows_per_second;
  summary["latency"] = lat;
  summary["alerts"] = std::count_if(streamed.outcomes.begin(), streamed.outcomes.end(),
                                    [](const pipeline::FlowOutcome& o) { return o.event != 0; });
  if (result.crc_infeasible) {
    summary["diagnostic"] = "alpha " + text::format_double(pc.alpha) + " is below 1/(n0+1) = " +
                            text::format_double(1.0 / (static_cast<double>(thresholds.n0) + 1.0)) +
                            "; the run used the never-alert rule";
  }
  result.summary = summary.dump();
  return result;
}

// ---------------------------------------------------------------- ablate

CommandResult ablate(const Config& c) {
  CommandResult result;
  const auto pc = model_config(c);
  std::vector<pipeline::Variant> variants;
  as_config([&] {
    for (const auto& v : c.get<std::vector<std::string>>("variants", {"V1", "V2", "V3", "V4"})) {
      variants.push_back(pipeline::variant_from_string(v));
    }
    require(!variants.empty(), ErrorCode::kInvalidArgument, "variants must not be empty");
    return 0;
  });
  const fs::path out_path = c.need<std::string>("out");
  auto data = load_data(c, result);
  require(data.labeled, ErrorCode::kParse, "ablation needs labelled data");
  const auto res = pipeline::run_ablation(data.train, data.validation, data.test, pc, variants);
  auto out = open_out(out_path);
  report::write_ablation_csv(out, res.rows);
  finish(out, out_path);
  result.outputs.push_back(out_path.string());
  json summary;
  summary["rows"] = res.rows.size();
  summary["validation_flows"] = res.validation_scores.size();
  summary["test_flows"] = res.test_scores.size();
  result.summary = summary.dump();
  return result;
}

// ---------------------------------------------------------------- evaluate

struct ScoreTable {
  std::vector<double> fit_scores;
  std::vector<int> fit_labels;
  std::vector<double> eval_scores;
  std::vector<int> eval_labels;
  bool has_split = false;
};

ScoreTable read_scores(const fs::path& path, const std::string& score_col, const std::string& label_col,
                       const std::string& split_col) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::kParse, "scores file has no header");
  const auto header = text::split_csv_line(line);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index.emplace(std::string(text::trim(header[i])), i);
  auto col = [&](const std::string& name) -> std::optional<std::size_t> {
    const auto it = index.find(name);
    return it == index.end() ? std::nullopt : std::optional<std::size_t>(it->second);
  };
  auto sc = col(score_col);
  if (!sc && score_col == "s_t") sc = col("score");
  if (!sc) fail(ErrorCode::kParse, "scores file lacks column '" + score_col + "'");
  const auto lc = col(label_col);
  if (!lc) fail(ErrorCode::kParse, "scores file lacks column '" + label_col + "'");
  const auto spc = col(split_col);
  const auto wc = col("warmup");

  ScoreTable t;
  t.has_split = spc.has_value();
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    ++row;
    const auto cells = text::split_csv_line(line);
    if (cells.size() != header.size()) fail(ErrorCode::kParse, "scores row " + std::to_string(row) + ": bad width");
    if (wc && text::trim(cells[*wc]) == "1") continue;
    const auto s = text::parse_double(cells[*sc]);
    const auto y = text::parse_double(cells[*lc]);
    if (!s) fail(ErrorCode::kParse, "scores row " + std::to_string(row) + ": bad score");
    if (!y || (*y != 0.0 && *y != 1.0)) fail(ErrorCode::kParse, "scores row " + std::to_string(row) + ": bad label");
    const int label = static_cast<int>(*y);
    const auto split = spc ? std::string(text::trim(cells[*spc])) : std::string();
    if (!spc || split == "validation") {
      t.fit_scores.push_back(*s);
      t.fit_labels.push_back(label);
    }
    if (!spc || split == "test") {
      t.eval_scores.push_back(*s);
      t.eval_labels.push_back(label);
    }
  }
  return t;
}

CommandResult evaluate(const Config& c) {
  CommandResult result;
  const auto scores_path = c.need<std::string>("scores");
  const fs::path out_dir = c.need<std::string>("out_dir");
  const auto bins = c.get<std::size_t>("bins", 15);
  const double ratio = c.get<double>("cost_ratio", 10.0);
  const auto alphas = c.get<std::vector<double>>("alphas", {});
  const auto tau = c.opt<double>("tau");
  calibrate::Kind kind = calibrate::Kind::kIdentity;
  decide::TieRule rule = decide::TieRule::kStrict;
  as_config([&] {
    kind = calibrate::kind_from_string(c.get<std::string>("calibrator", "none"));
    const auto r = c.get<std::string>("rule", "strict");
    require(r == "strict" || r == "inclusive", ErrorCode::kInvalidArgument, "rule must be strict or inclusive");
    rule = r == "strict" ? decide::TieRule::kStrict : decide::TieRule::kInclusive;
    require(bins >= 1, ErrorCode::kInvalidArgument, "bins must be at least 1");
    require(std::isfinite(ratio) && ratio > 0.0, ErrorCode::kInvalidArgument, "cost_ratio must be positive");
    for (const double a : alphas) require(a > 0.0 && a < 1.0, ErrorCode::kInvalidArgument, "alphas must lie in (0, 1)");
    if (tau) require(*tau >= 0.0 && *tau <= 1.0, ErrorCode::kInvalidArgument, "tau must lie in [0, 1]");
    return 0;
  });

  const auto t = read_scores(scores_path, c.get<std::string>("score_column", "s_t"),
                             c.get<std::string>("label_column", "label"), c.get<std::string>("split_column", "split"));
  result.inputs.push_back(scores_path);
  require(!t.eval_scores.empty(), ErrorCode::kParse, "no rows to evaluate");

  const auto cal = kind == calibrate::Kind::kIdentity ? calibrate::CalibrationMap::identity()
                                                      : calibrate::fit(kind, t.fit_scores, t.fit_labels);
  auto calibrated = [&](std::span<const double> s) {
    std::vector<double> p(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) p[i] = cal.apply(s[i]);
    return p;
  };
  const auto probs = calibrated(t.eval_scores);
  const double op_tau = tau.value_or(decide::elkan_threshold(decide::CostSpec::from_ratio(ratio)));
  const auto op_rule = tau ? rule : decide::TieRule::kStrict;
  std::vector<int> alerts(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) alerts[i] = decide::classify(probs[i], op_tau, op_rule) ? 1 : 0;

  const auto rep = metrics::evaluate(t.eval_scores, probs, alerts, t.eval_labels, bins);
  json m;
  m["calibrator"] = std::string(calibrate::to_string(kind));
  m["calibration_rows"] = kind == calibrate::Kind::kIdentity ? 0 : t.fit_scores.size();
  m["rows"] = t.eval_scores.size();
  m["tau"] = op_tau;
  m["tie_rule"] = op_rule == decide::TieRule::kStrict ? "strict" : "inclusive";
  const auto parsed = json::parse(rep.to_json());
  for (const auto& [k, v] : parsed.items()) m[k] = v;
  write_text(out_dir / "metrics.json", m.dump(2), result);

  {
    const auto path = out_dir / "reliability.csv";
    auto out = open_out(path);
    report::write_reliability_csv(out, metrics::reliability_data(probs, t.eval_labels, bins));
    finish(out, path);
    result.outputs.push_back(path.string());
  }

  if (!alphas.empty()) {
    std::vector<double> negatives;
    const auto fit_probs = calibrated(t.fit_scores);
    for (std::size_t i = 0; i < fit_probs.size(); ++i) {
      if (t.fit_labels[i] == 0) negatives.push_back(fit_probs[i]);
    }
    require(!negatives.empty(), ErrorCode::kParse, "CRC sweep needs negatives in the calibration rows");
    std::vector<report::CrcSweepRow> rows;
    for (const double a : alphas) {
      const auto crc = decide::crc_threshold(negatives, a);
      const auto diag = decide::collapse_diagnostics(negatives, a, crc);
      report::CrcSweepRow r;
      r.alpha = a;
      r.n0 = crc.n0;
      r.feasible = crc.feasible;
      r.tau = crc.tau;
      r.overshoot_bound = diag.overshoot_bound;
      r.density_collapse = diag.density_collapse;
      if (crc.feasible) {
        const auto conf = metrics::confusion_at(probs, t.eval_labels, crc.tau, decide::TieRule::kInclusive);
        r.test_fpr = conf.fpr;
        r.alert_rate = conf.alert_rate;
        r.recall = conf.recall;
      }
      rows.push_back(r);
    }
    const auto path = out_dir / "crc_sweep.csv";
    auto out = open_out(path);
    report::write_crc_sweep_csv(out, rows);
    finish(out, path);
    result.outputs.push_back(path.string());
  }
  json summary;
  summary["rows"] = t.eval_scores.size();
  summary["brier"] = rep.brier;
  summary["ece"] = rep.ece;
  result.summary = summary.dump();
  return result;
}

}  // namespace

std::vector<std::string> known_keys(std::string_view command) {
  const auto it = key_table().find(command);
  if (it == key_table().end()) fail(ErrorCode::kConfig, "unknown command '" + std::string(command) + "'");
  return it->second;
}

CommandResult execute(std::string_view command, std::string_view config_json) {
  const Config c(command, config_json);
  if (command == "simulate") return simulate(c);
  if (command == "run") return run(c);
  if (command == "ablate") return ablate(c);
  return evaluate(c);
}

}  // namespace flowalert::commands

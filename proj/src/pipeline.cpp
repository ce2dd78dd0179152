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

#include "flowalert/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <string>

#include "flowalert/error.hpp"
#include "flowalert/metrics.hpp"

namespace flowalert::pipeline {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kV1: return "V1";
    case Variant::kV2: return "V2";
    case Variant::kV3: return "V3";
    case Variant::kV4: return "V4";
  }
  return "V1";
}

Variant variant_from_string(std::string_view name) {
  if (name == "V1" || name == "v1") return Variant::kV1;
  if (name == "V2" || name == "v2") return Variant::kV2;
  if (name == "V3" || name == "v3") return Variant::kV3;
  if (name == "V4" || name == "v4") return Variant::kV4;
  fail(ErrorCode::kInvalidArgument, "unknown variant '" + std::string(name) + "'");
}

VariantSpec variant_spec(Variant v) {
  switch (v) {
    case Variant::kV1: return {calibrate::Kind::kIsotonic, ThresholdSource::kCrc};
    case Variant::kV2: return {calibrate::Kind::kIdentity, ThresholdSource::kCrc};
    case Variant::kV3: return {calibrate::Kind::kIsotonic, ThresholdSource::kCost};
    case Variant::kV4: return {calibrate::Kind::kIdentity, ThresholdSource::kCost};
  }
  return {calibrate::Kind::kIsotonic, ThresholdSource::kCrc};
}

calibrate::Kind PipelineConfig::calibrator_kind() const {
  const auto spec = variant_spec(variant);
  if (spec.calibrator == calibrate::Kind::kIdentity) return calibrate::Kind::kIdentity;
  return calibrator_override.value_or(spec.calibrator);
}

AlertStage::AlertStage(const burnrate::BudgetConfig& budget, std::vector<burnrate::AlertLevelConfig> levels)
    : tracker_(budget, std::move(levels)) {}

burnrate::Snapshot AlertStage::step(double timestamp, bool event, bool warmup) {
  if (warmup) {
    burnrate::Snapshot quiet;
    quiet.timestamp = timestamp;
    return quiet;
  }
  tracker_.record(timestamp, event);
  return tracker_.evaluate();
}

StreamingPipeline::StreamingPipeline(bocpd::Detector detector, calibrate::CalibrationMap calibrator,
                                     decide::AlertRule rule, const burnrate::BudgetConfig& budget,
                                     std::vector<burnrate::AlertLevelConfig> levels)
    : detector_(std::move(detector)),
      calibrator_(std::move(calibrator)),
      rule_(rule),
      alerts_(budget, std::move(levels)) {
  require(calibrator_.fitted(), ErrorCode::kState, "streaming pipeline needs a fitted calibrator");
}

FlowOutcome StreamingPipeline::process(const ingest::FlowRecord& flow) {
  FlowOutcome out;
  out.timestamp = flow.timestamp;
  out.label = flow.label;
  out.score = detector_.update(flow.features);
  out.warmup = detector_.last_in_warmup();
  out.prob = calibrator_.apply(out.score);
  out.event = !out.warmup && rule_.fires(out.prob) ? 1 : 0;
  snapshot_ = alerts_.step(flow.timestamp, out.event != 0, out.warmup);
  out.level = snapshot_.level;
  return out;
}

namespace {

bocpd::BocpdConfig detector_config(const PipelineConfig& config, std::span<const ingest::FlowRecord> first) {
  require(!first.empty(), ErrorCode::kInvalidArgument, "pipeline: empty training split");
  bocpd::BocpdConfig bc = config.bocpd;
  bc.dim = first.front().features.size();
  return bc;
}

void score_into(bocpd::Detector& det, std::span<const ingest::FlowRecord> flows, std::vector<bocpd::ScoredFlow>& out) {
  out.reserve(out.size() + flows.size());
  for (const auto& f : flows) {
    const double s = det.update(f.features);
    out.push_back({f.timestamp, s, f.label, det.last_in_warmup()});
  }
}

struct FittedPosthoc {
  calibrate::CalibrationMap calibrator;
  decide::DecisionThresholds thresholds;
  bool crc_computed = false;
};

FittedPosthoc fit_posthoc(const PipelineConfig& config, std::span<const double> val_scores,
                          std::span<const int> val_labels) {
  FittedPosthoc f;
  const auto kind = config.calibrator_kind();
  if (kind == calibrate::Kind::kIdentity) {
    f.calibrator = calibrate::CalibrationMap::identity();
  } else {
    require(!val_scores.empty(), ErrorCode::kInvalidArgument,
            "pipeline: calibration needs labelled validation flows");
    f.calibrator = calibrate::fit(kind, val_scores, val_labels);
  }
  std::vector<double> negatives;
  for (std::size_t i = 0; i < val_scores.size(); ++i) {
    if (val_labels[i] == 0) negatives.push_back(f.calibrator.apply(val_scores[i]));
  }
  const bool needs_crc = variant_spec(config.variant).threshold == ThresholdSource::kCrc || config.conservative;
  if (!negatives.empty()) {
    f.thresholds = decide::compute_thresholds(config.costs, negatives, config.alpha);
    f.crc_computed = true;
  } else {
    require(!needs_crc, ErrorCode::kInvalidArgument, "pipeline: CRC needs labelled validation negatives");
    f.thresholds.tau_star = decide::elkan_threshold(config.costs);
    f.thresholds.alpha = config.alpha;
  }
  return f;
}

}  // namespace

decide::AlertRule select_rule(const PipelineConfig& config, const decide::DecisionThresholds& thresholds,
                              bool crc_computed) {
  const decide::AlertRule cost{thresholds.tau_star, decide::TieRule::kStrict, false};
  const bool use_crc = variant_spec(config.variant).threshold == ThresholdSource::kCrc;
  if (!use_crc && !config.conservative) return cost;
  require(crc_computed, ErrorCode::kState, "select_rule: CRC threshold was not computed");
  if (!thresholds.feasible) return {1.0, decide::TieRule::kInclusive, true};
  const decide::AlertRule crc{*thresholds.tau_crc, decide::TieRule::kInclusive, false};
  if (!config.conservative) return crc;
  return *thresholds.tau_crc > thresholds.tau_star ? crc : cost;
}

FittedArtifacts fit_phase(std::span<const ingest::FlowRecord> train, std::span<const ingest::FlowRecord> validation,
                          const PipelineConfig& config) {
  bocpd::Detector det(detector_config(config, train));
  std::vector<bocpd::ScoredFlow> train_scores;
  std::vector<bocpd::ScoredFlow> val_scores;
  score_into(det, train, train_scores);
  score_into(det, validation, val_scores);

  std::vector<double> cs;
  std::vector<int> cy;
  for (const auto& v : val_scores) {
    if (v.label && !v.warmup) {
      cs.push_back(v.score);
      cy.push_back(*v.label);
    }
  }
  auto posthoc = fit_posthoc(config, cs, cy);
  const auto rule = select_rule(config, posthoc.thresholds, posthoc.crc_computed);
  return FittedArtifacts{std::move(det),           std::move(posthoc.calibrator), posthoc.thresholds, rule,
                         posthoc.crc_computed,     std::move(train_scores),       std::move(val_scores)};
}

LatencyStats summarize_latency(std::vector<double> micros) {
  LatencyStats s;
  s.flows = micros.size();
  if (micros.empty()) return s;
  double total = 0.0;
  for (const double m : micros) total += m;
  std::sort(micros.begin(), micros.end());
  const auto pct = [&](double q) {
    const auto idx = static_cast<std::size_t>(q * static_cast<double>(micros.size() - 1) + 0.5);
    return micros[std::min(idx, micros.size() - 1)];
  };
  s.p50_us = pct(0.50);
  s.p95_us = pct(0.95);
  s.p99_us = pct(0.99);
  s.mean_us = total / static_cast<double>(micros.size());
  s.flows_per_second = total > 0 ? static_cast<double>(micros.size()) / (total * 1e-6) : 0.0;
  return s;
}

StreamResult stream_phase(std::span<const ingest::FlowRecord> test, FittedArtifacts fitted,
                          const PipelineConfig& config) {
  StreamingPipeline sp(std::move(fitted.detector), std::move(fitted.calibrator), fitted.rule, config.budget,
                       config.levels);
  StreamResult result;
  result.outcomes.reserve(test.size());
  std::vector<double> micros;
  micros.reserve(test.size());
  for (const auto& flow : test) {
    const auto t0 = std::chrono::steady_clock::now();
    FlowOutcome out = sp.process(flow);
    const auto t1 = std::chrono::steady_clock::now();
    micros.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
    if (out.event || out.level != burnrate::Level::kNone) {
      result.alert_log.push_back({out.timestamp, out.level, sp.last_snapshot().readings});
    }
    result.outcomes.push_back(std::move(out));
  }
  result.latency = summarize_latency(std::move(micros));
  return result;
}

AblationRow evaluate_variant(Variant variant, const PipelineConfig& base, std::span<const double> val_scores,
                             std::span<const int> val_labels, std::span<const double> test_scores,
                             std::span<const int> test_labels, std::span<const int> test_warmup) {
  require(test_scores.size() == test_labels.size(), ErrorCode::kDimension, "ablation: test scores/labels mismatch");
  require(test_warmup.empty() || test_warmup.size() == test_scores.size(), ErrorCode::kDimension,
          "ablation: warm-up flags mismatch");
  PipelineConfig cfg = base;
  cfg.variant = variant;
  const auto posthoc = fit_posthoc(cfg, val_scores, val_labels);
  const auto rule = select_rule(cfg, posthoc.thresholds, posthoc.crc_computed);
  std::vector<int> alerts(test_scores.size(), 0);
  for (std::size_t i = 0; i < test_scores.size(); ++i) {
    if (!test_warmup.empty() && test_warmup[i]) continue;
    alerts[i] = rule.fires(posthoc.calibrator.apply(test_scores[i])) ? 1 : 0;
  }
  const auto c = metrics::confusion_from_alerts(alerts, test_labels);
  AblationRow row;
  row.variant = variant;
  if (!rule.never) row.tau = rule.tau;
  row.alert_rate = c.alert_rate;
  row.fpr = c.fpr;
  row.recall = c.recall;
  row.precision = c.precision;
  row.f1 = c.f1;
  row.feasible = !rule.never;
  row.density_collapse = variant_spec(variant).threshold == ThresholdSource::kCrc && posthoc.thresholds.density_collapse;
  return row;
}

AblationResult run_ablation(std::span<const ingest::FlowRecord> train, std::span<const ingest::FlowRecord> validation,
                            std::span<const ingest::FlowRecord> test, const PipelineConfig& base,
                            std::span<const Variant> variants) {
  bocpd::Detector det(detector_config(base, train));
  std::vector<bocpd::ScoredFlow> scratch;
  score_into(det, train, scratch);
  scratch.clear();

  AblationResult result;
  std::vector<int> val_labels;
  score_into(det, validation, scratch);
  for (const auto& v : scratch) {
    if (v.label && !v.warmup) {
      result.validation_scores.push_back(v.score);
      val_labels.push_back(*v.label);
    }
  }
  scratch.clear();
  score_into(det, test, scratch);
  std::vector<int> test_labels;
  std::vector<int> test_warmup;
  for (const auto& v : scratch) {
    require(v.label.has_value(), ErrorCode::kInvalidArgument, "ablation: test split must be labelled");
    result.test_scores.push_back(v.score);
    test_labels.push_back(*v.label);
    test_warmup.push_back(v.warmup ? 1 : 0);
  }
  for (const auto v : variants) {
    result.rows.push_back(evaluate_variant(v, base, result.validation_scores, val_labels, result.test_scores,
                                           test_labels, test_warmup));
  }
  return result;
}

}  // namespace flowalert::pipeline

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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "flowalert/bocpd.hpp"
#include "flowalert/burnrate.hpp"
#include "flowalert/calibrate.hpp"
#include "flowalert/decide.hpp"
#include "flowalert/ingest.hpp"

namespace flowalert::pipeline {

/// Ablation variants: V1 isotonic + CRC, V2 identity + CRC, V3 isotonic +
/// cost threshold, V4 identity + cost threshold.
enum class Variant { kV1, kV2, kV3, kV4 };

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view name);

enum class ThresholdSource { kCrc, kCost };

struct VariantSpec {
  calibrate::Kind calibrator;
  ThresholdSource threshold;
};

VariantSpec variant_spec(Variant v);

struct PipelineConfig {
  bocpd::BocpdConfig bocpd;  // dim is taken from the data
  Variant variant = Variant::kV1;
  /// Replaces the isotonic calibrator of V1/V3 (e.g. with Platt). Ignored by
  /// the identity variants.
  std::optional<calibrate::Kind> calibrator_override;
  /// Use whichever of tau* and the CRC threshold alerts less.
  bool conservative = false;
  decide::CostSpec costs;
  double alpha = 0.01;
  burnrate::BudgetConfig budget;
  std::vector<burnrate::AlertLevelConfig> levels = burnrate::default_levels();
  /// Recorded in manifests; the pipeline is deterministic and never reads it.
  std::uint64_t seed = 11;

  calibrate::Kind calibrator_kind() const;
};

/// Per-flow record of the streaming decision.
struct FlowOutcome {
  double timestamp = 0.0;
  double score = 0.0;  // s_t
  double prob = 0.0;   // calibrated p_t
  int event = 0;       // z_t
  burnrate::Level level = burnrate::Level::kNone;
  bool warmup = false;
  std::optional<int> label;
};

/// Burn-rate half of the per-flow update: warm-up gating, event recording and
/// escalation.
class AlertStage {
 public:
  AlertStage(const burnrate::BudgetConfig& budget, std::vector<burnrate::AlertLevelConfig> levels);

  /// Warm-up flows never reach the burn-rate windows.
  burnrate::Snapshot step(double timestamp, bool event, bool warmup);
  const burnrate::Tracker& tracker() const { return tracker_; }

 private:
  burnrate::Tracker tracker_;
};

/// Full per-flow update: BOCPD, calibration, threshold, burn rate.
class StreamingPipeline {
 public:
  StreamingPipeline(bocpd::Detector detector, calibrate::CalibrationMap calibrator, decide::AlertRule rule,
                    const burnrate::BudgetConfig& budget, std::vector<burnrate::AlertLevelConfig> levels);

  FlowOutcome process(const ingest::FlowRecord& flow);

  const burnrate::Snapshot& last_snapshot() const { return snapshot_; }
  const bocpd::Detector& detector() const { return detector_; }
  const burnrate::Tracker& tracker() const { return alerts_.tracker(); }
  const decide::AlertRule& rule() const { return rule_; }

 private:
  bocpd::Detector detector_;
  calibrate::CalibrationMap calibrator_;
  decide::AlertRule rule_;
  AlertStage alerts_;
  burnrate::Snapshot snapshot_;
};

struct FittedArtifacts {
  bocpd::Detector detector;  // state after train + validation, carried into test
  calibrate::CalibrationMap calibrator;
  decide::DecisionThresholds thresholds;
  decide::AlertRule rule;
  bool crc_computed = false;
  std::vector<bocpd::ScoredFlow> train_scores;
  std::vector<bocpd::ScoredFlow> validation_scores;
};

/// Streams train then validation through one detector, fits the calibrator
/// on labelled, non-warm-up validation flows, and derives both thresholds from
/// the calibrated validation negatives.
FittedArtifacts fit_phase(std::span<const ingest::FlowRecord> train, std::span<const ingest::FlowRecord> validation,
                          const PipelineConfig& config);

decide::AlertRule select_rule(const PipelineConfig& config, const decide::DecisionThresholds& thresholds,
                              bool crc_computed);

struct LatencyStats {
  std::size_t flows = 0;
  double p50_us = 0.0;
  double p95_us = 0.0;
  double p99_us = 0.0;
  double mean_us = 0.0;
  double flows_per_second = 0.0;
};

LatencyStats summarize_latency(std::vector<double> micros);

struct AlertLogRow {
  double timestamp = 0.0;
  burnrate::Level level = burnrate::Level::kNone;
  std::vector<burnrate::LevelReading> readings;
};

struct StreamResult {
  std::vector<FlowOutcome> outcomes;
  std::vector<AlertLogRow> alert_log;  // flows with an event or a raised level
  LatencyStats latency;
};

StreamResult stream_phase(std::span<const ingest::FlowRecord> test, FittedArtifacts fitted, const PipelineConfig& config);

struct AblationRow {
  Variant variant = Variant::kV1;
  std::optional<double> tau;  // empty when CRC was infeasible
  double alert_rate = 0.0;
  double fpr = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  bool feasible = true;
  bool density_collapse = false;
};

struct AblationResult {
  std::vector<AblationRow> rows;
  std::vector<double> validation_scores;  // shared s_t, non-warm-up labelled flows
  std::vector<double> test_scores;
};

/// One BOCPD pass over train + validation + test; the variants differ only in
/// the post-hoc calibration and threshold.
AblationResult run_ablation(std::span<const ingest::FlowRecord> train, std::span<const ingest::FlowRecord> validation,
                            std::span<const ingest::FlowRecord> test, const PipelineConfig& base,
                            std::span<const Variant> variants);

/// Post-hoc evaluation of one variant over precomputed scores.
AblationRow evaluate_variant(Variant variant, const PipelineConfig& base, std::span<const double> val_scores,
                             std::span<const int> val_labels, std::span<const double> test_scores,
                             std::span<const int> test_labels, std::span<const int> test_warmup = {});

}  // namespace flowalert::pipeline

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
#include <string_view>
#include <vector>

#include "flowalert/ingest.hpp"

namespace flowalert::synth {

enum class ScenarioKind { kMeanShift, kBurstAndSustained, kRegimePrevalence };

std::string_view to_string(ScenarioKind kind);
ScenarioKind kind_from_string(std::string_view name);

/// How attack feature vectors are drawn. kUniform ignores the attack Gaussian
/// and samples U[0, 1] per dimension, so the detector's diagonal Gaussian is
/// no longer the true model.
enum class AttackModel { kGaussian, kUniform };

/// Parameters for every generator. Per-dimension vectors of length 1 are
/// broadcast to `dim`.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::kMeanShift;
  std::size_t length = 600;
  std::size_t dim = 1;
  double minutes_per_flow = 1.0 / 60.0;  // one flow per simulated second
  std::uint64_t seed = 11;

  std::vector<double> benign_mean{0.3};
  std::vector<double> benign_sd{0.05};

  // Mean shift: segments alternate benign / attack at each change point, and
  // the attack segments sit shift_sigmas benign standard deviations higher.
  std::vector<std::size_t> change_points{300};
  double shift_sigmas = 3.0;

  // Regime streams.
  double prevalence = 0.05;
  std::vector<double> attack_mean{0.7};
  std::vector<double> attack_sd{0.05};
  AttackModel attack_model = AttackModel::kGaussian;
  // Fraction of benign flows drawn from a displaced benign distribution
  // (backups, scans by the ops team): high change-point scores, label 0.
  double benign_anomaly_rate = 0.0;
  std::vector<double> benign_anomaly_mean{0.5};
  std::vector<double> benign_anomaly_sd{0.05};

  // Burst-and-sustained event scenario, all times in minutes.
  double flows_per_minute = 600.0;
  double duration = 480.0;
  double base_event_prob = 0.01;
  double burst_start = 120.0;
  double burst_duration = 3.0;  // must stay shorter than the 5 minute short window
  double burst_event_prob = 1.0;
  double sustained_start = 300.0;
  double sustained_event_prob = 0.5;

  void validate() const;
};

/// Gaussian stream with alternating benign/attack segments; labels are 1 in
/// attack segments.
ingest::FlowStream gen_mean_shift(const ScenarioSpec& spec);

/// Attack flows placed evenly (flow i is an attack iff floor((i+1)p) > floor(ip)),
/// so realised prevalence is within one flow of the target.
ingest::FlowStream gen_regime(const ScenarioSpec& spec);

/// Budget-event stream for the dual-window scenario.
struct EventScenario {
  std::vector<double> timestamps;
  std::vector<int> events;  // z_t
  std::vector<int> labels;  // 1 inside the sustained attack
  std::vector<int> in_burst;
};

EventScenario gen_burst_sustained(const ScenarioSpec& spec);

/// Event rate (per minute) that puts a window's burn exactly at beta.
double rate_for_burn(double beta, double budget_events, double period_minutes);

}  // namespace flowalert::synth

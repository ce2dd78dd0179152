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
#include <optional>
#include <span>
#include <string>

namespace flowalert::decide {

/// Misclassification costs; only their ratio C = C_FN / C_FP matters.
struct CostSpec {
  double false_positive = 1.0;
  double false_negative = 10.0;

  static CostSpec from_ratio(double ratio) { return {1.0, ratio}; }
  double ratio() const { return false_negative / false_positive; }
};

/// tau* = C_FP / (C_FP + C_FN).
double elkan_threshold(const CostSpec& costs);

/// Worst-case CRC excess over alpha, 2B/(n0+1) with B = 1 for indicator loss.
double overshoot_bound(std::size_t n0);

struct CrcResult {
  bool feasible = false;
  double tau = 1.0;  // meaningful only when feasible
  double alpha = 0.0;
  std::size_t n0 = 0;
  std::size_t negatives_at_or_above = 0;  // at tau, when feasible
};

/// Smallest tau in [0, 1] with n0/(n0+1) * FPR(tau) + 1/(n0+1) <= alpha, where
/// FPR(tau) is the fraction of negatives scoring >= tau. Candidates are 0,
/// every distinct score, the next double above the largest score, and 1.
CrcResult crc_threshold(std::span<const double> negative_scores, double alpha);

struct CollapseReport {
  double overshoot_bound = 0.0;
  bool overshoot_ok = false;  // alpha > 2/(n0+1)
  std::size_t negatives_at_or_above = 0;
  bool density_collapse = false;  // feasible, yet no validation negative reaches tau
};

CollapseReport collapse_diagnostics(std::span<const double> negative_scores, double alpha, const CrcResult& crc);

struct DecisionThresholds {
  double tau_star = 0.0;
  std::optional<double> tau_crc;  // empty when CRC is infeasible
  double alpha = 0.0;
  std::size_t n0 = 0;
  double overshoot_bound = 0.0;
  bool feasible = false;
  bool density_collapse = false;
  bool overshoot_ok = false;

  /// {tau_star, tau_crc, alpha, n0, overshoot_bound, feasible, density_collapse, overshoot_ok}
  std::string to_json() const;
};

DecisionThresholds compute_thresholds(const CostSpec& costs, std::span<const double> negative_scores, double alpha);

enum class TieRule { kStrict, kInclusive };

/// Alert iff p > tau (strict, cost threshold) or p >= tau (inclusive, CRC).
bool classify(double p, double tau, TieRule rule);

/// The operating threshold applied per flow.
struct AlertRule {
  double tau = 1.0;
  TieRule rule = TieRule::kStrict;
  bool never = false;  // infeasible CRC

  bool fires(double p) const { return !never && classify(p, tau, rule); }
};

}  // namespace flowalert::decide

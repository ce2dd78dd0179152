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

#include "flowalert/decide.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "flowalert/error.hpp"
#include "json.hpp"

namespace flowalert::decide {

double elkan_threshold(const CostSpec& costs) {
  require(costs.false_positive > 0.0 && costs.false_negative > 0.0 && std::isfinite(costs.false_positive) &&
              std::isfinite(costs.false_negative),
          ErrorCode::kInvalidArgument, "costs must be positive and finite");
  return costs.false_positive / (costs.false_positive + costs.false_negative);
}

double overshoot_bound(std::size_t n0) { return 2.0 / (static_cast<double>(n0) + 1.0); }

CrcResult crc_threshold(std::span<const double> negative_scores, double alpha) {
  require(!negative_scores.empty(), ErrorCode::kInvalidArgument, "crc_threshold: no validation negatives");
  require(alpha > 0.0 && alpha <= 1.0, ErrorCode::kInvalidArgument, "crc_threshold: alpha must lie in (0, 1]");
  std::vector<double> sorted(negative_scores.begin(), negative_scores.end());
  for (const double s : sorted) {
    require(s >= 0.0 && s <= 1.0, ErrorCode::kInvalidArgument, "crc_threshold: scores must lie in [0, 1]");
  }
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> candidates;
  candidates.reserve(sorted.size() + 3);
  candidates.push_back(0.0);
  candidates.insert(candidates.end(), sorted.begin(), sorted.end());
  const double above_max = std::nextafter(sorted.back(), std::numeric_limits<double>::infinity());
  if (above_max <= 1.0) candidates.push_back(above_max);
  candidates.push_back(1.0);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  const std::size_t n0 = sorted.size();
  const double n = static_cast<double>(n0);
  CrcResult result;
  result.alpha = alpha;
  result.n0 = n0;
  for (const double tau : candidates) {
    const auto count = static_cast<std::size_t>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), tau));
    const double fpr = static_cast<double>(count) / n;
    if ((n / (n + 1.0)) * fpr + 1.0 / (n + 1.0) <= alpha) {
      result.feasible = true;
      result.tau = tau;
      result.negatives_at_or_above = count;
      return result;
    }
  }
  return result;
}

CollapseReport collapse_diagnostics(std::span<const double> negative_scores, double alpha, const CrcResult& crc) {
  CollapseReport r;
  r.overshoot_bound = overshoot_bound(negative_scores.size());
  r.overshoot_ok = alpha > r.overshoot_bound;
  if (crc.feasible) {
    r.negatives_at_or_above = static_cast<std::size_t>(
        std::count_if(negative_scores.begin(), negative_scores.end(), [&](double s) { return s >= crc.tau; }));
    r.density_collapse = r.negatives_at_or_above == 0;
  }
  return r;
}

std::string DecisionThresholds::to_json() const {
  nlohmann::ordered_json j;
  j["tau_star"] = tau_star;
  j["tau_crc"] = tau_crc ? nlohmann::ordered_json(*tau_crc) : nlohmann::ordered_json(nullptr);
  j["alpha"] = alpha;
  j["n0"] = n0;
  j["overshoot_bound"] = overshoot_bound;
  j["feasible"] = feasible;
  j["density_collapse"] = density_collapse;
  j["overshoot_ok"] = overshoot_ok;
  return j.dump(2);
}

DecisionThresholds compute_thresholds(const CostSpec& costs, std::span<const double> negative_scores, double alpha) {
  DecisionThresholds t;
  t.tau_star = elkan_threshold(costs);
  const CrcResult crc = crc_threshold(negative_scores, alpha);
  const CollapseReport diag = collapse_diagnostics(negative_scores, alpha, crc);
  t.alpha = alpha;
  t.n0 = crc.n0;
  t.overshoot_bound = diag.overshoot_bound;
  t.overshoot_ok = diag.overshoot_ok;
  t.feasible = crc.feasible;
  t.density_collapse = diag.density_collapse;
  if (crc.feasible) t.tau_crc = crc.tau;
  return t;
}

bool classify(double p, double tau, TieRule rule) { return rule == TieRule::kStrict ? p > tau : p >= tau; }

}  // namespace flowalert::decide

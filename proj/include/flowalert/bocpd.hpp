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
#include <vector>

namespace flowalert::bocpd {

struct BocpdConfig {
  std::size_t max_run_length = 500;  // L
  double hazard = 1.0 / 1000.0;      // H, constant per flow
  double variance_floor = 1e-4;
  std::size_t warmup = 30;  // W0
  std::size_t dim = 0;
  std::vector<double> prior_mean;  // empty: 0.5 per dimension
  std::vector<double> prior_var;   // empty: 1/12 per dimension

  /// Throws Error(kInvalidArgument) on any out-of-range field.
  void validate() const;
  /// Copy with the prior vectors filled in.
  BocpdConfig resolved() const;
};

/// One scored flow, as written to the score dump.
struct ScoredFlow {
  double timestamp = 0.0;
  double score = 0.0;
  std::optional<int> label;
  bool warmup = false;
};

/// Truncated Bayesian online change-point detector with a diagonal Gaussian
/// plug-in observation model.
///
/// Hypothesis r carries the posterior weight of "the current run started r
/// flows ago" together with online mean / sum-of-squared-deviation statistics
/// of that run. Index 0 is "this flow starts a new regime"; its predictive is
/// the prior. Growth past `max_run_length` folds into the last bucket, which
/// then stands for "run length >= L" and keeps accumulating its own
/// statistics. The whole posterior lives in log space and is normalised with a
/// single log-sum-exp per update.
///
/// Not thread-safe; one writer per instance.
class Detector {
 public:
  explicit Detector(const BocpdConfig& config);

  /// Consumes one preprocessed feature vector and returns s_t = P(r_t = 0 | x_1:t).
  /// Throws on dimension mismatch or non-finite input.
  double update(std::span<const double> x);

  /// Posterior mass on run lengths 0..k.
  double anomaly_mass(std::size_t k) const;

  double last_score() const { return last_score_; }
  /// True when the most recent update was within the first W0 flows.
  bool last_in_warmup() const { return flows_ > 0 && flows_ - 1 < config_.warmup; }

  std::size_t hypothesis_count() const { return log_w_.size(); }
  std::vector<double> weights() const;
  double run_count(std::size_t r) const { return count_.at(r); }
  std::span<const double> run_mean(std::size_t r) const;
  /// The variance that enters the density for hypothesis r, dimension j.
  double predictive_variance(std::size_t r, std::size_t j) const;

  std::uint64_t flows_processed() const { return flows_; }
  std::uint64_t underflow_resets() const { return underflow_resets_; }
  /// Smallest variance ever handed to a density evaluation.
  double min_variance_used() const { return min_variance_used_; }
  const BocpdConfig& config() const { return config_; }

  /// Back to the single prior hypothesis; counters other than the flow count
  /// are kept.
  void reset();

 private:
  double log_predictive(std::size_t r, std::span<const double> x);
  double step(std::span<const double> x, bool allow_reset);

  BocpdConfig config_;
  double log_hazard_;
  double log_growth_;
  double log_prior_pred_const_;  // -0.5 * sum(log(2 pi v_prior))
  std::vector<double> prior_inv_var_;
  double prior_min_var_;

  std::vector<double> log_w_;
  std::vector<double> count_;
  std::vector<double> mean_;  // (L+1) x d, row per hypothesis
  std::vector<double> m2_;
  std::vector<double> scratch_;
  std::vector<double> var_buf_;

  double last_score_ = 0.0;
  std::uint64_t flows_ = 0;
  std::uint64_t underflow_resets_ = 0;
  double min_variance_used_;
};

}  // namespace flowalert::bocpd

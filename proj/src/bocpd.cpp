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

#include "flowalert/bocpd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "flowalert/error.hpp"

namespace flowalert::bocpd {
namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;  // log(2 pi)
const double kUnderflowLog = std::log(1e-300);

// Sums log(v[j]) with one log per block of 8.
double sum_log(const double* v, std::size_t d) {
  double acc = 0.0;
  std::size_t j = 0;
  for (; j + 8 <= d; j += 8) {
    acc += std::log(v[j] * v[j + 1] * v[j + 2] * v[j + 3] * v[j + 4] * v[j + 5] * v[j + 6] * v[j + 7]);
  }
  double tail = 1.0;
  for (; j < d; ++j) tail *= v[j];
  return acc + std::log(tail);
}

}  // namespace

void BocpdConfig::validate() const {
  require(max_run_length >= 1, ErrorCode::kInvalidArgument, "max_run_length must be >= 1");
  require(hazard > 0.0 && hazard < 1.0, ErrorCode::kInvalidArgument, "hazard must lie in (0, 1)");
  require(variance_floor > 0.0 && std::isfinite(variance_floor), ErrorCode::kInvalidArgument,
          "variance_floor must be positive");
  require(dim >= 1, ErrorCode::kInvalidArgument, "dim must be >= 1");
  require(prior_mean.empty() || prior_mean.size() == dim, ErrorCode::kInvalidArgument,
          "prior_mean must have dim entries");
  require(prior_var.empty() || prior_var.size() == dim, ErrorCode::kInvalidArgument,
          "prior_var must have dim entries");
  for (const double m : prior_mean) {
    require(std::isfinite(m), ErrorCode::kInvalidArgument, "prior_mean must be finite");
  }
  for (const double v : prior_var) {
    require(v > 0.0 && std::isfinite(v), ErrorCode::kInvalidArgument, "prior_var must be positive");
  }
}

BocpdConfig BocpdConfig::resolved() const {
  BocpdConfig c = *this;
  if (c.prior_mean.empty()) c.prior_mean.assign(dim, 0.5);
  if (c.prior_var.empty()) c.prior_var.assign(dim, 1.0 / 12.0);
  return c;
}

Detector::Detector(const BocpdConfig& config) : min_variance_used_(std::numeric_limits<double>::infinity()) {
  config.validate();
  config_ = config.resolved();
  const std::size_t d = config_.dim;
  const std::size_t cap = config_.max_run_length + 1;
  log_hazard_ = std::log(config_.hazard);
  log_growth_ = std::log1p(-config_.hazard);

  prior_inv_var_.resize(d);
  std::vector<double> floored(d);
  for (std::size_t j = 0; j < d; ++j) {
    floored[j] = std::max(config_.prior_var[j], config_.variance_floor);
    prior_inv_var_[j] = 1.0 / floored[j];
  }
  prior_min_var_ = *std::min_element(floored.begin(), floored.end());
  var_buf_.assign(d, 0.0);
  log_prior_pred_const_ = -0.5 * (static_cast<double>(d) * kLogTwoPi + sum_log(floored.data(), d));

  log_w_.reserve(cap);
  count_.assign(cap, 0.0);
  mean_.assign(cap * d, 0.0);
  m2_.assign(cap * d, 0.0);
  scratch_.reserve(cap + 1);
  reset();
}

void Detector::reset() {
  log_w_.assign(1, 0.0);
  count_[0] = 0.0;
  std::copy(config_.prior_mean.begin(), config_.prior_mean.end(), mean_.begin());
  std::fill_n(m2_.begin(), config_.dim, 0.0);
}

std::vector<double> Detector::weights() const {
  std::vector<double> w(log_w_.size());
  std::transform(log_w_.begin(), log_w_.end(), w.begin(), [](double lw) { return std::exp(lw); });
  return w;
}

std::span<const double> Detector::run_mean(std::size_t r) const {
  require(r < log_w_.size(), ErrorCode::kInvalidArgument, "run_mean: no such hypothesis");
  return {mean_.data() + r * config_.dim, config_.dim};
}

double Detector::predictive_variance(std::size_t r, std::size_t j) const {
  require(r < log_w_.size() && j < config_.dim, ErrorCode::kInvalidArgument, "predictive_variance: out of range");
  const double n = count_[r];
  if (n < 2.0) return std::max(config_.prior_var[j], config_.variance_floor);
  return std::max(m2_[r * config_.dim + j] / (n - 1.0), config_.variance_floor);
}

double Detector::anomaly_mass(std::size_t k) const {
  const std::size_t last = std::min(k + 1, log_w_.size());
  double mass = 0.0;
  for (std::size_t r = 0; r < last; ++r) mass += std::exp(log_w_[r]);
  return std::min(mass, 1.0);
}

double Detector::log_predictive(std::size_t r, std::span<const double> x) {
  const std::size_t d = config_.dim;
  const double n = count_[r];
  const double* mu = mean_.data() + r * d;
  if (n < 2.0) {
    // Prior variance; the mean is the prior mean for an empty run and the
    // single observation otherwise.
    double quad = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = x[j] - mu[j];
      quad += diff * diff * prior_inv_var_[j];
    }
    min_variance_used_ = std::min(min_variance_used_, prior_min_var_);
    return log_prior_pred_const_ - 0.5 * quad;
  }
  const double* m2 = m2_.data() + r * d;
  const double inv_dof = 1.0 / (n - 1.0);
  double* var = var_buf_.data();
  double quad = 0.0;
  double vmin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < d; ++j) {
    const double v = std::max(m2[j] * inv_dof, config_.variance_floor);
    var[j] = v;
    vmin = std::min(vmin, v);
    const double diff = x[j] - mu[j];
    quad += diff * diff / v;
  }
  min_variance_used_ = std::min(min_variance_used_, vmin);
  return -0.5 * (static_cast<double>(d) * kLogTwoPi + sum_log(var, d) + quad);
}

double Detector::update(std::span<const double> x) {
  require(x.size() == config_.dim, ErrorCode::kDimension,
          "bocpd update: expected " + std::to_string(config_.dim) + " features, got " + std::to_string(x.size()));
  for (const double v : x) require(std::isfinite(v), ErrorCode::kNumeric, "bocpd update: non-finite feature");
  ++flows_;
  last_score_ = step(x, true);
  return last_score_;
}

double Detector::step(std::span<const double> x, bool allow_reset) {
  const std::size_t d = config_.dim;
  const std::size_t L = config_.max_run_length;
  const std::size_t R = log_w_.size() - 1;
  const bool saturated = R == L;
  const std::size_t next_size = saturated ? L + 1 : R + 2;

  scratch_.resize(next_size);  // new log joints

  double prior_quad = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = x[j] - config_.prior_mean[j];
    prior_quad += diff * diff * prior_inv_var_[j];
  }
  scratch_[0] = log_hazard_ + log_prior_pred_const_ - 0.5 * prior_quad;

  // Downward pass: hypothesis r reads its own statistics before r-1 overwrites
  // them by growing into slot r.
  for (std::size_t i = R + 1; i-- > 0;) {
    const double lj = log_w_[i] + log_growth_ + log_predictive(i, x);
    const std::size_t target = std::min(i + 1, L);
    double* dst_mean = mean_.data() + target * d;
    double* dst_m2 = m2_.data() + target * d;
    if (saturated && i == L) {
      scratch_[L] = lj;
    } else if (saturated && i == L - 1) {
      const double hi = std::max(scratch_[L], lj);
      scratch_[L] = hi + std::log(std::exp(scratch_[L] - hi) + std::exp(lj - hi));
      continue;  // folded into the saturated bucket, which keeps its own statistics
    } else {
      scratch_[target] = lj;
      std::copy_n(mean_.data() + i * d, d, dst_mean);
      std::copy_n(m2_.data() + i * d, d, dst_m2);
      count_[target] = count_[i];
    }
    const double n = count_[target] + 1.0;
    count_[target] = n;
    for (std::size_t j = 0; j < d; ++j) {
      const double delta = x[j] - dst_mean[j];
      dst_mean[j] += delta / n;
      dst_m2[j] += delta * (x[j] - dst_mean[j]);
    }
  }
  count_[0] = 1.0;
  std::copy(x.begin(), x.end(), mean_.begin());
  std::fill_n(m2_.begin(), d, 0.0);

  const double hi = *std::max_element(scratch_.begin(), scratch_.end());
  if (allow_reset && !(hi >= kUnderflowLog)) {
    ++underflow_resets_;
    reset();
    return step(x, false);
  }
  double total = 0.0;
  for (const double lj : scratch_) total += std::exp(lj - hi);
  const double lse = hi + std::log(total);
  log_w_.resize(next_size);
  for (std::size_t r = 0; r < next_size; ++r) log_w_[r] = scratch_[r] - lse;
  return std::clamp(std::exp(log_w_[0]), 0.0, 1.0);
}

}  // namespace flowalert::bocpd

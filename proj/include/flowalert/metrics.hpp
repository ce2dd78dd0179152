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
#include <span>
#include <string>
#include <vector>

#include "flowalert/decide.hpp"

namespace flowalert::metrics {

/// Average precision, step sum over a descending sweep; tied scores form one
/// threshold. Needs both classes.
double auc_pr(std::span<const double> scores, std::span<const int> labels);

/// Mann-Whitney: P(s+ > s-) + 0.5 P(s+ == s-). Needs both classes.
double auc_roc(std::span<const double> scores, std::span<const int> labels);

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double precision = 0.0;  // 0 when nothing alerted
  double recall = 0.0;
  double f1 = 0.0;  // 0 when precision + recall == 0
  double fpr = 0.0;
  double alert_rate = 0.0;
};

Confusion confusion_at(std::span<const double> scores, std::span<const int> labels, double tau, decide::TieRule rule);
Confusion confusion_from_alerts(std::span<const int> alerts, std::span<const int> labels);

double brier(std::span<const double> probs, std::span<const int> labels);
/// Probabilities clipped to [eps, 1 - eps].
double log_loss(std::span<const double> probs, std::span<const int> labels, double eps = 1e-15);

struct ReliabilityBin {
  double lower = 0.0;
  double upper = 0.0;
  double confidence = 0.0;  // mean predicted probability
  double accuracy = 0.0;    // empirical positive rate
  std::size_t count = 0;

  double center() const { return 0.5 * (lower + upper); }
};

/// Equal-width bins on [0, 1]; left-closed, the last bin also right-closed.
/// Every bin is returned, empty ones with count 0.
std::vector<ReliabilityBin> reliability_data(std::span<const double> probs, std::span<const int> labels,
                                             std::size_t bins);

double ece(std::span<const double> probs, std::span<const int> labels, std::size_t bins = 15);

struct EvalReport {
  double auc_pr = 0.0;
  double auc_roc = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double alert_rate = 0.0;
  double fpr = 0.0;
  double brier = 0.0;
  double ece = 0.0;
  double log_loss = 0.0;
  double prevalence = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  bool ranking_defined = false;  // false when one class is missing; AUCs left at 0

  std::string to_json() const;
};

/// `ranking` orders flows for the AUCs, `probs` feed the calibration metrics,
/// `alerts` are the realised 0/1 decisions.
EvalReport evaluate(std::span<const double> ranking, std::span<const double> probs, std::span<const int> alerts,
                    std::span<const int> labels, std::size_t bins = 15);

}  // namespace flowalert::metrics

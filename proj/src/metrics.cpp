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

#include "flowalert/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flowalert/error.hpp"
#include "json.hpp"

namespace flowalert::metrics {
namespace {

void check(std::span<const double> scores, std::span<const int> labels) {
  require(scores.size() == labels.size(), ErrorCode::kDimension, "metrics: scores and labels differ in length");
  for (const int y : labels) require(y == 0 || y == 1, ErrorCode::kInvalidArgument, "metrics: labels must be 0/1");
}

std::size_t positives(std::span<const int> labels) {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

void require_both_classes(std::span<const int> labels) {
  const std::size_t p = positives(labels);
  require(p > 0 && p < labels.size(), ErrorCode::kInvalidArgument, "metric needs both classes present");
}

void finish(Confusion& c) {
  const double alerts = static_cast<double>(c.tp + c.fp);
  const double pos = static_cast<double>(c.tp + c.fn);
  const double neg = static_cast<double>(c.fp + c.tn);
  const double n = pos + neg;
  c.precision = alerts > 0 ? static_cast<double>(c.tp) / alerts : 0.0;
  c.recall = pos > 0 ? static_cast<double>(c.tp) / pos : 0.0;
  c.f1 = c.precision + c.recall > 0 ? 2.0 * c.precision * c.recall / (c.precision + c.recall) : 0.0;
  c.fpr = neg > 0 ? static_cast<double>(c.fp) / neg : 0.0;
  c.alert_rate = n > 0 ? alerts / n : 0.0;
}

}  // namespace

double auc_pr(std::span<const double> scores, std::span<const int> labels) {
  check(scores, labels);
  require_both_classes(labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const double total_pos = static_cast<double>(positives(labels));
  double tp = 0, fp = 0, ap = 0, prev_recall = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double s = scores[order[k]];
    for (; k < order.size() && scores[order[k]] == s; ++k) (labels[order[k]] ? tp : fp) += 1.0;
    const double recall = tp / total_pos;
    ap += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
  }
  return ap;
}

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
  check(scores, labels);
  require_both_classes(labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mid-ranks for ties, then the rank-sum form of the U statistic.
  double rank_sum_pos = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    std::size_t end = k;
    while (end < order.size() && scores[order[end]] == scores[order[k]]) ++end;
    const double mid_rank = 0.5 * static_cast<double>(k + 1 + end);
    for (std::size_t i = k; i < end; ++i) {
      if (labels[order[i]]) rank_sum_pos += mid_rank;
    }
    k = end;
  }
  const double np = static_cast<double>(positives(labels));
  const double nn = static_cast<double>(labels.size()) - np;
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

Confusion confusion_at(std::span<const double> scores, std::span<const int> labels, double tau,
                       decide::TieRule rule) {
  check(scores, labels);
  Confusion c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool alert = decide::classify(scores[i], tau, rule);
    if (labels[i]) {
      (alert ? c.tp : c.fn) += 1;
    } else {
      (alert ? c.fp : c.tn) += 1;
    }
  }
  finish(c);
  return c;
}

Confusion confusion_from_alerts(std::span<const int> alerts, std::span<const int> labels) {
  require(alerts.size() == labels.size(), ErrorCode::kDimension, "metrics: alerts and labels differ in length");
  Confusion c;
  for (std::size_t i = 0; i < alerts.size(); ++i) {
    const bool alert = alerts[i] != 0;
    if (labels[i]) {
      (alert ? c.tp : c.fn) += 1;
    } else {
      (alert ? c.fp : c.tn) += 1;
    }
  }
  finish(c);
  return c;
}

double brier(std::span<const double> probs, std::span<const int> labels) {
  check(probs, labels);
  if (probs.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double e = probs[i] - labels[i];
    acc += e * e;
  }
  return acc / static_cast<double>(probs.size());
}

double log_loss(std::span<const double> probs, std::span<const int> labels, double eps) {
  check(probs, labels);
  if (probs.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], eps, 1.0 - eps);
    acc -= labels[i] ? std::log(p) : std::log1p(-p);
  }
  return acc / static_cast<double>(probs.size());
}

std::vector<ReliabilityBin> reliability_data(std::span<const double> probs, std::span<const int> labels,
                                             std::size_t bins) {
  check(probs, labels);
  require(bins >= 1, ErrorCode::kInvalidArgument, "reliability: bins must be >= 1");
  std::vector<ReliabilityBin> out(bins);
  std::vector<double> sum_p(bins, 0.0), sum_y(bins, 0.0);
  const double nb = static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lower = static_cast<double>(b) / nb;
    out[b].upper = static_cast<double>(b + 1) / nb;
  }
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], 0.0, 1.0);
    auto b = std::min(static_cast<std::size_t>(p * nb), bins - 1);
    // p * bins can land on either side of an edge; the edges themselves decide.
    if (b > 0 && p < out[b].lower) --b;
    if (b + 1 < bins && p >= out[b + 1].lower) ++b;
    sum_p[b] += probs[i];
    sum_y[b] += labels[i];
    ++out[b].count;
  }
  for (std::size_t b = 0; b < bins; ++b) {
    if (out[b].count == 0) continue;
    out[b].confidence = sum_p[b] / static_cast<double>(out[b].count);
    out[b].accuracy = sum_y[b] / static_cast<double>(out[b].count);
  }
  return out;
}

double ece(std::span<const double> probs, std::span<const int> labels, std::size_t bins) {
  const auto data = reliability_data(probs, labels, bins);
  if (probs.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& b : data) {
    acc += static_cast<double>(b.count) * std::abs(b.accuracy - b.confidence);
  }
  return acc / static_cast<double>(probs.size());
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["auc_pr"] = ranking_defined ? nlohmann::ordered_json(auc_pr) : nlohmann::ordered_json(nullptr);
  j["auc_roc"] = ranking_defined ? nlohmann::ordered_json(auc_roc) : nlohmann::ordered_json(nullptr);
  j["f1"] = f1;
  j["precision"] = precision;
  j["recall"] = recall;
  j["alert_rate"] = alert_rate;
  j["fpr"] = fpr;
  j["brier"] = brier;
  j["ece"] = ece;
  j["log_loss"] = log_loss;
  j["prevalence"] = prevalence;
  j["n_pos"] = n_pos;
  j["n_neg"] = n_neg;
  return j.dump(2);
}

EvalReport evaluate(std::span<const double> ranking, std::span<const double> probs, std::span<const int> alerts,
                    std::span<const int> labels, std::size_t bins) {
  check(ranking, labels);
  check(probs, labels);
  EvalReport r;
  r.n_pos = positives(labels);
  r.n_neg = labels.size() - r.n_pos;
  r.prevalence = labels.empty() ? 0.0 : static_cast<double>(r.n_pos) / static_cast<double>(labels.size());
  r.ranking_defined = r.n_pos > 0 && r.n_neg > 0;
  if (r.ranking_defined) {
    r.auc_pr = auc_pr(ranking, labels);
    r.auc_roc = auc_roc(ranking, labels);
  }
  const Confusion c = confusion_from_alerts(alerts, labels);
  r.f1 = c.f1;
  r.precision = c.precision;
  r.recall = c.recall;
  r.alert_rate = c.alert_rate;
  r.fpr = c.fpr;
  r.brier = brier(probs, labels);
  r.ece = ece(probs, labels, bins);
  r.log_loss = log_loss(probs, labels);
  return r;
}

}  // namespace flowalert::metrics

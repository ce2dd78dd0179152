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

#include "flowalert/synth.hpp"

#include <cmath>
#include <random>
#include <string>

#include "flowalert/error.hpp"

namespace flowalert::synth {
namespace {

std::vector<double> broadcast(const std::vector<double>& v, std::size_t dim, const char* what) {
  if (v.size() == dim) return v;
  require(v.size() == 1, ErrorCode::kInvalidArgument, std::string(what) + ": need 1 or dim entries");
  return std::vector<double>(dim, v.front());
}

std::vector<std::string> feature_names(std::size_t dim) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < dim; ++j) names.push_back("f" + std::to_string(j));
  return names;
}

struct Gaussian {
  std::vector<double> mean;
  std::vector<double> sd;

  std::vector<double> draw(std::mt19937_64& rng) const {
    std::vector<double> x(mean.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (sd[j] == 0.0) {
        x[j] = mean[j];
        continue;
      }
      std::normal_distribution<double> n(mean[j], sd[j]);
      x[j] = n(rng);
    }
    return x;
  }
};

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kMeanShift: return "mean-shift";
    case ScenarioKind::kBurstAndSustained: return "burst-sustained";
    case ScenarioKind::kRegimePrevalence: return "regime";
  }
  return "mean-shift";
}

ScenarioKind kind_from_string(std::string_view name) {
  if (name == "mean-shift") return ScenarioKind::kMeanShift;
  if (name == "burst-sustained") return ScenarioKind::kBurstAndSustained;
  if (name == "regime") return ScenarioKind::kRegimePrevalence;
  fail(ErrorCode::kInvalidArgument, "unknown scenario kind '" + std::string(name) + "'");
}

void ScenarioSpec::validate() const {
  require(dim >= 1, ErrorCode::kInvalidArgument, "scenario: dim must be >= 1");
  require(minutes_per_flow > 0.0, ErrorCode::kInvalidArgument, "scenario: minutes_per_flow must be positive");
  for (const auto* v : {&benign_sd, &attack_sd, &benign_anomaly_sd}) {
    for (const double s : *v) require(s >= 0.0, ErrorCode::kInvalidArgument, "scenario: standard deviations must be >= 0");
  }
  switch (kind) {
    case ScenarioKind::kMeanShift:
      require(length >= 1, ErrorCode::kInvalidArgument, "scenario: length must be >= 1");
      for (std::size_t k = 0; k < change_points.size(); ++k) {
        require(change_points[k] > 0 && change_points[k] < length, ErrorCode::kInvalidArgument,
                "scenario: change points must lie inside the stream");
        require(k == 0 || change_points[k] > change_points[k - 1], ErrorCode::kInvalidArgument,
                "scenario: change points must be strictly increasing");
      }
      break;
    case ScenarioKind::kRegimePrevalence:
      require(length >= 1, ErrorCode::kInvalidArgument, "scenario: length must be >= 1");
      require(prevalence > 0.0 && prevalence < 1.0, ErrorCode::kInvalidArgument, "scenario: prevalence must lie in (0, 1)");
      require(benign_anomaly_rate >= 0.0 && benign_anomaly_rate < 1.0, ErrorCode::kInvalidArgument,
              "scenario: benign_anomaly_rate must lie in [0, 1)");
      break;
    case ScenarioKind::kBurstAndSustained:
      require(flows_per_minute > 0.0 && duration > 0.0, ErrorCode::kInvalidArgument,
              "scenario: flows_per_minute and duration must be positive");
      for (const double p : {base_event_prob, burst_event_prob, sustained_event_prob}) {
        require(p >= 0.0 && p <= 1.0, ErrorCode::kInvalidArgument, "scenario: event probabilities must lie in [0, 1]");
      }
      require(burst_duration >= 0.0 && burst_start >= 0.0, ErrorCode::kInvalidArgument,
              "scenario: burst timing must be non-negative");
      break;
  }
}

ingest::FlowStream gen_mean_shift(const ScenarioSpec& spec) {
  spec.validate();
  const auto mean = broadcast(spec.benign_mean, spec.dim, "benign_mean");
  const auto sd = broadcast(spec.benign_sd, spec.dim, "benign_sd");
  std::vector<double> shifted(mean);
  for (std::size_t j = 0; j < spec.dim; ++j) shifted[j] += spec.shift_sigmas * sd[j];
  const Gaussian benign{mean, sd};
  const Gaussian attack{shifted, sd};

  std::mt19937_64 rng(spec.seed);
  ingest::FlowStream stream;
  stream.feature_names = feature_names(spec.dim);
  stream.labeled = true;
  stream.records.reserve(spec.length);
  std::size_t segment = 0;
  for (std::size_t i = 0; i < spec.length; ++i) {
    while (segment < spec.change_points.size() && i >= spec.change_points[segment]) ++segment;
    const bool is_attack = segment % 2 == 1;
    ingest::FlowRecord r;
    r.timestamp = static_cast<double>(i) * spec.minutes_per_flow;
    r.features = (is_attack ? attack : benign).draw(rng);
    r.label = is_attack ? 1 : 0;
    stream.records.push_back(std::move(r));
  }
  return stream;
}

ingest::FlowStream gen_regime(const ScenarioSpec& spec) {
  spec.validate();
  const Gaussian benign{broadcast(spec.benign_mean, spec.dim, "benign_mean"),
                        broadcast(spec.benign_sd, spec.dim, "benign_sd")};
  const Gaussian attack{broadcast(spec.attack_mean, spec.dim, "attack_mean"),
                        broadcast(spec.attack_sd, spec.dim, "attack_sd")};
  const Gaussian odd_benign{broadcast(spec.benign_anomaly_mean, spec.dim, "benign_anomaly_mean"),
                            broadcast(spec.benign_anomaly_sd, spec.dim, "benign_anomaly_sd")};

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ingest::FlowStream stream;
  stream.feature_names = feature_names(spec.dim);
  stream.labeled = true;
  stream.records.reserve(spec.length);
  for (std::size_t i = 0; i < spec.length; ++i) {
    const double p = spec.prevalence;
    const bool is_attack =
        std::floor(static_cast<double>(i + 1) * p) > std::floor(static_cast<double>(i) * p);
    ingest::FlowRecord r;
    r.timestamp = static_cast<double>(i) * spec.minutes_per_flow;
    if (is_attack) {
      if (spec.attack_model == AttackModel::kUniform) {
        r.features.resize(spec.dim);
        for (auto& v : r.features) v = unit(rng);
      } else {
        r.features = attack.draw(rng);
      }
    } else {
      const bool odd = spec.benign_anomaly_rate > 0.0 && unit(rng) < spec.benign_anomaly_rate;
      r.features = (odd ? odd_benign : benign).draw(rng);
    }
    r.label = is_attack ? 1 : 0;
    stream.records.push_back(std::move(r));
  }
  return stream;
}

EventScenario gen_burst_sustained(const ScenarioSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  EventScenario out;
  const auto n = static_cast<std::size_t>(std::floor(spec.duration * spec.flows_per_minute));
  out.timestamps.reserve(n);
  out.events.reserve(n);
  out.labels.reserve(n);
  out.in_burst.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / spec.flows_per_minute;
    const bool burst = spec.burst_duration > 0.0 && t >= spec.burst_start && t < spec.burst_start + spec.burst_duration;
    const bool sustained = t >= spec.sustained_start;
    const double p = sustained ? spec.sustained_event_prob : burst ? spec.burst_event_prob : spec.base_event_prob;
    out.timestamps.push_back(t);
    out.events.push_back(unit(rng) < p ? 1 : 0);
    out.labels.push_back(sustained ? 1 : 0);
    out.in_burst.push_back(burst ? 1 : 0);
  }
  return out;
}

double rate_for_burn(double beta, double budget_events, double period_minutes) {
  return beta * budget_events / period_minutes;
}

}  // namespace flowalert::synth

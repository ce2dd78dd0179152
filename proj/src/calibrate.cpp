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

#include "flowalert/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flowalert/error.hpp"
#include "json.hpp"

namespace flowalert::calibrate {
namespace {

void check_pairs(std::span<const double> scores, std::span<const int> labels) {
  require(scores.size() == labels.size(), ErrorCode::kDimension, "calibration: scores and labels differ in length");
  require(!scores.empty(), ErrorCode::kInvalidArgument, "calibration: no pairs");
  std::size_t pos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    require(std::isfinite(scores[i]), ErrorCode::kNumeric, "calibration: non-finite score");
    require(labels[i] == 0 || labels[i] == 1, ErrorCode::kInvalidArgument, "calibration: labels must be 0/1");
    pos += static_cast<std::size_t>(labels[i]);
  }
  require(pos > 0 && pos < labels.size(), ErrorCode::kInvalidArgument,
          "calibration: both classes must be present");
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

std::string_view to_string(Kind kind) {
  switch (kind) {
    case Kind::kIdentity: return "identity";
    case Kind::kIsotonic: return "isotonic";
    case Kind::kPlatt: return "platt";
  }
  return "identity";
}

Kind kind_from_string(std::string_view name) {
  if (name == "identity" || name == "none") return Kind::kIdentity;
  if (name == "isotonic") return Kind::kIsotonic;
  if (name == "platt") return Kind::kPlatt;
  fail(ErrorCode::kInvalidArgument, "unknown calibrator kind '" + std::string(name) + "'");
}

CalibrationMap CalibrationMap::identity() {
  CalibrationMap m;
  m.fitted_ = true;
  m.kind_ = Kind::kIdentity;
  return m;
}

CalibrationMap CalibrationMap::isotonic(std::vector<double> breakpoints, std::vector<double> values) {
  require(!breakpoints.empty() && breakpoints.size() == values.size(), ErrorCode::kInvalidArgument,
          "isotonic map: breakpoints and values must be non-empty and equal length");
  for (std::size_t k = 0; k < values.size(); ++k) {
    require(std::isfinite(breakpoints[k]) && values[k] >= 0.0 && values[k] <= 1.0, ErrorCode::kInvalidArgument,
            "isotonic map: values must lie in [0, 1]");
    if (k > 0) {
      require(breakpoints[k] > breakpoints[k - 1], ErrorCode::kInvalidArgument,
              "isotonic map: breakpoints must be strictly increasing");
      require(values[k] >= values[k - 1], ErrorCode::kInvalidArgument, "isotonic map: values must be non-decreasing");
    }
  }
  CalibrationMap m;
  m.fitted_ = true;
  m.kind_ = Kind::kIsotonic;
  m.breakpoints_ = std::move(breakpoints);
  m.values_ = std::move(values);
  return m;
}

CalibrationMap CalibrationMap::platt(double a, double b, bool converged) {
  require(std::isfinite(a) && std::isfinite(b), ErrorCode::kInvalidArgument, "platt map: non-finite parameters");
  CalibrationMap m;
  m.fitted_ = true;
  m.kind_ = Kind::kPlatt;
  m.a_ = a;
  m.b_ = b;
  m.converged_ = converged;
  return m;
}

double CalibrationMap::apply(double s) const {
  require(fitted_, ErrorCode::kState, "calibration map is not fitted");
  switch (kind_) {
    case Kind::kIdentity: return std::clamp(s, 0.0, 1.0);
    case Kind::kPlatt: return sigmoid(a_ * s + b_);
    case Kind::kIsotonic: {
      const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), s);
      if (it == breakpoints_.begin()) return values_.front();
      return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
    }
  }
  return s;
}

std::string CalibrationMap::to_json() const {
  require(fitted_, ErrorCode::kState, "calibration map is not fitted");
  nlohmann::json j;
  j["kind"] = std::string(to_string(kind_));
  if (kind_ == Kind::kIsotonic) {
    j["breakpoints"] = breakpoints_;
    j["values"] = values_;
  } else if (kind_ == Kind::kPlatt) {
    j["a"] = a_;
    j["b"] = b_;
    j["converged"] = converged_;
  }
  return j.dump();
}

CalibrationMap CalibrationMap::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    const Kind kind = kind_from_string(j.at("kind").get<std::string>());
    switch (kind) {
      case Kind::kIdentity: return identity();
      case Kind::kIsotonic:
        return isotonic(j.at("breakpoints").get<std::vector<double>>(), j.at("values").get<std::vector<double>>());
      case Kind::kPlatt: return platt(j.at("a").get<double>(), j.at("b").get<double>(), j.value("converged", true));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("calibration map json: ") + e.what());
  }
  return identity();
}

CalibrationMap fit_isotonic(std::span<const double> scores, std::span<const int> labels) {
  check_pairs(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  struct Block {
    double first_score;
    double sum_y;
    double weight;
    double mean() const { return sum_y / weight; }
  };
  std::vector<Block> blocks;
  blocks.reserve(order.size());
  for (std::size_t k = 0; k < order.size();) {
    // Duplicate scores collapse to one weighted point before pooling.
    const double s = scores[order[k]];
    Block b{s, 0.0, 0.0};
    for (; k < order.size() && scores[order[k]] == s; ++k) {
      b.sum_y += labels[order[k]];
      b.weight += 1.0;
    }
    blocks.push_back(b);
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
      const Block top = blocks.back();
      blocks.pop_back();
      blocks.back().sum_y += top.sum_y;
      blocks.back().weight += top.weight;
    }
  }

  std::vector<double> breakpoints;
  std::vector<double> values;
  for (const auto& b : blocks) {
    const double v = b.mean();
    if (!values.empty() && values.back() == v) continue;  // equal neighbours share a step
    breakpoints.push_back(b.first_score);
    values.push_back(v);
  }
  return CalibrationMap::isotonic(std::move(breakpoints), std::move(values));
}

double platt_log_loss(double a, double b, std::span<const double> scores, std::span<const int> labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double z = a * scores[i] + b;
    total += labels[i] ? softplus(-z) : softplus(z);
  }
  return total / static_cast<double>(scores.size());
}

CalibrationMap fit_platt(std::span<const double> scores, std::span<const int> labels, const PlattOptions& opts) {
  check_pairs(scores, labels);
  const double n = static_cast<double>(scores.size());
  const double prevalence = std::accumulate(labels.begin(), labels.end(), 0.0) / n;
  double a = 0.0;
  double b = std::log(prevalence / (1.0 - prevalence));
  double loss = platt_log_loss(a, b, scores, labels);
  bool converged = false;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    double ga = 0, gb = 0, haa = 0, hab = 0, hbb = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const double s = scores[i];
      const double p = sigmoid(a * s + b);
      const double r = p - labels[i];
      const double w = p * (1.0 - p);
      ga += r * s;
      gb += r;
      haa += w * s * s;
      hab += w * s;
      hbb += w;
    }
    ga /= n;
    gb /= n;
    haa /= n;
    hab /= n;
    hbb /= n;
    if (std::hypot(ga, gb) < opts.gradient_tolerance) {
      converged = true;
      break;
    }
    const double ridge = 1e-12 + 1e-10 * (haa + hbb);
    haa += ridge;
    hbb += ridge;
    const double det = haa * hbb - hab * hab;
    double da = -(hbb * ga - hab * gb) / det;
    double db = -(haa * gb - hab * ga) / det;
    if (!std::isfinite(da) || !std::isfinite(db)) break;

    double step = 1.0;
    bool improved = false;
    for (int half = 0; half < 60; ++half, step *= 0.5) {
      const double na = a + step * da;
      const double nb = b + step * db;
      const double nl = platt_log_loss(na, nb, scores, labels);
      if (nl <= loss) {
        a = na;
        b = nb;
        loss = nl;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return CalibrationMap::platt(a, b, converged);
}

CalibrationMap fit(Kind kind, std::span<const double> scores, std::span<const int> labels) {
  switch (kind) {
    case Kind::kIdentity: return CalibrationMap::identity();
    case Kind::kIsotonic: return fit_isotonic(scores, labels);
    case Kind::kPlatt: return fit_platt(scores, labels);
  }
  return CalibrationMap::identity();
}

}  // namespace flowalert::calibrate

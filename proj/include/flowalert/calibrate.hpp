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
#include <string_view>
#include <vector>

namespace flowalert::calibrate {

enum class Kind { kIdentity, kIsotonic, kPlatt };

std::string_view to_string(Kind kind);
Kind kind_from_string(std::string_view name);

/// Monotone map from raw score to calibrated probability. A default-constructed
/// map is unfitted and refuses queries. Fitted maps are immutable.
class CalibrationMap {
 public:
  CalibrationMap() = default;

  static CalibrationMap identity();
  /// Breakpoints strictly increasing, values non-decreasing in [0, 1].
  static CalibrationMap isotonic(std::vector<double> breakpoints, std::vector<double> values);
  static CalibrationMap platt(double a, double b, bool converged = true);

  bool fitted() const { return fitted_; }
  Kind kind() const { return kind_; }

  /// Isotonic: right-continuous step lookup, O(log K), clamped outside the
  /// fitted range. Platt: sigmoid(a * s + b). Identity: s clamped to [0, 1].
  double apply(double s) const;

  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const double> values() const { return values_; }
  double platt_a() const { return a_; }
  double platt_b() const { return b_; }
  /// False when the Platt fit hit its iteration cap.
  bool converged() const { return converged_; }

  std::string to_json() const;
  static CalibrationMap from_json(std::string_view json);

 private:
  bool fitted_ = false;
  Kind kind_ = Kind::kIdentity;
  std::vector<double> breakpoints_;
  std::vector<double> values_;
  double a_ = 0.0;
  double b_ = 0.0;
  bool converged_ = true;
};

/// Pool-adjacent-violators least-squares fit. Equal scores are merged into one
/// weighted point first. Needs both labels present.
CalibrationMap fit_isotonic(std::span<const double> scores, std::span<const int> labels);

struct PlattOptions {
  double gradient_tolerance = 1e-8;
  int max_iterations = 100;
};

/// Damped Newton on the mean binary log-loss, started from a = 0,
/// b = logit(prevalence).
CalibrationMap fit_platt(std::span<const double> scores, std::span<const int> labels, const PlattOptions& opts = {});

/// Mean log-loss of sigmoid(a * s + b).
double platt_log_loss(double a, double b, std::span<const double> scores, std::span<const int> labels);

CalibrationMap fit(Kind kind, std::span<const double> scores, std::span<const int> labels);

}  // namespace flowalert::calibrate

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

#include "flowalert/burnrate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flowalert/error.hpp"

namespace flowalert::burnrate {

void BudgetConfig::validate() const {
  require(events > 0.0 && std::isfinite(events), ErrorCode::kInvalidArgument, "budget events must be positive");
  require(period_minutes > 0.0 && std::isfinite(period_minutes), ErrorCode::kInvalidArgument,
          "budget period must be positive");
}

std::string_view to_string(Level level) {
  switch (level) {
    case Level::kNone: return "none";
    case Level::kTicket: return "ticket";
    case Level::kPageSlow: return "page-slow";
    case Level::kPageFast: return "page-fast";
  }
  return "none";
}

Level level_from_string(std::string_view name) {
  if (name == "none") return Level::kNone;
  if (name == "ticket") return Level::kTicket;
  if (name == "page-slow") return Level::kPageSlow;
  if (name == "page-fast") return Level::kPageFast;
  fail(ErrorCode::kInvalidArgument, "unknown alert level '" + std::string(name) + "'");
}

std::vector<AlertLevelConfig> default_levels() {
  return {
      {Level::kPageFast, 60.0, 5.0, 14.4},
      {Level::kPageSlow, 360.0, 30.0, 6.0},
      {Level::kTicket, 4320.0, 360.0, 1.0},
  };
}

double burn_rate(double events, double window_minutes, const BudgetConfig& budget) {
  require(window_minutes > 0.0, ErrorCode::kInvalidArgument, "burn_rate: window must be positive");
  return (events / window_minutes) / (budget.events / budget.period_minutes);
}

Tracker::Tracker(const BudgetConfig& budget, std::vector<AlertLevelConfig> levels)
    : budget_(budget), levels_(std::move(levels)) {
  budget_.validate();
  require(!levels_.empty(), ErrorCode::kInvalidArgument, "burn-rate tracker needs at least one level");
  for (const auto& l : levels_) {
    require(l.short_window > 0.0 && l.short_window < l.long_window, ErrorCode::kInvalidArgument,
            "alert level " + std::string(to_string(l.level)) + ": need 0 < short window < long window");
    require(l.beta > 0.0, ErrorCode::kInvalidArgument, "alert level burn threshold must be positive");
    horizon_ = std::max(horizon_, l.long_window);
  }
}

void Tracker::record(double timestamp, bool event) {
  require(std::isfinite(timestamp), ErrorCode::kInvalidArgument, "burn-rate: non-finite timestamp");
  if (started_ && timestamp < now_) {
    fail(ErrorCode::kInvalidArgument, "burn-rate: time went backwards (" + std::to_string(timestamp) + " < " +
                                          std::to_string(now_) + ")");
  }
  started_ = true;
  now_ = timestamp;
  if (event) {
    events_.push_back(timestamp);
    peak_ = std::max(peak_, events_.size());
  }
  evict();
}

void Tracker::evict() {
  const double edge = now_ - horizon_;
  while (!events_.empty() && events_.front() <= edge) events_.pop_front();
}

std::size_t Tracker::count_in_window(double window_minutes) const {
  const double edge = now_ - window_minutes;
  return static_cast<std::size_t>(events_.end() - std::upper_bound(events_.begin(), events_.end(), edge));
}

Snapshot Tracker::evaluate() const {
  Snapshot snap;
  snap.timestamp = now_;
  snap.readings.reserve(levels_.size());
  for (const auto& l : levels_) {
    LevelReading r;
    r.level = l.level;
    r.short_burn = burn_rate(static_cast<double>(count_in_window(l.short_window)), l.short_window, budget_);
    r.long_burn = burn_rate(static_cast<double>(count_in_window(l.long_window)), l.long_window, budget_);
    r.fired = r.long_burn > l.beta && r.short_burn > l.beta;
    if (r.fired && snap.level == Level::kNone) snap.level = l.level;
    snap.readings.push_back(r);
  }
  return snap;
}

}  // namespace flowalert::burnrate

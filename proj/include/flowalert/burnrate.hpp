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
#include <deque>
#include <string_view>
#include <vector>

namespace flowalert::burnrate {

/// B allowed threshold-crossing events per SLO period of T minutes.
struct BudgetConfig {
  double events = 1000.0;
  double period_minutes = 60.0;

  void validate() const;
  double sustainable_rate() const { return events / period_minutes; }
};

enum class Level { kNone, kTicket, kPageSlow, kPageFast };

std::string_view to_string(Level level);
Level level_from_string(std::string_view name);

struct AlertLevelConfig {
  Level level = Level::kNone;
  double long_window = 0.0;   // minutes
  double short_window = 0.0;  // minutes
  double beta = 1.0;          // burn-rate threshold
};

/// page-fast 60/5 @ 14.4, page-slow 360/30 @ 6.0, ticket 4320/360 @ 1.0,
/// in escalation order.
std::vector<AlertLevelConfig> default_levels();

/// b_w = (e_w / |w|) / (B / T).
double burn_rate(double events, double window_minutes, const BudgetConfig& budget);

struct LevelReading {
  Level level = Level::kNone;
  double short_burn = 0.0;
  double long_burn = 0.0;
  bool fired = false;  // both burns strictly above beta
};

struct Snapshot {
  double timestamp = 0.0;
  Level level = Level::kNone;  // first fired level in escalation order
  std::vector<LevelReading> readings;
};

/// Sliding-window counter over budget events, keyed on stream time. Windows
/// are half-open (now - w, now]. One event log feeds every level and is
/// trimmed to the longest window on each call.
class Tracker {
 public:
  Tracker(const BudgetConfig& budget, std::vector<AlertLevelConfig> levels);

  /// Throws Error(kInvalidArgument) if time runs backwards.
  void record(double timestamp, bool event);

  std::size_t count_in_window(double window_minutes) const;
  Snapshot evaluate() const;
  Level escalate() const { return evaluate().level; }

  double now() const { return now_; }
  std::size_t retained_events() const { return events_.size(); }
  std::size_t peak_retained_events() const { return peak_; }
  const std::vector<AlertLevelConfig>& levels() const { return levels_; }
  const BudgetConfig& budget() const { return budget_; }

 private:
  void evict();

  BudgetConfig budget_;
  std::vector<AlertLevelConfig> levels_;
  double horizon_ = 0.0;
  double now_ = 0.0;
  bool started_ = false;
  std::deque<double> events_;
  std::size_t peak_ = 0;
};

}  // namespace flowalert::burnrate

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

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "flowalert/bocpd.hpp"
#include "flowalert/metrics.hpp"
#include "flowalert/pipeline.hpp"

namespace flowalert::report {

/// timestamp,s_t,p_t,z_t,level,warmup,label
void write_outcomes_csv(std::ostream& out, std::span<const pipeline::FlowOutcome> outcomes);

/// timestamp,s_t,label,warmup,split. Unlabelled rows leave the label empty.
void write_scores_csv(std::ostream& out, std::span<const bocpd::ScoredFlow> scores, const std::string& split,
                      bool header = true);

/// timestamp,level, then <level>_b_short,<level>_b_long per configured level.
void write_alert_log_csv(std::ostream& out, std::span<const pipeline::AlertLogRow> rows,
                         std::span<const burnrate::AlertLevelConfig> levels);

/// variant,tau,alert_rate,fpr,recall,precision,f1,feasible,density_collapse;
/// tau is N/A for an infeasible CRC row.
void write_ablation_csv(std::ostream& out, std::span<const pipeline::AblationRow> rows);

/// bin_center,confidence,accuracy,count; empty bins are skipped.
void write_reliability_csv(std::ostream& out, std::span<const metrics::ReliabilityBin> bins);

struct CrcSweepRow {
  double alpha = 0.0;
  std::size_t n0 = 0;
  bool feasible = false;
  double tau = 1.0;
  double overshoot_bound = 0.0;
  bool density_collapse = false;
  double test_fpr = 0.0;
  double alert_rate = 0.0;
  double recall = 0.0;
};

/// alpha,n0,tau,overshoot_bound,feasible,density_collapse,test_fpr,alert_rate,recall
void write_crc_sweep_csv(std::ostream& out, std::span<const CrcSweepRow> rows);

}  // namespace flowalert::report

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

#include "flowalert/report.hpp"

#include <ostream>

#include "text.hpp"

namespace flowalert::report {

using text::format_double;

void write_outcomes_csv(std::ostream& out, std::span<const pipeline::FlowOutcome> outcomes) {
  out << "timestamp,s_t,p_t,z_t,level,warmup,label\n";
  for (const auto& o : outcomes) {
    out << format_double(o.timestamp) << ',' << format_double(o.score) << ',' << format_double(o.prob) << ','
        << o.event << ',' << burnrate::to_string(o.level) << ',' << (o.warmup ? 1 : 0) << ',';
    if (o.label) out << *o.label;
    out << '\n';
  }
}

void write_scores_csv(std::ostream& out, std::span<const bocpd::ScoredFlow> scores, const std::string& split,
                      bool header) {
  if (header) out << "timestamp,s_t,label,warmup,split\n";
  for (const auto& s : scores) {
    out << format_double(s.timestamp) << ',' << format_double(s.score) << ',';
    if (s.label) out << *s.label;
    out << ',' << (s.warmup ? 1 : 0) << ',' << split << '\n';
  }
}

void write_alert_log_csv(std::ostream& out, std::span<const pipeline::AlertLogRow> rows,
                         std::span<const burnrate::AlertLevelConfig> levels) {
  out << "timestamp,level";
  for (const auto& l : levels) {
    const auto name = burnrate::to_string(l.level);
    out << ',' << name << "_b_short," << name << "_b_long";
  }
  out << '\n';
  for (const auto& r : rows) {
    out << format_double(r.timestamp) << ',' << burnrate::to_string(r.level);
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (i < r.readings.size()) {
        out << ',' << format_double(r.readings[i].short_burn) << ',' << format_double(r.readings[i].long_burn);
      } else {
        out << ",,";
      }
    }
    out << '\n';
  }
}

void write_ablation_csv(std::ostream& out, std::span<const pipeline::AblationRow> rows) {
  out << "variant,tau,alert_rate,fpr,recall,precision,f1,feasible,density_collapse\n";
  for (const auto& r : rows) {
    out << pipeline::to_string(r.variant) << ',' << (r.tau ? format_double(*r.tau) : std::string("N/A")) << ','
        << format_double(r.alert_rate) << ',' << format_double(r.fpr) << ',' << format_double(r.recall) << ','
        << format_double(r.precision) << ',' << format_double(r.f1) << ',' << (r.feasible ? 1 : 0) << ','
        << (r.density_collapse ? 1 : 0) << '\n';
  }
}

void write_reliability_csv(std::ostream& out, std::span<const metrics::ReliabilityBin> bins) {
  out << "bin_center,confidence,accuracy,count\n";
  for (const auto& b : bins) {
    if (b.count == 0) continue;
    out << format_double(b.center()) << ',' << format_double(b.confidence) << ',' << format_double(b.accuracy)
        << ',' << b.count << '\n';
  }
}

void write_crc_sweep_csv(std::ostream& out, std::span<const CrcSweepRow> rows) {
  out << "alpha,n0,tau,overshoot_bound,feasible,density_collapse,test_fpr,alert_rate,recall\n";
  for (const auto& r : rows) {
    out << format_double(r.alpha) << ',' << r.n0 << ',' << (r.feasible ? format_double(r.tau) : std::string("N/A"))
        << ',' << format_double(r.overshoot_bound) << ',' << (r.feasible ? 1 : 0) << ','
        << (r.density_collapse ? 1 : 0) << ',' << format_double(r.test_fpr) << ',' << format_double(r.alert_rate)
        << ',' << format_double(r.recall) << '\n';
  }
}

}  // namespace flowalert::report

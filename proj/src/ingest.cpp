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

#include "flowalert/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include "flowalert/error.hpp"
#include "text.hpp"

namespace flowalert::ingest {
namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::size_t column_index(const std::unordered_map<std::string, std::size_t>& index,
                         const std::string& name) {
  const auto it = index.find(name);
  if (it == index.end()) fail(ErrorCode::kParse, "column '" + name + "' not found in header");
  return it->second;
}

}  // namespace

FlowStream parse_stream(std::istream& in, const Schema& schema) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::kParse, "missing header row");
  const auto header = text::split_csv_line(line);

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name(text::trim(header[i]));
    if (!index.emplace(name, i).second) fail(ErrorCode::kParse, "duplicate column '" + name + "'");
  }

  const std::size_t ts_col = column_index(index, schema.timestamp_column);
  std::optional<std::size_t> label_col;
  if (!schema.label_column.empty()) label_col = column_index(index, schema.label_column);

  FlowStream stream;
  stream.labeled = label_col.has_value();

  std::vector<std::size_t> feature_cols;
  if (schema.feature_columns.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      const std::string name(text::trim(header[i]));
      if (i == ts_col || (label_col && i == *label_col) || contains(schema.categorical_columns, name) ||
          contains(schema.dropped_columns, name)) {
        continue;
      }
      feature_cols.push_back(i);
      stream.feature_names.push_back(name);
    }
  } else {
    for (const auto& name : schema.feature_columns) {
      if (contains(schema.dropped_columns, name)) continue;
      feature_cols.push_back(column_index(index, name));
      stream.feature_names.push_back(name);
    }
  }
  std::vector<std::size_t> cat_cols;
  for (const auto& name : schema.categorical_columns) {
    if (contains(schema.dropped_columns, name)) continue;
    cat_cols.push_back(column_index(index, name));
    stream.categorical_names.push_back(name);
  }
  for (const auto& name : schema.dropped_columns) column_index(index, name);

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (text::trim(line).empty() || text::trim(line) == "\r") continue;
    ++row;
    const auto cells = text::split_csv_line(line);
    if (cells.size() != header.size()) {
      fail(ErrorCode::kParse, "row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                                  " columns, found " + std::to_string(cells.size()));
    }
    FlowRecord rec;
    const auto ts = text::parse_double(cells[ts_col]);
    if (!ts) fail(ErrorCode::kParse, "row " + std::to_string(row) + ": non-numeric timestamp");
    rec.timestamp = *ts;
    rec.features.reserve(feature_cols.size());
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      const auto v = text::parse_double(cells[feature_cols[k]]);
      if (!v) {
        fail(ErrorCode::kParse, "row " + std::to_string(row) + ": non-numeric value '" + cells[feature_cols[k]] +
                                    "' in feature column '" + stream.feature_names[k] + "'");
      }
      rec.features.push_back(*v);
    }
    for (const auto c : cat_cols) rec.categories.emplace_back(text::trim(cells[c]));
    if (label_col) {
      const auto cell = text::trim(cells[*label_col]);
      const auto v = text::parse_double(cell);
      if (!v || (*v != 0.0 && *v != 1.0)) {
        fail(ErrorCode::kParse, "row " + std::to_string(row) + ": label must be 0 or 1, found '" +
                                    std::string(cell) + "'");
      }
      rec.label = static_cast<int>(*v);
    }
    stream.records.push_back(std::move(rec));
  }
  return stream;
}

FlowStream load_stream(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  return parse_stream(in, schema);
}

std::size_t PreprocessSpec::encoded_dim() const {
  std::size_t d = numeric_dim();
  for (const auto& v : vocabularies) d += v.size();
  return d;
}

PreprocessSpec fit_preprocess(std::span<const FlowRecord> train) {
  require(!train.empty(), ErrorCode::kInvalidArgument, "fit_preprocess: empty training split");
  const std::size_t d = train.front().features.size();
  const std::size_t k = train.front().categories.size();
  PreprocessSpec spec;
  spec.min.assign(d, 0.0);
  spec.max.assign(d, 0.0);
  std::vector<std::set<std::string>> vocab(k);
  for (std::size_t j = 0; j < d; ++j) spec.min[j] = spec.max[j] = train.front().features[j];
  for (const auto& rec : train) {
    require(rec.features.size() == d && rec.categories.size() == k, ErrorCode::kDimension,
            "fit_preprocess: inconsistent record dimension");
    for (std::size_t j = 0; j < d; ++j) {
      spec.min[j] = std::min(spec.min[j], rec.features[j]);
      spec.max[j] = std::max(spec.max[j], rec.features[j]);
    }
    for (std::size_t j = 0; j < k; ++j) vocab[j].insert(rec.categories[j]);
  }
  spec.constant.resize(d);
  for (std::size_t j = 0; j < d; ++j) spec.constant[j] = spec.min[j] == spec.max[j];
  for (auto& v : vocab) spec.vocabularies.emplace_back(v.begin(), v.end());
  return spec;
}

FlowRecord apply_preprocess(const PreprocessSpec& spec, const FlowRecord& rec) {
  require(rec.features.size() == spec.numeric_dim() && rec.categories.size() == spec.vocabularies.size(),
          ErrorCode::kDimension,
          "apply_preprocess: record has " + std::to_string(rec.features.size()) + " numeric / " +
              std::to_string(rec.categories.size()) + " categorical fields, spec expects " +
              std::to_string(spec.numeric_dim()) + " / " + std::to_string(spec.vocabularies.size()));
  FlowRecord out;
  out.timestamp = rec.timestamp;
  out.label = rec.label;
  out.features.reserve(spec.encoded_dim());
  for (std::size_t j = 0; j < spec.numeric_dim(); ++j) {
    if (spec.constant[j]) {
      out.features.push_back(0.0);
      continue;
    }
    const double scaled = (rec.features[j] - spec.min[j]) / (spec.max[j] - spec.min[j]);
    out.features.push_back(std::clamp(scaled, 0.0, 1.0));
  }
  for (std::size_t j = 0; j < spec.vocabularies.size(); ++j) {
    const auto& vocab = spec.vocabularies[j];
    const auto it = std::lower_bound(vocab.begin(), vocab.end(), rec.categories[j]);
    const bool known = it != vocab.end() && *it == rec.categories[j];
    for (std::size_t v = 0; v < vocab.size(); ++v) {
      out.features.push_back(known && static_cast<std::size_t>(it - vocab.begin()) == v ? 1.0 : 0.0);
    }
  }
  return out;
}

std::vector<FlowRecord> apply_preprocess(const PreprocessSpec& spec, std::span<const FlowRecord> recs) {
  std::vector<FlowRecord> out;
  out.reserve(recs.size());
  for (const auto& r : recs) out.push_back(apply_preprocess(spec, r));
  return out;
}

SplitIndices chronological_split(std::size_t n, const SplitRatios& ratios) {
  require(ratios.train > 0 && ratios.validation > 0 && ratios.test > 0, ErrorCode::kInvalidArgument,
          "split ratios must be positive");
  require(n >= 3, ErrorCode::kInvalidArgument, "chronological_split: need at least 3 records");
  const double total = ratios.train + ratios.validation + ratios.test;
  const auto part = [&](double r) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * (r / total) + 1e-9));
  };
  SplitIndices s;
  s.total = n;
  s.train_end = part(ratios.train);
  s.val_end = s.train_end + part(ratios.validation);
  if (s.train_size() == 0 || s.validation_size() == 0 || s.val_end >= n) {
    fail(ErrorCode::kInvalidArgument, "chronological_split: " + std::to_string(n) +
                                          " records leave an empty split (" + std::to_string(s.train_size()) +
                                          "/" + std::to_string(s.validation_size()) + "/" +
                                          std::to_string(n - std::min(n, s.val_end)) + ")");
  }
  return s;
}

SplitIndices chronological_split(std::span<const FlowRecord> sorted, const SplitRatios& ratios) {
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    require(sorted[i - 1].timestamp <= sorted[i].timestamp, ErrorCode::kInvalidArgument,
            "chronological_split: stream not sorted at record " + std::to_string(i));
  }
  return chronological_split(sorted.size(), ratios);
}

void sort_chronologically(std::vector<FlowRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const FlowRecord& a, const FlowRecord& b) { return a.timestamp < b.timestamp; });
}

std::vector<FlowRecord> round_robin_merge(const std::vector<std::vector<FlowRecord>>& sources,
                                          double minutes_per_flow) {
  std::vector<FlowRecord> out;
  std::size_t total = 0;
  for (const auto& s : sources) total += s.size();
  out.reserve(total);
  std::vector<std::size_t> cursor(sources.size(), 0);
  while (out.size() < total) {
    for (std::size_t k = 0; k < sources.size(); ++k) {
      if (cursor[k] < sources[k].size()) out.push_back(sources[k][cursor[k]++]);
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].timestamp = static_cast<double>(i) * minutes_per_flow;
  return out;
}

void write_stream_csv(std::ostream& out, const FlowStream& stream, const std::string& label_column) {
  out << "timestamp";
  for (const auto& n : stream.feature_names) out << ',' << n;
  for (const auto& n : stream.categorical_names) out << ',' << n;
  if (stream.labeled) out << ',' << label_column;
  out << '\n';
  for (const auto& r : stream.records) {
    out << text::format_double(r.timestamp);
    for (const double v : r.features) out << ',' << text::format_double(v);
    for (const auto& c : r.categories) out << ',' << c;
    if (stream.labeled) out << ',' << (r.label.value_or(0));
    out << '\n';
  }
}

}  // namespace flowalert::ingest

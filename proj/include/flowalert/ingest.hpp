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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flowalert::ingest {

/// One flow observation. `categories` holds raw categorical cells until the
/// record passes through apply_preprocess, which folds them into `features`.
struct FlowRecord {
  double timestamp = 0.0;  // event time, fractional minutes
  std::vector<double> features;
  std::vector<std::string> categories;
  std::optional<int> label;  // 0 benign, 1 attack
};

/// Column roles. An empty feature list means "every column not claimed by
/// another role".
struct Schema {
  std::string timestamp_column = "timestamp";
  std::string label_column;  // empty: unlabeled stream
  std::vector<std::string> feature_columns;
  std::vector<std::string> categorical_columns;
  std::vector<std::string> dropped_columns;
};

struct FlowStream {
  std::vector<std::string> feature_names;
  std::vector<std::string> categorical_names;
  std::vector<FlowRecord> records;
  bool labeled = false;

  std::size_t dim() const { return feature_names.size(); }
};

FlowStream parse_stream(std::istream& in, const Schema& schema);
FlowStream load_stream(const std::filesystem::path& path, const Schema& schema);

/// Train-fitted scaling and one-hot vocabularies.
struct PreprocessSpec {
  std::vector<double> min;
  std::vector<double> max;
  std::vector<bool> constant;  // min == max; such features always map to 0.0
  std::vector<std::vector<std::string>> vocabularies;  // sorted, one per categorical column
  std::vector<std::string> dropped;

  std::size_t numeric_dim() const { return min.size(); }
  std::size_t encoded_dim() const;
};

PreprocessSpec fit_preprocess(std::span<const FlowRecord> train);
FlowRecord apply_preprocess(const PreprocessSpec& spec, const FlowRecord& rec);
std::vector<FlowRecord> apply_preprocess(const PreprocessSpec& spec, std::span<const FlowRecord> recs);

struct SplitRatios {
  double train = 0.70;
  double validation = 0.15;
  double test = 0.15;
};

/// Half-open ranges [0, train_end), [train_end, val_end), [val_end, total).
struct SplitIndices {
  std::size_t train_end = 0;
  std::size_t val_end = 0;
  std::size_t total = 0;

  std::size_t train_size() const { return train_end; }
  std::size_t validation_size() const { return val_end - train_end; }
  std::size_t test_size() const { return total - val_end; }
};

/// Floor for train and validation, remainder to test. Every part must be
/// non-empty.
SplitIndices chronological_split(std::size_t n, const SplitRatios& ratios = {});
SplitIndices chronological_split(std::span<const FlowRecord> sorted, const SplitRatios& ratios = {});

void sort_chronologically(std::vector<FlowRecord>& records);

/// Interleaves sources by taking one record from each in turn, skipping
/// exhausted sources, and re-stamps the result at a fixed spacing.
std::vector<FlowRecord> round_robin_merge(const std::vector<std::vector<FlowRecord>>& sources,
                                          double minutes_per_flow);

void write_stream_csv(std::ostream& out, const FlowStream& stream, const std::string& label_column = "label");

}  // namespace flowalert::ingest

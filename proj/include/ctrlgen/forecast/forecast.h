// Copyright 2026 The ctrlgen Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Batch decoding over sampled or systematically varied tables, with
// summaries of which control states appear where and what they verbalize.
#ifndef CTRLGEN_FORECAST_FORECAST_H_
#define CTRLGEN_FORECAST_FORECAST_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctrlgen/constraint/dfa.h"
#include "ctrlgen/core/codec.h"
#include "ctrlgen/decode/beam_search.h"

namespace ctrlgen {

struct ForecastTuple {
  DataTable table;
  // Empty exactly when the constrained decode found no output.
  std::optional<GenerationResult> result;
  bool feasible() const { return result.has_value(); }
};

// counts[t][z]: outputs whose state at position t is z.
struct StateHeatmap {
  int num_states = 0;
  int max_length = 0;
  std::vector<std::vector<int>> counts;
};

struct ForecastOptions {
  DecodeOptions decode;
  // Worker threads; results do not depend on it. 0 picks the hardware count.
  int threads = 0;
  std::size_t range_cap = 512;
};

// Decodes each table on a worker pool; output order follows input and does
// not depend on the thread count.
std::vector<ForecastTuple> DecodeTables(const ModelParams& params,
                                        const ConstraintDfa* dfa,
                                        std::vector<DataTable> tables,
                                        const ForecastOptions& options);

struct GlobalForecast {
  std::vector<ForecastTuple> tuples;
  StateHeatmap heatmap;
};

// Decodes n tables drawn from `test_set`: without replacement when
// n <= |test_set|, with replacement otherwise. Deterministic per seed.
// Throws DomainError for n < 1 or an empty test set.
GlobalForecast ForecastGlobal(const ModelParams& params, const ConstraintDfa* dfa,
                              const std::vector<Example>& test_set, int n,
                              std::uint64_t seed, const ForecastOptions& options);

using ValueRanges = std::vector<std::pair<std::string, std::vector<std::string>>>;

// Parses "day=1..28;month=9|10" into ranges. Integer spans are inclusive.
// Throws DomainError on malformed specs.
ValueRanges ParseRangeSpec(std::string_view spec);

// One tuple per element of the cartesian product of `ranges` substituted
// into `base`, the first range varying slowest. Throws SchemaError for a
// field missing from `base`, DomainError for an empty value list and
// RangeTooLarge past options.range_cap.
std::vector<ForecastTuple> ForecastRange(const ModelParams& params,
                                         const ConstraintDfa* dfa,
                                         const DataTable& base,
                                         const ValueRanges& ranges,
                                         const ForecastOptions& options);

StateHeatmap BuildHeatmap(const std::vector<ForecastTuple>& tuples, int num_states);

struct StateAlignment {
  // Field -> tokens in this state that the string-match alignment assigns
  // to the field.
  std::map<std::string, int> field_counts;
  // Most frequent tokens, count descending then token ascending.
  std::vector<std::pair<std::string, int>> top_tokens;
  int total = 0;  // tokens in this state
};

struct AlignmentSummary {
  std::vector<StateAlignment> states;  // indexed by control state
};

// Texts with states: decoded tuples use their own states; examples use the
// inference network's Viterbi states for the reference text.
AlignmentSummary SummarizeAlignment(const ModelParams& params,
                                    const std::vector<Example>& examples,
                                    std::size_t top_k = 10);
AlignmentSummary SummarizeAlignment(const ModelParams& params,
                                    const std::vector<ForecastTuple>& tuples,
                                    std::size_t top_k = 10);

Json TupleToJson(const ForecastTuple& tuple);
Json HeatmapToJson(const StateHeatmap& heatmap);
Json AlignmentSummaryToJson(const AlignmentSummary& summary);

}  // namespace ctrlgen

#endif  // CTRLGEN_FORECAST_FORECAST_H_

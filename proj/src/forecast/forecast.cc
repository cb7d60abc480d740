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

#include "ctrlgen/forecast/forecast.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <numeric>
#include <thread>

#include "ctrlgen/core/errors.h"
#include "ctrlgen/core/random.h"
#include "ctrlgen/data/table_dataset.h"
#include "ctrlgen/infer/inference_network.h"

namespace ctrlgen {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitOn(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

ForecastTuple DecodeOne(const ModelParams& params, const ConstraintDfa* dfa,
                        DataTable table, const DecodeOptions& options) {
  ForecastTuple t{std::move(table), std::nullopt};
  try {
    t.result = dfa ? ConstrainedGenerate(params, t.table, *dfa, options)
                   : FreeGenerate(params, t.table, options);
  } catch (const NoFeasibleOutput&) {
    return t;
  }
  if (dfa && !dfa->Accepts(t.result->states)) {
    throw ConstraintViolation("decoded states " + t.result->states.ToLetters() +
                              " are rejected by the constraint");
  }
  return t;
}

AlignmentSummary Summarize(int num_states,
                           const std::vector<const DataTable*>& tables,
                           const std::vector<std::vector<std::string>>& texts,
                           const std::vector<ControlStateSeq>& states,
                           std::size_t top_k) {
  AlignmentSummary s;
  s.states.resize(num_states);
  std::vector<std::map<std::string, int>> freq(num_states);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    auto labels = HeuristicAlign(*tables[i], texts[i]);
    for (std::size_t t = 0; t < texts[i].size(); ++t) {
      StateId z = states[i][t];
      if (z < 0 || z >= num_states) continue;
      ++s.states[z].total;
      ++freq[z][texts[i][t]];
      if (labels[t]) ++s.states[z].field_counts[*labels[t]];
    }
  }
  for (int z = 0; z < num_states; ++z) {
    auto& top = s.states[z].top_tokens;
    top.assign(freq[z].begin(), freq[z].end());
    std::stable_sort(top.begin(), top.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (top.size() > top_k) top.resize(top_k);
  }
  return s;
}

}  // namespace

std::vector<ForecastTuple> DecodeTables(const ModelParams& params,
                                     const ConstraintDfa* dfa,
                                     std::vector<DataTable> tables,
                                     const ForecastOptions& options) {
  const std::size_t n = tables.size();
  std::vector<std::optional<ForecastTuple>> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = DecodeOne(params, dfa, std::move(tables[i]), options.decode);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  int threads = options.threads > 0
                    ? options.threads
                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = static_cast<int>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  std::vector<ForecastTuple> tuples;
  tuples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    tuples.push_back(std::move(*out[i]));
  }
  return tuples;
}

GlobalForecast ForecastGlobal(const ModelParams& params, const ConstraintDfa* dfa,
                              const std::vector<Example>& test_set, int n,
                              std::uint64_t seed, const ForecastOptions& options) {
  if (n < 1) throw DomainError("forecast size must be >= 1");
  if (test_set.empty()) throw DomainError("forecast test set is empty");
  Rng rng(seed);
  std::vector<DataTable> tables;
  if (static_cast<std::size_t>(n) <= test_set.size()) {
    std::vector<std::size_t> idx(test_set.size());
    std::iota(idx.begin(), idx.end(), 0);
    rng.Shuffle(idx);
    for (int i = 0; i < n; ++i) tables.push_back(test_set[idx[i]].table);
  } else {
    for (int i = 0; i < n; ++i) {
      auto j = rng.UniformInt(0, static_cast<std::int64_t>(test_set.size()) - 1);
      tables.push_back(test_set[static_cast<std::size_t>(j)].table);
    }
  }
  GlobalForecast g;
  g.tuples = DecodeTables(params, dfa, std::move(tables), options);
  g.heatmap = BuildHeatmap(g.tuples, params.num_states());
  return g;
}

ValueRanges ParseRangeSpec(std::string_view spec) {
  ValueRanges out;
  if (Trim(spec).empty()) return out;
  for (std::string_view part : SplitOn(spec, ';')) {
    part = Trim(part);
    std::size_t eq = part.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw DomainError("range '" + std::string(part) + "' lacks field=values");
    }
    std::string field(Trim(part.substr(0, eq)));
    std::string_view values = Trim(part.substr(eq + 1));
    std::vector<std::string> list;
    std::size_t dots = values.find("..");
    if (dots != std::string_view::npos) {
      int lo = 0, hi = 0;
      try {
        std::size_t a = 0, b = 0;
        std::string los(values.substr(0, dots)), his(values.substr(dots + 2));
        lo = std::stoi(los, &a);
        hi = std::stoi(his, &b);
        if (a != los.size() || b != his.size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw DomainError("bad integer span '" + std::string(values) + "'");
      }
      if (hi < lo) throw DomainError("empty integer span '" + std::string(values) + "'");
      for (int v = lo; v <= hi; ++v) list.push_back(std::to_string(v));
    } else {
      for (std::string_view v : SplitOn(values, '|')) {
        v = Trim(v);
        if (v.empty()) throw DomainError("empty value in range for '" + field + "'");
        list.emplace_back(v);
      }
    }
    out.emplace_back(std::move(field), std::move(list));
  }
  return out;
}

std::vector<ForecastTuple> ForecastRange(const ModelParams& params,
                                         const ConstraintDfa* dfa,
                                         const DataTable& base,
                                         const ValueRanges& ranges,
                                         const ForecastOptions& options) {
  std::size_t total = 1;
  for (const auto& [field, values] : ranges) {
    if (!base.Has(field)) throw SchemaError("range field '" + field + "' not in table");
    if (values.empty()) throw DomainError("range for '" + field + "' is empty");
    total *= values.size();
    if (total > options.range_cap) {
      throw RangeTooLarge("range product exceeds the cap of " +
                          std::to_string(options.range_cap) + " tables");
    }
  }
  std::vector<DataTable> tables;
  std::vector<std::size_t> digit(ranges.size(), 0);
  for (std::size_t k = 0; k < total; ++k) {
    DataTable t = base;
    for (std::size_t r = 0; r < ranges.size(); ++r) {
      t = t.WithValue(ranges[r].first, ranges[r].second[digit[r]]);
    }
    tables.push_back(std::move(t));
    // Odometer, last range fastest.
    for (std::size_t r = ranges.size(); r-- > 0;) {
      if (++digit[r] < ranges[r].second.size()) break;
      digit[r] = 0;
    }
  }
  return DecodeTables(params, dfa, std::move(tables), options);
}

StateHeatmap BuildHeatmap(const std::vector<ForecastTuple>& tuples, int num_states) {
  StateHeatmap h;
  h.num_states = num_states;
  for (const auto& t : tuples) {
    if (t.result) {
      h.max_length = std::max(h.max_length, static_cast<int>(t.result->states.size()));
    }
  }
  h.counts.assign(h.max_length, std::vector<int>(num_states, 0));
  for (const auto& t : tuples) {
    if (!t.result) continue;
    const auto& z = t.result->states;
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (z[i] >= 0 && z[i] < num_states) ++h.counts[i][z[i]];
    }
  }
  return h;
}

AlignmentSummary SummarizeAlignment(const ModelParams& params,
                                    const std::vector<Example>& examples,
                                    std::size_t top_k) {
  std::vector<const DataTable*> tables;
  std::vector<std::vector<std::string>> texts;
  std::vector<ControlStateSeq> states;
  for (const Example& e : examples) {
    if (e.tokens.empty()) continue;
    tables.push_back(&e.table);
    texts.push_back(e.tokens);
    states.push_back(InferStates(params, e.table, e.tokens));
  }
  return Summarize(params.num_states(), tables, texts, states, top_k);
}

AlignmentSummary SummarizeAlignment(const ModelParams& params,
                                    const std::vector<ForecastTuple>& tuples,
                                    std::size_t top_k) {
  std::vector<const DataTable*> tables;
  std::vector<std::vector<std::string>> texts;
  std::vector<ControlStateSeq> states;
  for (const ForecastTuple& t : tuples) {
    if (!t.result) continue;
    tables.push_back(&t.table);
    texts.push_back(t.result->tokens);
    states.push_back(t.result->states);
  }
  return Summarize(params.num_states(), tables, texts, states, top_k);
}

Json TupleToJson(const ForecastTuple& t) {
  Json j{{"table", TableToJson(t.table)}, {"feasible", t.feasible()}};
  j["result"] = t.result ? GenerationToJson(*t.result) : Json(nullptr);
  return j;
}

Json HeatmapToJson(const StateHeatmap& h) {
  return Json{{"num_states", h.num_states},
              {"max_length", h.max_length},
              {"counts", h.counts}};
}

Json AlignmentSummaryToJson(const AlignmentSummary& s) {
  Json states = Json::array();
  for (std::size_t z = 0; z < s.states.size(); ++z) {
    const StateAlignment& a = s.states[z];
    Json top = Json::array();
    for (const auto& [tok, n] : a.top_tokens) top.push_back({{"token", tok}, {"count", n}});
    states.push_back({{"state", std::string(1, static_cast<char>('A' + z))},
                      {"total", a.total},
                      {"fields", a.field_counts},
                      {"top_tokens", top}});
  }
  return Json{{"states", states}};
}

}  // namespace ctrlgen

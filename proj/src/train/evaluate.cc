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

#include "ctrlgen/train/evaluate.h"

#include <algorithm>

#include "ctrlgen/core/errors.h"
#include "ctrlgen/infer/inference_network.h"

namespace ctrlgen {

Json MetricsToJson(const EvalMetrics& m) {
  Json j{{"count", m.count},
         {"exact_match", m.exact_match},
         {"token_accuracy", m.token_accuracy},
         {"constraint_satisfaction_rate", m.constraint_satisfaction_rate},
         {"infeasible", m.infeasible}};
  j["state_accuracy"] = m.state_accuracy ? Json(*m.state_accuracy) : Json(nullptr);
  return j;
}

EvalMetrics Evaluate(const ModelParams& params, const std::vector<Example>& dataset,
                     const ConstraintDfa* dfa, const DecodeOptions& options) {
  if (dataset.empty()) throw DomainError("evaluation set is empty");
  EvalMetrics m;
  long exact = 0, token_hits = 0, token_total = 0, decoded = 0, satisfied = 0;
  long state_hits = 0, state_total = 0;
  for (const Example& e : dataset) {
    ++m.count;
    std::vector<std::string> out;
    bool feasible = true;
    try {
      GenerationResult r = dfa ? ConstrainedGenerate(params, e.table, *dfa, options)
                               : FreeGenerate(params, e.table, options);
      out = r.tokens;
      ++decoded;
      if (!dfa || dfa->Accepts(r.states)) ++satisfied;
    } catch (const NoFeasibleOutput&) {
      feasible = false;
      ++m.infeasible;
    }
    exact += feasible && out == e.tokens;
    std::size_t n = std::max(out.size(), e.tokens.size());
    for (std::size_t t = 0; t < std::min(out.size(), e.tokens.size()); ++t) {
      token_hits += out[t] == e.tokens[t];
    }
    token_total += static_cast<long>(n);
    if (e.states) {
      ControlStateSeq z = InferStates(params, e.table, e.tokens);
      for (std::size_t t = 0; t < z.size(); ++t) state_hits += z[t] == (*e.states)[t];
      state_total += static_cast<long>(z.size());
    }
  }
  m.exact_match = static_cast<double>(exact) / m.count;
  m.token_accuracy =
      token_total ? static_cast<double>(token_hits) / static_cast<double>(token_total)
                  : 0.0;
  if (state_total > 0) {
    m.state_accuracy = static_cast<double>(state_hits) / static_cast<double>(state_total);
  }
  if (decoded > 0) {
    m.constraint_satisfaction_rate =
        static_cast<double>(satisfied) / static_cast<double>(decoded);
  }
  return m;
}

}  // namespace ctrlgen

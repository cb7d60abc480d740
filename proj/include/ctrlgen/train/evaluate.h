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

#ifndef CTRLGEN_TRAIN_EVALUATE_H_
#define CTRLGEN_TRAIN_EVALUATE_H_

#include <optional>
#include <vector>

#include "ctrlgen/constraint/dfa.h"
#include "ctrlgen/core/codec.h"
#include "ctrlgen/decode/beam_search.h"
#include "ctrlgen/model/params.h"

namespace ctrlgen {

struct EvalMetrics {
  int count = 0;
  // Decoded tokens equal the reference.
  double exact_match = 0.0;
  // Position-wise token matches over the longer of output and reference,
  // pooled over the dataset.
  double token_accuracy = 0.0;
  // Inference-network Viterbi states on the reference vs gold states, over
  // examples that carry gold states.
  std::optional<double> state_accuracy;
  // Share of decoded outputs accepted by the constraint; 1 without one.
  double constraint_satisfaction_rate = 1.0;
  // Examples for which the constrained decode found no output. They count
  // as misses for exact_match and token_accuracy.
  int infeasible = 0;
};

Json MetricsToJson(const EvalMetrics& m);

// Decodes every example (constrained when `dfa` is set) and scores it.
// Throws DomainError on an empty dataset.
EvalMetrics Evaluate(const ModelParams& params, const std::vector<Example>& dataset,
                     const ConstraintDfa* dfa, const DecodeOptions& options);

}  // namespace ctrlgen

#endif  // CTRLGEN_TRAIN_EVALUATE_H_

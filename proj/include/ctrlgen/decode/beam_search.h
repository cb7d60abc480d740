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

#ifndef CTRLGEN_DECODE_BEAM_SEARCH_H_
#define CTRLGEN_DECODE_BEAM_SEARCH_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctrlgen/constraint/dfa.h"
#include "ctrlgen/core/codec.h"
#include "ctrlgen/core/types.h"
#include "ctrlgen/model/params.h"

namespace ctrlgen {

struct DecodeOptions {
  int beam_width = 5;
  // Upper bound on output length counting the closing EOS, so at most
  // max_len - 1 words (prefix included).
  int max_len = 40;
  bool capture_tree = false;
};

// Search tree of one decode. Nodes alternate between state choices and word
// choices below a "<bos>" root; `lp` is the cumulative log-probability at
// the node. The terminal choice is the state "<end>" followed by "<eos>".
struct BeamTreeNode {
  enum class Kind { kState, kWord };
  std::string sym;
  Kind kind = Kind::kWord;
  double lp = 0.0;
  bool on_beam = false;
  std::vector<BeamTreeNode> children;
};

struct GenerationResult {
  std::vector<TokenId> token_ids;
  std::vector<std::string> tokens;
  ControlStateSeq states;
  double log_prob = 0.0;
  // log p(z_t) + log p(y_t | z_t) per word, then the terminal step.
  std::vector<double> step_log_probs;
  // False only when the search ended without any hypothesis emitting EOS.
  bool finished = true;
  std::optional<BeamTreeNode> tree;
};

using ForcedStep = std::pair<StateId, TokenId>;

// Approximate argmax over (y, z) by beam search. Finished hypotheses leave
// the pool; live ones are pruned to beam_width each step.
GenerationResult FreeGenerate(const ModelParams& params, const DataTable& table,
                              const DecodeOptions& options);

// As FreeGenerate with states restricted to paths of `dfa`; EOS only in accepting DFA
// states. Throws NoFeasibleOutput when no hypothesis finishes within
// max_len.
GenerationResult ConstrainedGenerate(const ModelParams& params,
                                     const DataTable& table,
                                     const ConstraintDfa& dfa,
                                     const DecodeOptions& options);

// Decodes after a forced (state, word) prefix. DomainError for invalid ids,
// ConstraintViolation when the prefix leaves the DFA.
GenerationResult ForcedGenerate(const ModelParams& params,
                                const DataTable& table,
                                const std::vector<ForcedStep>& prefix,
                                const ConstraintDfa* dfa,
                                const DecodeOptions& options);

// Drops all but the best `keep` children of every node, always retaining
// on-beam children.
void TrimBeamTree(BeamTreeNode& node, std::size_t keep);

Json BeamTreeToJson(const BeamTreeNode& node);
Json GenerationToJson(const GenerationResult& result);

}  // namespace ctrlgen

#endif  // CTRLGEN_DECODE_BEAM_SEARCH_H_

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

#ifndef CTRLGEN_MODEL_JOINT_MODEL_H_
#define CTRLGEN_MODEL_JOINT_MODEL_H_

#include <vector>

#include "ctrlgen/autodiff/tape.h"
#include "ctrlgen/core/types.h"
#include "ctrlgen/model/gru.h"
#include "ctrlgen/model/params.h"

namespace ctrlgen {

// Per-cell encodings of one table.
struct EncodedInput {
  Mat cells;    // H x n, column i encodes table entry i
  Vec pooled;   // mean of the cells
  // Word ids of each cell's value tokens that exist in the word vocabulary;
  // feeds the copy distribution.
  std::vector<std::vector<TokenId>> copy_tokens;
};

// Recurrent state before emitting word t (0-based). Refers to the encoded
// input, which must outlive it.
struct DecoderState {
  Vec hidden;
  int t = 0;
  const EncodedInput* input = nullptr;
};

// Attention readout at a decoder state: features o = [h ; context].
struct StepView {
  Vec features;
  Vec attention;
};

// Throws SchemaError for fields the model has never seen and DomainError
// for an empty table.
EncodedInput EncodeTable(const ModelParams& params, const DataTable& table);
DecoderState InitialState(const ModelParams& params, const EncodedInput& input);
StepView Observe(const ModelParams& params, const DecoderState& state);

// K+1 logits; index K is the terminal state. NumericalError when the hidden
// state is not finite.
Vec StateLogits(const ModelParams& params, const DecoderState& state);
Vec StateLogProbs(const ModelParams& params, const StepView& view);

// Word-head logits W1 (o + g(z)) + b1 with BOS/EOS masked to -inf.
// DomainError unless 0 <= z < K.
Vec WordLogits(const ModelParams& params, const DecoderState& state, StateId z);
// Log-probabilities over the vocabulary for state z, including the copy
// mixture when enabled.
Vec WordLogProbs(const ModelParams& params, const DecoderState& state,
                 const StepView& view, StateId z);

// Consumes (z, y): h' = GRU([emb(y) ; g_emb(z) ; context], h).
DecoderState Advance(const ModelParams& params, const DecoderState& state,
                     const StepView& view, StateId z, TokenId y);
DecoderState Advance(const ModelParams& params, const DecoderState& state,
                     StateId z, TokenId y);

struct StepScores {
  double total = 0.0;
  // log p(z_t) + log p(y_t | z_t) per word, then the terminal step.
  std::vector<double> steps;
};

// log p(y, z | x) including the terminal EOS step. DomainError on length
// mismatch or invalid ids.
StepScores ScoreSequenceSteps(const ModelParams& params,
                                 const DataTable& table,
                                 const std::vector<TokenId>& words,
                                 const std::vector<StateId>& states);
double ScoreSequence(const ModelParams& params, const DataTable& table,
                     const std::vector<TokenId>& words,
                     const std::vector<StateId>& states);

// Records -log p(y, z | x) on a tape under teacher forcing.
ad::Var JointNegLogLikelihood(ad::Tape& tape, const ParamBinding& params,
                              const DataTable& table,
                              const std::vector<TokenId>& words,
                              const std::vector<StateId>& states);

}  // namespace ctrlgen

#endif  // CTRLGEN_MODEL_JOINT_MODEL_H_

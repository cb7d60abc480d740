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

#include "ctrlgen/model/joint_model.h"

#include <cmath>
#include <limits>
#include <string>

#include "ctrlgen/core/errors.h"
#include "ctrlgen/core/tokenize.h"

namespace ctrlgen {
namespace {

struct CellInputs {
  int field = 0;
  std::vector<TokenId> value_ids;
  std::vector<TokenId> copy_ids;
};

std::vector<CellInputs> ResolveCells(const ModelParams& params,
                                     const DataTable& table) {
  if (table.empty()) throw DomainError("cannot encode an empty table");
  std::vector<CellInputs> cells;
  cells.reserve(table.size());
  for (const auto& [field, value] : table.entries()) {
    auto id = params.fields().Find(field);
    if (!id) throw SchemaError("unknown field '" + field + "'");
    CellInputs c;
    c.field = *id;
    for (const auto& tok : Tokenize(value)) {
      c.value_ids.push_back(params.values().Lookup(tok));
      if (params.words().Contains(tok)) {
        c.copy_ids.push_back(params.words().Lookup(tok));
      }
    }
    if (c.value_ids.empty()) c.value_ids.push_back(Vocabulary::kUnk);
    cells.push_back(std::move(c));
  }
  return cells;
}

void CheckState(const ModelParams& params, StateId z) {
  if (z < 0 || z >= params.num_states()) {
    throw DomainError("control state " + std::to_string(z) +
                      " outside 0.." + std::to_string(params.num_states() - 1));
  }
}

void CheckWord(const ModelParams& params, TokenId y) {
  if (y < 0 || y >= params.words().size() || !Vocabulary::IsEmittable(y)) {
    throw DomainError("word id " + std::to_string(y) + " is not emittable");
  }
}

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Vec LogSoftmax(const Vec& z) {
  double m = z.maxCoeff();
  double lse = m + std::log((z.array() - m).exp().sum());
  return (z.array() - lse).matrix();
}

}  // namespace

EncodedInput EncodeTable(const ModelParams& params, const DataTable& table) {
  std::vector<CellInputs> resolved = ResolveCells(params, table);
  const int e = params.config().embed_dim;
  const Mat& field_emb = params[Tensor::kFieldEmb];
  const Mat& value_emb = params[Tensor::kValueEmb];
  EncodedInput out;
  out.cells.resize(params.config().hidden_dim,
                   static_cast<Eigen::Index>(resolved.size()));
  Vec in(2 * e);
  for (std::size_t i = 0; i < resolved.size(); ++i) {
    const CellInputs& c = resolved[i];
    in.head(e) = field_emb.col(c.field);
    Vec mean = Vec::Zero(e);
    for (TokenId v : c.value_ids) mean += value_emb.col(v);
    in.tail(e) = mean / static_cast<double>(c.value_ids.size());
    out.cells.col(static_cast<Eigen::Index>(i)) =
        (params[Tensor::kCellW] * in + params[Tensor::kCellB].col(0))
            .array()
            .tanh()
            .matrix();
    out.copy_tokens.push_back(c.copy_ids);
  }
  out.pooled = out.cells.rowwise().mean();
  return out;
}

DecoderState InitialState(const ModelParams& params, const EncodedInput& input) {
  DecoderState s;
  s.hidden = (params[Tensor::kInitW] * input.pooled +
              params[Tensor::kInitB].col(0))
                 .array()
                 .tanh()
                 .matrix();
  s.t = 0;
  s.input = &input;
  return s;
}

StepView Observe(const ModelParams& params, const DecoderState& state) {
  if (!state.hidden.allFinite()) {
    throw NumericalError("decoder hidden state is not finite at step " +
                         std::to_string(state.t));
  }
  const Mat& cells = state.input->cells;
  Vec scores = cells.transpose() * state.hidden;
  Vec alpha = (scores.array() - scores.maxCoeff()).exp().matrix();
  alpha /= alpha.sum();
  const Eigen::Index h = params.config().hidden_dim;
  StepView v;
  v.features.resize(2 * h);
  v.features.head(h) = state.hidden;
  v.features.tail(h) = cells * alpha;
  v.attention = std::move(alpha);
  return v;
}

Vec StateLogits(const ModelParams& params, const DecoderState& state) {
  StepView v = Observe(params, state);
  return params[Tensor::kStateW] * v.features + params[Tensor::kStateB].col(0);
}

Vec StateLogProbs(const ModelParams& params, const StepView& view) {
  return LogSoftmax(params[Tensor::kStateW] * view.features +
                    params[Tensor::kStateB].col(0));
}

namespace {

Vec WordLogitsFromView(const ModelParams& params, const StepView& view,
                       StateId z) {
  CheckState(params, z);
  Vec in = view.features + params[Tensor::kStateG].col(z);
  Vec logits = params[Tensor::kWordW] * in + params[Tensor::kWordB].col(0);
  return logits + params.word_mask();
}

}  // namespace

Vec WordLogits(const ModelParams& params, const DecoderState& state, StateId z) {
  return WordLogitsFromView(params, Observe(params, state), z);
}

Vec WordLogProbs(const ModelParams& params, const DecoderState& state,
                 const StepView& view, StateId z) {
  Vec logp = LogSoftmax(WordLogitsFromView(params, view, z));
  if (!params.config().copy) return logp;
  const auto& copy_tokens = state.input->copy_tokens;
  double denom = 0.0;
  Vec copy = Vec::Zero(logp.size());
  for (std::size_t i = 0; i < copy_tokens.size(); ++i) {
    if (copy_tokens[i].empty()) continue;
    double a = view.attention(static_cast<Eigen::Index>(i));
    denom += a;
    double share = a / static_cast<double>(copy_tokens[i].size());
    for (TokenId w : copy_tokens[i]) copy(w) += share;
  }
  if (denom <= 0.0) return logp;
  copy /= denom;
  double gate = Sigmoid((params[Tensor::kCopyW] * view.features)(0) +
                        params[Tensor::kCopyB](0, 0));
  Vec p = gate * logp.array().exp().matrix() + (1.0 - gate) * copy;
  return p.array().log().matrix();
}

DecoderState Advance(const ModelParams& params, const DecoderState& state,
                     const StepView& view, StateId z, TokenId y) {
  CheckState(params, z);
  CheckWord(params, y);
  const Eigen::Index e = params.config().embed_dim;
  const Eigen::Index h = params.config().hidden_dim;
  Vec x(2 * e + h);
  x.head(e) = params[Tensor::kWordEmb].col(y);
  x.segment(e, e) = params[Tensor::kStateEmb].col(z);
  x.tail(h) = view.features.tail(h);
  DecoderState next;
  next.hidden = GruStep(params[Tensor::kGruWx], params[Tensor::kGruWh],
                        params[Tensor::kGruBx], params[Tensor::kGruBh], x,
                        state.hidden);
  next.t = state.t + 1;
  next.input = state.input;
  return next;
}

DecoderState Advance(const ModelParams& params, const DecoderState& state,
                     StateId z, TokenId y) {
  return Advance(params, state, Observe(params, state), z, y);
}

StepScores ScoreSequenceSteps(const ModelParams& params,
                                 const DataTable& table,
                                 const std::vector<TokenId>& words,
                                 const std::vector<StateId>& states) {
  if (words.size() != states.size()) {
    throw DomainError("sequence has " + std::to_string(words.size()) +
                      " words but " + std::to_string(states.size()) +
                      " states");
  }
  EncodedInput input = EncodeTable(params, table);
  DecoderState s = InitialState(params, input);
  StepScores out;
  for (std::size_t t = 0; t < words.size(); ++t) {
    CheckState(params, states[t]);
    CheckWord(params, words[t]);
    StepView v = Observe(params, s);
    double lp = StateLogProbs(params, v)(states[t]) +
                WordLogProbs(params, s, v, states[t])(words[t]);
    out.steps.push_back(lp);
    out.total += lp;
    s = Advance(params, s, v, states[t], words[t]);
  }
  double end = StateLogProbs(params, Observe(params, s))(params.terminal_state());
  out.steps.push_back(end);
  out.total += end;
  return out;
}

double ScoreSequence(const ModelParams& params, const DataTable& table,
                     const std::vector<TokenId>& words,
                     const std::vector<StateId>& states) {
  return ScoreSequenceSteps(params, table, words, states).total;
}

ad::Var JointNegLogLikelihood(ad::Tape& tape, const ParamBinding& bind,
                              const DataTable& table,
                              const std::vector<TokenId>& words,
                              const std::vector<StateId>& states) {
  const ModelParams& params = bind.params();
  if (words.size() != states.size()) {
    throw DomainError("sequence has " + std::to_string(words.size()) +
                      " words but " + std::to_string(states.size()) +
                      " states");
  }
  std::vector<CellInputs> resolved = ResolveCells(params, table);

  std::vector<ad::Var> cells;
  std::vector<ad::Var> parts;
  for (const CellInputs& c : resolved) {
    parts.clear();
    for (TokenId v : c.value_ids) {
      parts.push_back(tape.Column(bind(Tensor::kValueEmb), v));
    }
    ad::Var in = tape.Concat(
        {tape.Column(bind(Tensor::kFieldEmb), c.field), tape.Mean(parts)});
    cells.push_back(
        tape.Tanh(tape.Affine(bind(Tensor::kCellW), bind(Tensor::kCellB), in)));
  }
  ad::Var hidden = tape.Tanh(tape.Affine(bind(Tensor::kInitW),
                                         bind(Tensor::kInitB), tape.Mean(cells)));

  // Copy bookkeeping: which cells offer copyable tokens.
  const bool copy = params.config().copy;
  Vec has_copy = Vec::Zero(static_cast<Eigen::Index>(resolved.size()));
  for (std::size_t i = 0; i < resolved.size(); ++i) {
    if (!resolved[i].copy_ids.empty()) has_copy(static_cast<Eigen::Index>(i)) = 1.0;
  }
  const bool use_copy = copy && has_copy.sum() > 0.0;
  ad::Var has_copy_var = use_copy ? tape.Constant(has_copy) : ad::Var{};

  std::vector<ad::Var> terms;
  std::vector<ad::Var> scores(cells.size());
  auto observe = [&](ad::Var hid, ad::Var* alpha, ad::Var* context) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      scores[i] = tape.Dot(hid, cells[i]);
    }
    *alpha = tape.Softmax(tape.Concat(scores));
    *context = tape.WeightedSum(*alpha, cells);
    return tape.Concat({hid, *context});
  };

  for (std::size_t t = 0; t < words.size(); ++t) {
    const StateId z = states[t];
    const TokenId y = words[t];
    CheckState(params, z);
    CheckWord(params, y);
    ad::Var alpha, context;
    ad::Var o = observe(hidden, &alpha, &context);
    ad::Var state_logits =
        tape.Affine(bind(Tensor::kStateW), bind(Tensor::kStateB), o);
    terms.push_back(tape.LogSoftmaxPick(state_logits, z, nullptr));
    ad::Var word_in = tape.Add(o, tape.Column(bind(Tensor::kStateG), z));
    ad::Var word_logits =
        tape.Affine(bind(Tensor::kWordW), bind(Tensor::kWordB), word_in);
    ad::Var word_lp = tape.LogSoftmaxPick(word_logits, y, &params.word_mask());
    if (use_copy) {
      Vec weight = Vec::Zero(static_cast<Eigen::Index>(resolved.size()));
      for (std::size_t i = 0; i < resolved.size(); ++i) {
        const auto& ids = resolved[i].copy_ids;
        if (ids.empty()) continue;
        double count = 0;
        for (TokenId w : ids) count += (w == y);
        weight(static_cast<Eigen::Index>(i)) = count / static_cast<double>(ids.size());
      }
      ad::Var gate = tape.Sigmoid(
          tape.Affine(bind(Tensor::kCopyW), bind(Tensor::kCopyB), o));
      ad::Var mix = tape.Mul(gate, tape.Exp(word_lp));
      if (weight.sum() > 0.0) {
        ad::Var copy_p = tape.Div(tape.Dot(alpha, tape.Constant(weight)),
                                  tape.Dot(alpha, has_copy_var));
        mix = tape.Add(mix, tape.Mul(tape.OneMinus(gate), copy_p));
      }
      word_lp = tape.Log(mix);
    }
    terms.push_back(word_lp);
    ad::Var x = tape.Concat({tape.Column(bind(Tensor::kWordEmb), y),
                             tape.Column(bind(Tensor::kStateEmb), z), context});
    hidden = GruStep(tape, bind(Tensor::kGruWx), bind(Tensor::kGruWh),
                     bind(Tensor::kGruBx), bind(Tensor::kGruBh), x, hidden);
  }
  ad::Var alpha, context;
  ad::Var o = observe(hidden, &alpha, &context);
  ad::Var state_logits =
      tape.Affine(bind(Tensor::kStateW), bind(Tensor::kStateB), o);
  terms.push_back(
      tape.LogSoftmaxPick(state_logits, params.terminal_state(), nullptr));
  return tape.Scale(tape.Sum(terms), -1.0);
}

}  // namespace ctrlgen

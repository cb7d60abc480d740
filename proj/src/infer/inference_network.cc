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

#include "ctrlgen/infer/inference_network.h"

#include <string>

#include "ctrlgen/core/errors.h"
#include "ctrlgen/core/tokenize.h"

namespace ctrlgen {
namespace {

void CheckTokens(const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw DomainError("cannot infer states for empty text");
}

}  // namespace

Eigen::MatrixXd MatchFeatures(const ModelParams& params, const DataTable& table,
                              const std::vector<std::string>& tokens) {
  const int F = params.fields().size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(F, static_cast<Eigen::Index>(tokens.size()));
  for (const auto& [field, value] : table.entries()) {
    auto f = params.fields().Find(field);
    if (!f) throw SchemaError("unknown field '" + field + "'");
    std::vector<std::string> value_tokens = Tokenize(value);
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      for (const auto& v : value_tokens) {
        if (tokens[t] == v) {
          m(*f, static_cast<Eigen::Index>(t)) = 1.0;
          break;
        }
      }
    }
  }
  return m;
}

CrfPotentials ComputePotentials(const ModelParams& params,
                                const DataTable& table,
                                const std::vector<std::string>& tokens) {
  CheckTokens(tokens);
  const int T = static_cast<int>(tokens.size());
  const int R = params.config().crf_hidden_dim;
  Eigen::MatrixXd match = MatchFeatures(params, table, tokens);
  std::vector<TokenId> ids = params.words().Encode(tokens);
  const Mat& emb = params[Tensor::kCrfEmb];

  std::vector<Vec> fwd(T), bwd(T);
  Vec h = Vec::Zero(R);
  for (int t = 0; t < T; ++t) {
    h = GruStep(params[Tensor::kCrfFwdWx], params[Tensor::kCrfFwdWh],
                params[Tensor::kCrfFwdBx], params[Tensor::kCrfFwdBh],
                emb.col(ids[t]), h);
    fwd[t] = h;
  }
  h = Vec::Zero(R);
  for (int t = T - 1; t >= 0; --t) {
    h = GruStep(params[Tensor::kCrfBwdWx], params[Tensor::kCrfBwdWh],
                params[Tensor::kCrfBwdBx], params[Tensor::kCrfBwdBh],
                emb.col(ids[t]), h);
    bwd[t] = h;
  }
  CrfPotentials pot;
  const int K = params.num_states();
  const int F = params.fields().size();
  pot.emissions.resize(T, K);
  Vec feat(2 * R + F);
  for (int t = 0; t < T; ++t) {
    feat.head(R) = fwd[t];
    feat.segment(R, R) = bwd[t];
    feat.tail(F) = match.col(t);
    pot.emissions.row(t) =
        (params[Tensor::kCrfEmitW] * feat + params[Tensor::kCrfEmitB].col(0))
            .transpose();
  }
  pot.transitions = params[Tensor::kCrfTrans];
  return pot;
}

ControlStateSeq InferStates(const ModelParams& params, const DataTable& table,
                            const std::vector<std::string>& tokens) {
  return Viterbi(ComputePotentials(params, table, tokens));
}

ad::Var CrfNegLogLikelihood(ad::Tape& tape, const ParamBinding& bind,
                            const DataTable& table,
                            const std::vector<std::string>& tokens,
                            const ControlStateSeq& states) {
  CheckTokens(tokens);
  const ModelParams& params = bind.params();
  const int T = static_cast<int>(tokens.size());
  const int R = params.config().crf_hidden_dim;
  const int K = params.num_states();
  if (static_cast<int>(states.size()) != T) {
    throw DomainError("state sequence length " + std::to_string(states.size()) +
                      " differs from text length " + std::to_string(T));
  }
  Eigen::MatrixXd match = MatchFeatures(params, table, tokens);
  std::vector<TokenId> ids = params.words().Encode(tokens);

  std::vector<ad::Var> inputs(T), fwd(T), bwd(T);
  for (int t = 0; t < T; ++t) inputs[t] = tape.Column(bind(Tensor::kCrfEmb), ids[t]);
  ad::Var h = tape.Constant(Vec::Zero(R));
  for (int t = 0; t < T; ++t) {
    h = GruStep(tape, bind(Tensor::kCrfFwdWx), bind(Tensor::kCrfFwdWh),
                bind(Tensor::kCrfFwdBx), bind(Tensor::kCrfFwdBh), inputs[t], h);
    fwd[t] = h;
  }
  h = tape.Constant(Vec::Zero(R));
  for (int t = T - 1; t >= 0; --t) {
    h = GruStep(tape, bind(Tensor::kCrfBwdWx), bind(Tensor::kCrfBwdWh),
                bind(Tensor::kCrfBwdBx), bind(Tensor::kCrfBwdBh), inputs[t], h);
    bwd[t] = h;
  }
  std::vector<ad::Var> emissions(T);
  CrfPotentials pot;
  pot.emissions.resize(T, K);
  for (int t = 0; t < T; ++t) {
    ad::Var feat = tape.Concat({fwd[t], bwd[t], tape.Constant(match.col(t))});
    emissions[t] =
        tape.Affine(bind(Tensor::kCrfEmitW), bind(Tensor::kCrfEmitB), feat);
    pot.emissions.row(t) = tape.value(emissions[t]).transpose();
  }
  pot.transitions = params[Tensor::kCrfTrans];

  CrfPosterior post = ForwardBackward(pot);
  Vec nll(1);
  nll(0) = post.log_partition - SequenceScore(pot, states);

  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(K, K);
  for (int t = 1; t < T; ++t) counts(states[t - 1], states[t]) += 1.0;
  Mat* trans_grad = bind(Tensor::kCrfTrans).grad;
  return tape.Custom(
      emissions, std::move(nll),
      [post = std::move(post), counts = std::move(counts), trans_grad, states,
       T](const Vec& g, std::vector<Vec>& in) {
        for (int t = 0; t < T; ++t) {
          in[t] = g(0) * post.marginals.row(t).transpose();
          in[t](states[t]) -= g(0);
        }
        if (trans_grad) *trans_grad += g(0) * (post.transition_marginals - counts);
      });
}

}  // namespace ctrlgen

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

#include "ctrlgen/infer/crf.h"

#include <cmath>
#include <limits>
#include <string>

#include "ctrlgen/core/errors.h"

namespace ctrlgen {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double LogSumExp(const VectorXd& v) {
  double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

void CheckSequence(const CrfPotentials& pot, const ControlStateSeq& z) {
  if (static_cast<int>(z.size()) != pot.length()) {
    throw DomainError("state sequence length " + std::to_string(z.size()) +
                      " differs from potentials length " +
                      std::to_string(pot.length()));
  }
  for (StateId s : z) {
    if (s < 0 || s >= pot.num_states()) {
      throw DomainError("state " + std::to_string(s) + " outside 0.." +
                        std::to_string(pot.num_states() - 1));
    }
  }
}

}  // namespace

void CrfPotentials::Validate() const {
  if (emissions.rows() < 1) throw DomainError("CRF needs at least one position");
  if (emissions.cols() < 1 || transitions.rows() != emissions.cols() ||
      transitions.cols() != emissions.cols()) {
    throw DomainError("CRF potentials have inconsistent shapes");
  }
  if (!emissions.allFinite() || !transitions.allFinite()) {
    throw NumericalError("CRF potentials are not finite");
  }
}

ControlStateSeq Viterbi(const CrfPotentials& pot) {
  pot.Validate();
  const int T = pot.length(), K = pot.num_states();
  MatrixXd best(T, K);
  Eigen::MatrixXi back(T, K);
  best.row(0) = pot.emissions.row(0);
  for (int t = 1; t < T; ++t) {
    for (int j = 0; j < K; ++j) {
      int arg = 0;
      double top = best(t - 1, 0) + pot.transitions(0, j);
      for (int i = 1; i < K; ++i) {
        double s = best(t - 1, i) + pot.transitions(i, j);
        if (s > top) {
          top = s;
          arg = i;
        }
      }
      best(t, j) = top + pot.emissions(t, j);
      back(t, j) = arg;
    }
  }
  std::vector<StateId> z(T);
  int arg = 0;
  for (int j = 1; j < K; ++j) {
    if (best(T - 1, j) > best(T - 1, arg)) arg = j;
  }
  z[T - 1] = arg;
  for (int t = T - 1; t > 0; --t) z[t - 1] = back(t, z[t]);
  return ControlStateSeq(std::move(z));
}

CrfPosterior ForwardBackward(const CrfPotentials& pot) {
  pot.Validate();
  const int T = pot.length(), K = pot.num_states();
  MatrixXd alpha(T, K), beta(T, K);
  alpha.row(0) = pot.emissions.row(0);
  VectorXd tmp(K);
  for (int t = 1; t < T; ++t) {
    for (int j = 0; j < K; ++j) {
      tmp = alpha.row(t - 1).transpose() + pot.transitions.col(j);
      alpha(t, j) = LogSumExp(tmp) + pot.emissions(t, j);
    }
  }
  beta.row(T - 1).setZero();
  for (int t = T - 2; t >= 0; --t) {
    for (int i = 0; i < K; ++i) {
      tmp = pot.transitions.row(i).transpose() +
            pot.emissions.row(t + 1).transpose() + beta.row(t + 1).transpose();
      beta(t, i) = LogSumExp(tmp);
    }
  }
  CrfPosterior out;
  out.log_partition = LogSumExp(alpha.row(T - 1).transpose());
  out.marginals = (alpha + beta).array() - out.log_partition;
  out.marginals = out.marginals.array().exp();
  out.transition_marginals = MatrixXd::Zero(K, K);
  for (int t = 1; t < T; ++t) {
    for (int i = 0; i < K; ++i) {
      for (int j = 0; j < K; ++j) {
        out.transition_marginals(i, j) +=
            std::exp(alpha(t - 1, i) + pot.transitions(i, j) +
                     pot.emissions(t, j) + beta(t, j) - out.log_partition);
      }
    }
  }
  return out;
}

double LogPartition(const CrfPotentials& pot) {
  return ForwardBackward(pot).log_partition;
}

Eigen::MatrixXd Marginals(const CrfPotentials& pot) {
  return ForwardBackward(pot).marginals;
}

double SequenceScore(const CrfPotentials& pot, const ControlStateSeq& z) {
  pot.Validate();
  CheckSequence(pot, z);
  double s = 0.0;
  for (int t = 0; t < pot.length(); ++t) {
    s += pot.emissions(t, z[t]);
    if (t > 0) s += pot.transitions(z[t - 1], z[t]);
  }
  return s;
}

double CrfLogLikelihood(const CrfPotentials& pot, const ControlStateSeq& z) {
  double score = SequenceScore(pot, z);
  if (pot.num_states() == 1) return 0.0;
  return score - LogPartition(pot);
}

}  // namespace ctrlgen

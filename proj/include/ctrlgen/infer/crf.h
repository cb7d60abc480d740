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

#ifndef CTRLGEN_INFER_CRF_H_
#define CTRLGEN_INFER_CRF_H_

#include <Eigen/Dense>

#include <vector>

#include "ctrlgen/core/types.h"

namespace ctrlgen {

// Linear-chain scores: score(z) = sum_t E[t, z_t] + sum_{t>0} A[z_{t-1}, z_t].
struct CrfPotentials {
  Eigen::MatrixXd emissions;    // T x K
  Eigen::MatrixXd transitions;  // K x K

  int length() const { return static_cast<int>(emissions.rows()); }
  int num_states() const { return static_cast<int>(emissions.cols()); }
  // DomainError for T < 1 or inconsistent shapes, NumericalError for
  // non-finite scores.
  void Validate() const;
};

// Highest-scoring sequence; ties go to the lower state index.
ControlStateSeq Viterbi(const CrfPotentials& pot);

struct CrfPosterior {
  double log_partition = 0.0;
  Eigen::MatrixXd marginals;  // T x K, rows sum to 1
  // Expected transition counts: sum over t of P(z_{t-1} = i, z_t = j).
  Eigen::MatrixXd transition_marginals;  // K x K
};

// Log-space forward-backward.
CrfPosterior ForwardBackward(const CrfPotentials& pot);
double LogPartition(const CrfPotentials& pot);
Eigen::MatrixXd Marginals(const CrfPotentials& pot);

// DomainError unless |z| == T and every state < K.
double SequenceScore(const CrfPotentials& pot, const ControlStateSeq& z);
double CrfLogLikelihood(const CrfPotentials& pot, const ControlStateSeq& z);

}  // namespace ctrlgen

#endif  // CTRLGEN_INFER_CRF_H_

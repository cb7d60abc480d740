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

#ifndef CTRLGEN_INFER_INFERENCE_NETWORK_H_
#define CTRLGEN_INFER_INFERENCE_NETWORK_H_

#include <string>
#include <vector>

#include "ctrlgen/autodiff/tape.h"
#include "ctrlgen/core/types.h"
#include "ctrlgen/infer/crf.h"
#include "ctrlgen/model/gru.h"
#include "ctrlgen/model/params.h"

namespace ctrlgen {

// F x T indicators: entry (f, t) is 1 when token t equals one of the value
// tokens of model field f in the table. Unknown fields raise SchemaError.
Eigen::MatrixXd MatchFeatures(const ModelParams& params, const DataTable& table,
                              const std::vector<std::string>& tokens);

// Emissions from a bidirectional recurrent encoder over the tokens plus the
// match indicators; transitions are the learned K x K table. DomainError for
// an empty token sequence.
CrfPotentials ComputePotentials(const ModelParams& params,
                                const DataTable& table,
                                const std::vector<std::string>& tokens);

ControlStateSeq InferStates(const ModelParams& params, const DataTable& table,
                            const std::vector<std::string>& tokens);

// Records -log q(z | x, y) on a tape.
ad::Var CrfNegLogLikelihood(ad::Tape& tape, const ParamBinding& params,
                            const DataTable& table,
                            const std::vector<std::string>& tokens,
                            const ControlStateSeq& states);

}  // namespace ctrlgen

#endif  // CTRLGEN_INFER_INFERENCE_NETWORK_H_

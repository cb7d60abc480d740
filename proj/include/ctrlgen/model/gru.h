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

#ifndef CTRLGEN_MODEL_GRU_H_
#define CTRLGEN_MODEL_GRU_H_

#include "ctrlgen/autodiff/tape.h"
#include "ctrlgen/model/params.h"

namespace ctrlgen {

// Gated recurrent cell with stacked gate rows (reset, update, candidate):
//   r = sig(Wx_r x + bx_r + Wh_r h + bh_r)
//   u = sig(Wx_u x + bx_u + Wh_u h + bh_u)
//   n = tanh(Wx_n x + bx_n + r * (Wh_n h + bh_n))
//   h' = (1 - u) * n + u * h
Vec GruStep(const Mat& wx, const Mat& wh, const Mat& bx, const Mat& bh,
            const Vec& x, const Vec& h);

ad::Var GruStep(ad::Tape& tape, ad::ParamRef wx, ad::ParamRef wh,
                ad::ParamRef bx, ad::ParamRef bh, ad::Var x, ad::Var h);

// Tape views of the tensors in a ModelParams; `grads` (may be null for a
// forward-only tape) must have the shapes of params.ZerosLike().
class ParamBinding {
 public:
  ParamBinding(const ModelParams& params, std::vector<Mat>* grads)
      : params_(params), grads_(grads) {}

  ad::ParamRef operator()(Tensor t) const {
    int i = static_cast<int>(t);
    return {&params_.tensors()[i], grads_ ? &(*grads_)[i] : nullptr};
  }
  const ModelParams& params() const { return params_; }

 private:
  const ModelParams& params_;
  std::vector<Mat>* grads_;
};

}  // namespace ctrlgen

#endif  // CTRLGEN_MODEL_GRU_H_

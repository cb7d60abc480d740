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

#include "ctrlgen/model/gru.h"

namespace ctrlgen {

Vec GruStep(const Mat& wx, const Mat& wh, const Mat& bx, const Mat& bh,
            const Vec& x, const Vec& h) {
  const Eigen::Index n = h.size();
  Vec gx = wx * x + bx.col(0);
  Vec gh = wh * h + bh.col(0);
  Eigen::ArrayXd r =
      1.0 / (1.0 + (-(gx.head(n) + gh.head(n))).array().exp());
  Eigen::ArrayXd u =
      1.0 / (1.0 + (-(gx.segment(n, n) + gh.segment(n, n))).array().exp());
  Eigen::ArrayXd cand =
      (gx.tail(n).array() + r * gh.tail(n).array()).tanh();
  return ((1.0 - u) * cand + u * h.array()).matrix();
}

ad::Var GruStep(ad::Tape& tape, ad::ParamRef wx, ad::ParamRef wh,
                ad::ParamRef bx, ad::ParamRef bh, ad::Var x, ad::Var h) {
  const int n = static_cast<int>(tape.value(h).size());
  ad::Var gx = tape.Affine(wx, bx, x);
  ad::Var gh = tape.Affine(wh, bh, h);
  ad::Var r = tape.Sigmoid(tape.Add(tape.Slice(gx, 0, n), tape.Slice(gh, 0, n)));
  ad::Var u = tape.Sigmoid(tape.Add(tape.Slice(gx, n, n), tape.Slice(gh, n, n)));
  ad::Var cand = tape.Tanh(
      tape.Add(tape.Slice(gx, 2 * n, n), tape.Mul(r, tape.Slice(gh, 2 * n, n))));
  return tape.Add(tape.Mul(tape.OneMinus(u), cand), tape.Mul(u, h));
}

}  // namespace ctrlgen

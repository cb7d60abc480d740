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

#ifndef CTRLGEN_AUTODIFF_TAPE_H_
#define CTRLGEN_AUTODIFF_TAPE_H_

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace ctrlgen::ad {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// A trainable tensor and the buffer its gradient accumulates into. A null
// `grad` marks the tensor as frozen.
struct ParamRef {
  const Mat* value = nullptr;
  Mat* grad = nullptr;
};

// Handle to a node on a Tape.
struct Var {
  int id = -1;
};

// Single-use reverse-mode tape over dense vectors (scalars are length-1
// vectors). Record the forward computation, then call Backward once.
class Tape {
 public:
  using CustomBackward =
      std::function<void(const Vec& out_grad, std::vector<Vec>& input_grads)>;

  Tape() { nodes_.reserve(256); }

  Var Constant(Vec value);
  // Column `col` of a parameter matrix (embedding lookup).
  Var Column(ParamRef p, int col);
  Var MatVec(ParamRef w, Var x);
  // w * x + b, with b a single-column parameter.
  Var Affine(ParamRef w, ParamRef b, Var x);

  Var Add(Var a, Var b);
  Var Sub(Var a, Var b);
  Var Mul(Var a, Var b);
  Var Scale(Var a, double factor);
  Var OneMinus(Var a);
  Var Sigmoid(Var a);
  Var Tanh(Var a);
  Var Exp(Var a);
  Var Log(Var a);

  Var Concat(std::span<const Var> parts);
  Var Concat(std::initializer_list<Var> parts) {
    return Concat(std::span<const Var>(parts.begin(), parts.size()));
  }
  Var Slice(Var a, int offset, int length);

  Var Dot(Var a, Var b);
  Var Softmax(Var a);
  Var WeightedSum(Var weights, std::span<const Var> items);
  Var Mean(std::span<const Var> items);
  // log softmax(logits + mask)[index]; `mask` holds 0 or -inf entries and
  // may be null. The mask must outlive the tape.
  Var LogSoftmaxPick(Var logits, int index, const Vec* mask);
  Var Pick(Var a, int index);
  Var Div(Var numerator, Var denominator);
  Var Sum(std::span<const Var> scalars);

  // Node whose value and vector-Jacobian product are supplied by the
  // caller. `backward` receives the output gradient and zero-initialized
  // gradient buffers for `inputs`; parameter gradients it writes directly.
  Var Custom(std::vector<Var> inputs, Vec value, CustomBackward backward);

  const Vec& value(Var v) const { return nodes_[v.id].value; }
  double scalar(Var v) const { return nodes_[v.id].value(0); }
  std::size_t size() const { return nodes_.size(); }

  // Propagates d(root)/d(.) into every reachable parameter gradient.
  void Backward(Var root);

 private:
  enum class Op {
    kConstant, kColumn, kMatVec, kAffine, kAdd, kSub, kMul, kScale,
    kOneMinus, kSigmoid, kTanh, kExp, kLog, kConcat, kSlice, kDot, kSoftmax,
    kWeightedSum, kMean, kLogSoftmaxPick, kPick, kDiv, kSum, kCustom,
  };

  struct Node {
    Op op;
    std::vector<int> inputs;
    Vec value;
    Vec grad;
    ParamRef p0;
    ParamRef p1;
    int index = 0;
    int length = 0;
    double factor = 0.0;
    const Vec* mask = nullptr;
    int custom = -1;
  };

  Var Push(Node node);
  void Accumulate(int id, const Vec& g);
  template <typename Expr>
  void AccumulateExpr(int id, const Expr& g);

  std::vector<Node> nodes_;
  std::vector<CustomBackward> custom_;
};

}  // namespace ctrlgen::ad

#endif  // CTRLGEN_AUTODIFF_TAPE_H_

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

#include "ctrlgen/autodiff/tape.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ctrlgen::ad {

Var Tape::Push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::Constant(Vec value) {
  Node n{Op::kConstant, {}, std::move(value), {}, {}, {}};
  return Push(std::move(n));
}

Var Tape::Column(ParamRef p, int col) {
  Node n{Op::kColumn, {}, p.value->col(col), {}, p, {}};
  n.index = col;
  return Push(std::move(n));
}

Var Tape::MatVec(ParamRef w, Var x) {
  Node n{Op::kMatVec, {x.id}, (*w.value) * value(x), {}, w, {}};
  return Push(std::move(n));
}

Var Tape::Affine(ParamRef w, ParamRef b, Var x) {
  Vec y = (*w.value) * value(x);
  y += b.value->col(0);
  Node n{Op::kAffine, {x.id}, std::move(y), {}, w, b};
  return Push(std::move(n));
}

Var Tape::Add(Var a, Var b) {
  return Push({Op::kAdd, {a.id, b.id}, value(a) + value(b), {}, {}, {}});
}

Var Tape::Sub(Var a, Var b) {
  return Push({Op::kSub, {a.id, b.id}, value(a) - value(b), {}, {}, {}});
}

Var Tape::Mul(Var a, Var b) {
  return Push({Op::kMul, {a.id, b.id},
               value(a).cwiseProduct(value(b)), {}, {}, {}});
}

Var Tape::Scale(Var a, double factor) {
  Node n{Op::kScale, {a.id}, value(a) * factor, {}, {}, {}};
  n.factor = factor;
  return Push(std::move(n));
}

Var Tape::OneMinus(Var a) {
  return Push({Op::kOneMinus, {a.id},
               (1.0 - value(a).array()).matrix(), {}, {}, {}});
}

Var Tape::Sigmoid(Var a) {
  Vec y = (1.0 / (1.0 + (-value(a).array()).exp())).matrix();
  return Push({Op::kSigmoid, {a.id}, std::move(y), {}, {}, {}});
}

Var Tape::Tanh(Var a) {
  return Push({Op::kTanh, {a.id}, value(a).array().tanh().matrix(), {}, {}, {}});
}

Var Tape::Exp(Var a) {
  return Push({Op::kExp, {a.id}, value(a).array().exp().matrix(), {}, {}, {}});
}

Var Tape::Log(Var a) {
  return Push({Op::kLog, {a.id}, value(a).array().log().matrix(), {}, {}, {}});
}

Var Tape::Concat(std::span<const Var> parts) {
  Eigen::Index total = 0;
  for (Var p : parts) total += value(p).size();
  Vec y(total);
  Eigen::Index at = 0;
  std::vector<int> inputs;
  inputs.reserve(parts.size());
  for (Var p : parts) {
    const Vec& v = value(p);
    y.segment(at, v.size()) = v;
    at += v.size();
    inputs.push_back(p.id);
  }
  return Push({Op::kConcat, std::move(inputs), std::move(y), {}, {}, {}});
}

Var Tape::Slice(Var a, int offset, int length) {
  Node n{Op::kSlice, {a.id}, value(a).segment(offset, length), {}, {}, {}};
  n.index = offset;
  n.length = length;
  return Push(std::move(n));
}

Var Tape::Dot(Var a, Var b) {
  Vec y(1);
  y(0) = value(a).dot(value(b));
  return Push({Op::kDot, {a.id, b.id}, std::move(y), {}, {}, {}});
}

Var Tape::Softmax(Var a) {
  const Vec& x = value(a);
  Vec y = (x.array() - x.maxCoeff()).exp().matrix();
  y /= y.sum();
  return Push({Op::kSoftmax, {a.id}, std::move(y), {}, {}, {}});
}

Var Tape::WeightedSum(Var weights, std::span<const Var> items) {
  const Vec& w = value(weights);
  if (items.empty()) throw std::invalid_argument("WeightedSum of nothing");
  Vec y = Vec::Zero(value(items[0]).size());
  std::vector<int> inputs{weights.id};
  for (std::size_t i = 0; i < items.size(); ++i) {
    y += w(static_cast<Eigen::Index>(i)) * value(items[i]);
    inputs.push_back(items[i].id);
  }
  return Push({Op::kWeightedSum, std::move(inputs), std::move(y), {}, {}, {}});
}

Var Tape::Mean(std::span<const Var> items) {
  if (items.empty()) throw std::invalid_argument("Mean of nothing");
  Vec y = Vec::Zero(value(items[0]).size());
  std::vector<int> inputs;
  for (Var v : items) {
    y += value(v);
    inputs.push_back(v.id);
  }
  y /= static_cast<double>(items.size());
  return Push({Op::kMean, std::move(inputs), std::move(y), {}, {}, {}});
}

Var Tape::LogSoftmaxPick(Var logits, int index, const Vec* mask) {
  Vec z = value(logits);
  if (mask != nullptr) z += *mask;
  double m = z.maxCoeff();
  double lse = m + std::log((z.array() - m).exp().sum());
  Vec y(1);
  y(0) = z(index) - lse;
  Node n{Op::kLogSoftmaxPick, {logits.id}, std::move(y), {}, {}, {}};
  n.index = index;
  n.mask = mask;
  return Push(std::move(n));
}

Var Tape::Pick(Var a, int index) {
  Vec y(1);
  y(0) = value(a)(index);
  Node n{Op::kPick, {a.id}, std::move(y), {}, {}, {}};
  n.index = index;
  return Push(std::move(n));
}

Var Tape::Div(Var numerator, Var denominator) {
  Vec y(1);
  y(0) = value(numerator)(0) / value(denominator)(0);
  return Push({Op::kDiv, {numerator.id, denominator.id}, std::move(y), {}, {}, {}});
}

Var Tape::Sum(std::span<const Var> scalars) {
  Vec y = Vec::Zero(1);
  std::vector<int> inputs;
  for (Var v : scalars) {
    y(0) += value(v)(0);
    inputs.push_back(v.id);
  }
  return Push({Op::kSum, std::move(inputs), std::move(y), {}, {}, {}});
}

Var Tape::Custom(std::vector<Var> inputs, Vec value, CustomBackward backward) {
  Node n{Op::kCustom, {}, std::move(value), {}, {}, {}};
  for (Var v : inputs) n.inputs.push_back(v.id);
  n.custom = static_cast<int>(custom_.size());
  custom_.push_back(std::move(backward));
  return Push(std::move(n));
}

void Tape::Accumulate(int id, const Vec& g) {
  Node& n = nodes_[id];
  if (n.op == Op::kConstant) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

template <typename Expr>
void Tape::AccumulateExpr(int id, const Expr& g) {
  Node& n = nodes_[id];
  if (n.op == Op::kConstant) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

void Tape::Backward(Var root) {
  nodes_[root.id].grad = Vec::Ones(nodes_[root.id].value.size());
  for (int id = root.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.grad.size() == 0) continue;
    const Vec& g = n.grad;
    switch (n.op) {
      case Op::kConstant:
        break;
      case Op::kColumn:
        if (n.p0.grad) n.p0.grad->col(n.index) += g;
        break;
      case Op::kMatVec:
      case Op::kAffine: {
        const Vec& x = nodes_[n.inputs[0]].value;
        if (n.p0.grad) n.p0.grad->noalias() += g * x.transpose();
        if (n.op == Op::kAffine && n.p1.grad) n.p1.grad->col(0) += g;
        AccumulateExpr(n.inputs[0], n.p0.value->transpose() * g);
        break;
      }
      case Op::kAdd:
        Accumulate(n.inputs[0], g);
        Accumulate(n.inputs[1], g);
        break;
      case Op::kSub:
        Accumulate(n.inputs[0], g);
        AccumulateExpr(n.inputs[1], -g);
        break;
      case Op::kMul: {
        const Vec& a = nodes_[n.inputs[0]].value;
        const Vec& b = nodes_[n.inputs[1]].value;
        AccumulateExpr(n.inputs[0], g.cwiseProduct(b));
        AccumulateExpr(n.inputs[1], g.cwiseProduct(a));
        break;
      }
      case Op::kScale:
        AccumulateExpr(n.inputs[0], g * n.factor);
        break;
      case Op::kOneMinus:
        AccumulateExpr(n.inputs[0], -g);
        break;
      case Op::kSigmoid:
        AccumulateExpr(n.inputs[0], (g.array() * n.value.array() *
                                     (1.0 - n.value.array())).matrix());
        break;
      case Op::kTanh:
        AccumulateExpr(n.inputs[0],
                       (g.array() * (1.0 - n.value.array().square())).matrix());
        break;
      case Op::kExp:
        AccumulateExpr(n.inputs[0], g.cwiseProduct(n.value));
        break;
      case Op::kLog:
        AccumulateExpr(n.inputs[0],
                       g.cwiseQuotient(nodes_[n.inputs[0]].value));
        break;
      case Op::kConcat: {
        Eigen::Index at = 0;
        for (int in : n.inputs) {
          Eigen::Index len = nodes_[in].value.size();
          AccumulateExpr(in, g.segment(at, len));
          at += len;
        }
        break;
      }
      case Op::kSlice: {
        Node& in = nodes_[n.inputs[0]];
        if (in.op == Op::kConstant) break;
        if (in.grad.size() == 0) in.grad = Vec::Zero(in.value.size());
        in.grad.segment(n.index, n.length) += g;
        break;
      }
      case Op::kDot: {
        double s = g(0);
        AccumulateExpr(n.inputs[0], s * nodes_[n.inputs[1]].value);
        AccumulateExpr(n.inputs[1], s * nodes_[n.inputs[0]].value);
        break;
      }
      case Op::kSoftmax: {
        const Vec& y = n.value;
        double gy = g.dot(y);
        AccumulateExpr(n.inputs[0], (y.array() * (g.array() - gy)).matrix());
        break;
      }
      case Op::kWeightedSum: {
        const Vec& w = nodes_[n.inputs[0]].value;
        Vec dw(w.size());
        for (std::size_t i = 1; i < n.inputs.size(); ++i) {
          auto idx = static_cast<Eigen::Index>(i - 1);
          dw(idx) = g.dot(nodes_[n.inputs[i]].value);
          AccumulateExpr(n.inputs[i], w(idx) * g);
        }
        Accumulate(n.inputs[0], dw);
        break;
      }
      case Op::kMean: {
        Vec share = g / static_cast<double>(n.inputs.size());
        for (int in : n.inputs) Accumulate(in, share);
        break;
      }
      case Op::kLogSoftmaxPick: {
        Vec z = nodes_[n.inputs[0]].value;
        if (n.mask != nullptr) z += *n.mask;
        Vec p = (z.array() - z.maxCoeff()).exp().matrix();
        p /= p.sum();
        Vec d = -g(0) * p;
        d(n.index) += g(0);
        Accumulate(n.inputs[0], d);
        break;
      }
      case Op::kPick: {
        Node& in = nodes_[n.inputs[0]];
        if (in.op == Op::kConstant) break;
        if (in.grad.size() == 0) in.grad = Vec::Zero(in.value.size());
        in.grad(n.index) += g(0);
        break;
      }
      case Op::kDiv: {
        double a = nodes_[n.inputs[0]].value(0);
        double b = nodes_[n.inputs[1]].value(0);
        Vec da(1), db(1);
        da(0) = g(0) / b;
        db(0) = -g(0) * a / (b * b);
        Accumulate(n.inputs[0], da);
        Accumulate(n.inputs[1], db);
        break;
      }
      case Op::kSum:
        for (int in : n.inputs) Accumulate(in, g);
        break;
      case Op::kCustom: {
        std::vector<Vec> grads;
        grads.reserve(n.inputs.size());
        for (int in : n.inputs) grads.push_back(Vec::Zero(nodes_[in].value.size()));
        custom_[n.custom](g, grads);
        for (std::size_t i = 0; i < n.inputs.size(); ++i) {
          Accumulate(n.inputs[i], grads[i]);
        }
        break;
      }
    }
  }
}

}  // namespace ctrlgen::ad

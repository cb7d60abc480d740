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

// Element-by-element re-statement of the joint model's log-likelihood. It
// reads tensors from ModelParams but performs all arithmetic with scalar
// loops, so it checks the vectorized implementation independently.
#ifndef CTRLGEN_TESTS_ORACLES_NAIVE_MODEL_H_
#define CTRLGEN_TESTS_ORACLES_NAIVE_MODEL_H_

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "ctrlgen/model/params.h"

namespace ctrlgen::oracle {

using V = std::vector<double>;

inline V MatTimes(const Mat& m, const V& x) {
  V y(m.rows(), 0.0);
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) y[r] += m(r, c) * x[c];
  }
  return y;
}

inline V Col(const Mat& m, int c) {
  V v(m.rows());
  for (int r = 0; r < m.rows(); ++r) v[r] = m(r, c);
  return v;
}

inline double Sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline V LogSoftmaxNaive(const V& z) {
  double m = -1e300;
  for (double v : z) m = std::max(m, v);
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  V out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] - m - std::log(s);
  return out;
}

inline std::vector<std::string> SplitSpaces(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// Values are assumed lowercase already.
inline double NaiveScore(const ModelParams& p, const DataTable& table,
                         const std::vector<TokenId>& y,
                         const std::vector<StateId>& z) {
  const int e = p.config().embed_dim, h = p.config().hidden_dim;
  const int k = p.num_states();
  std::vector<V> cells;
  std::vector<std::vector<TokenId>> copyable;
  for (const auto& [field, value] : table.entries()) {
    V in = Col(p[Tensor::kFieldEmb], *p.fields().Find(field));
    V mean(e, 0.0);
    auto toks = SplitSpaces(value);
    std::vector<TokenId> cp;
    for (const auto& t : toks) {
      V col = Col(p[Tensor::kValueEmb], p.values().Lookup(t));
      for (int i = 0; i < e; ++i) mean[i] += col[i] / toks.size();
      if (p.words().Contains(t)) cp.push_back(p.words().Lookup(t));
    }
    in.insert(in.end(), mean.begin(), mean.end());
    V c = MatTimes(p[Tensor::kCellW], in);
    for (int i = 0; i < h; ++i) c[i] = std::tanh(c[i] + p[Tensor::kCellB](i, 0));
    cells.push_back(c);
    copyable.push_back(cp);
  }
  V pooled(h, 0.0);
  for (const auto& c : cells) {
    for (int i = 0; i < h; ++i) pooled[i] += c[i] / cells.size();
  }
  V hid = MatTimes(p[Tensor::kInitW], pooled);
  for (int i = 0; i < h; ++i) hid[i] = std::tanh(hid[i] + p[Tensor::kInitB](i, 0));

  double total = 0.0;
  for (std::size_t t = 0; t <= y.size(); ++t) {
    V scores;
    for (const auto& c : cells) {
      double s = 0;
      for (int i = 0; i < h; ++i) s += hid[i] * c[i];
      scores.push_back(s);
    }
    V lalpha = LogSoftmaxNaive(scores);
    V ctx(h, 0.0);
    for (std::size_t j = 0; j < cells.size(); ++j) {
      for (int i = 0; i < h; ++i) ctx[i] += std::exp(lalpha[j]) * cells[j][i];
    }
    V o = hid;
    o.insert(o.end(), ctx.begin(), ctx.end());
    V sl = MatTimes(p[Tensor::kStateW], o);
    for (int i = 0; i <= k; ++i) sl[i] += p[Tensor::kStateB](i, 0);
    V lps = LogSoftmaxNaive(sl);
    if (t == y.size()) {
      total += lps[k];
      break;
    }
    total += lps[z[t]];
    V win = o;
    for (int i = 0; i < 2 * h; ++i) win[i] += p[Tensor::kStateG](i, z[t]);
    V wl = MatTimes(p[Tensor::kWordW], win);
    V kept;
    std::vector<int> ids;
    for (int w = 0; w < p.words().size(); ++w) {
      if (w == Vocabulary::kBos || w == Vocabulary::kEos) continue;
      kept.push_back(wl[w] + p[Tensor::kWordB](w, 0));
      ids.push_back(w);
    }
    V lpw = LogSoftmaxNaive(kept);
    double word_lp = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] == y[t]) word_lp = lpw[i];
    }
    if (p.config().copy) {
      double denom = 0, num = 0;
      for (std::size_t j = 0; j < cells.size(); ++j) {
        if (copyable[j].empty()) continue;
        denom += std::exp(lalpha[j]);
        for (TokenId w : copyable[j]) {
          if (w == y[t]) num += std::exp(lalpha[j]) / copyable[j].size();
        }
      }
      if (denom > 0) {
        double gl = p[Tensor::kCopyB](0, 0);
        for (int i = 0; i < 2 * h; ++i) gl += p[Tensor::kCopyW](0, i) * o[i];
        double g = Sig(gl);
        word_lp = std::log(g * std::exp(word_lp) + (1 - g) * num / denom);
      }
    }
    total += word_lp;
    V x = Col(p[Tensor::kWordEmb], y[t]);
    V se = Col(p[Tensor::kStateEmb], z[t]);
    x.insert(x.end(), se.begin(), se.end());
    x.insert(x.end(), ctx.begin(), ctx.end());
    V gx = MatTimes(p[Tensor::kGruWx], x);
    V gh = MatTimes(p[Tensor::kGruWh], hid);
    V next(h);
    for (int i = 0; i < h; ++i) {
      double ax = gx[i] + p[Tensor::kGruBx](i, 0);
      double ah = gh[i] + p[Tensor::kGruBh](i, 0);
      double r = Sig(ax + ah);
      double ux = gx[h + i] + p[Tensor::kGruBx](h + i, 0);
      double uh = gh[h + i] + p[Tensor::kGruBh](h + i, 0);
      double u = Sig(ux + uh);
      double nx = gx[2 * h + i] + p[Tensor::kGruBx](2 * h + i, 0);
      double nh = gh[2 * h + i] + p[Tensor::kGruBh](2 * h + i, 0);
      double n = std::tanh(nx + r * nh);
      next[i] = (1 - u) * n + u * hid[i];
    }
    hid = next;
  }
  return total;
}

}  // namespace ctrlgen::oracle

#endif  // CTRLGEN_TESTS_ORACLES_NAIVE_MODEL_H_

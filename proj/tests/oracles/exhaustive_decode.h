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

// Brute-force decoders over tiny models.
#ifndef CTRLGEN_TESTS_ORACLES_EXHAUSTIVE_DECODE_H_
#define CTRLGEN_TESTS_ORACLES_EXHAUSTIVE_DECODE_H_

#include <functional>
#include <limits>
#include <vector>

#include "ctrlgen/constraint/dfa.h"
#include "ctrlgen/model/joint_model.h"

namespace ctrlgen::oracle {

struct Best {
  std::vector<TokenId> words;
  std::vector<StateId> states;
  double score = -std::numeric_limits<double>::infinity();
};

// Argmax of log p(y, z | x) over every pair with at most max_len tokens
// counting EOS, optionally
// restricted to state sequences accepted by `dfa`. Ties keep the first pair
// in (length, words, states) enumeration order.
inline Best ExhaustiveArgmax(const ModelParams& p, const DataTable& table,
                             int max_len, const ConstraintDfa* dfa = nullptr) {
  Best best;
  std::vector<TokenId> y;
  std::vector<StateId> z;
  std::function<void()> walk = [&] {
    bool ok = dfa == nullptr || dfa->Accepts(ControlStateSeq(z));
    if (ok) {
      double s = ScoreSequence(p, table, y, z);
      if (s > best.score) best = {y, z, s};
    }
    if (static_cast<int>(y.size()) + 1 == max_len) return;
    for (TokenId w = 2; w < p.words().size(); ++w) {
      for (StateId k = 0; k < p.num_states(); ++k) {
        y.push_back(w);
        z.push_back(k);
        walk();
        y.pop_back();
        z.pop_back();
      }
    }
  };
  walk();
  return best;
}

// Stepwise argmax: best state (terminal included), then best word.
inline Best Greedy(const ModelParams& p, const DataTable& table, int max_len) {
  EncodedInput in = EncodeTable(p, table);
  DecoderState s = InitialState(p, in);
  Best out;
  out.score = 0;
  while (true) {
    StepView v = Observe(p, s);
    Vec sl = StateLogProbs(p, v);
    int zbest = p.num_states();
    if (static_cast<int>(out.words.size()) + 1 < max_len) {
      for (int k = 0; k <= p.num_states(); ++k) {
        if (sl(k) > sl(zbest) || (sl(k) == sl(zbest) && k < zbest)) zbest = k;
      }
    }
    out.score += sl(zbest);
    if (zbest == p.num_states()) return out;
    Vec wl = WordLogProbs(p, s, v, zbest);
    int ybest = 2;
    for (int w = 3; w < wl.size(); ++w) {
      if (wl(w) > wl(ybest)) ybest = w;
    }
    out.score += wl(ybest);
    out.words.push_back(ybest);
    out.states.push_back(zbest);
    s = Advance(p, s, v, zbest, ybest);
  }
}

}  // namespace ctrlgen::oracle

#endif  // CTRLGEN_TESTS_ORACLES_EXHAUSTIVE_DECODE_H_

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

#ifndef CTRLGEN_CONSTRAINT_DFA_H_
#define CTRLGEN_CONSTRAINT_DFA_H_

#include <string>
#include <vector>

#include "ctrlgen/constraint/ast.h"
#include "ctrlgen/core/codec.h"
#include "ctrlgen/core/types.h"

namespace ctrlgen {

// Minimal deterministic automaton over control states 0..K-1. Transitions
// into the (implicit) dead state are the kReject sentinel, so every stored
// state is reachable from the start and, unless the language is empty, can
// still reach acceptance. Immutable after construction.
class ConstraintDfa {
 public:
  static constexpr int kReject = -1;

  ConstraintDfa() = default;
  // Stores the table as given after validating its shape (FormatError).
  // Compile and Minimize produce canonical, trimmed automata.
  ConstraintDfa(int alphabet_size, int start, std::vector<bool> accepting,
                std::vector<int> delta);

  int alphabet_size() const { return alphabet_size_; }
  int num_states() const { return static_cast<int>(accepting_.size()); }
  int start() const { return start_; }
  bool IsAccepting(int dfa_state) const { return accepting_.at(dfa_state); }
  const std::vector<bool>& accepting() const { return accepting_; }
  // Row-major num_states x alphabet_size table.
  const std::vector<int>& delta() const { return delta_; }

  int Step(int dfa_state, StateId control_state) const;
  // Control states c with Step(dfa_state, c) != kReject, ascending.
  const std::vector<StateId>& Allowed(int dfa_state) const {
    return allowed_.at(dfa_state);
  }
  bool Accepts(const ControlStateSeq& seq) const;
  bool LanguageEmpty() const;

  friend bool operator==(const ConstraintDfa& a, const ConstraintDfa& b) {
    return a.alphabet_size_ == b.alphabet_size_ && a.start_ == b.start_ &&
           a.accepting_ == b.accepting_ && a.delta_ == b.delta_;
  }

 private:
  int alphabet_size_ = 0;
  int start_ = 0;
  std::vector<bool> accepting_;
  std::vector<int> delta_;
  std::vector<std::vector<StateId>> allowed_;
};

// Thompson construction, subset construction, then minimization.
ConstraintDfa Compile(const ConstraintAst& ast, int alphabet_size);
inline ConstraintDfa Compile(const ConstraintAst& ast,
                             const ControlAlphabet& alphabet) {
  return Compile(ast, alphabet.size());
}

inline bool Accepts(const ConstraintDfa& dfa, const ControlStateSeq& seq) {
  return dfa.Accepts(seq);
}

// Emptiness of the symmetric difference over the product automaton.
bool DfaEquivalent(const ConstraintDfa& a, const ConstraintDfa& b);

// Minimizes an arbitrary (possibly non-minimal) transition table. Exposed
// so the minimality property can be checked by re-minimizing.
ConstraintDfa Minimize(int alphabet_size, int start,
                       const std::vector<bool>& accepting,
                       const std::vector<int>& delta);

Json DfaToJson(const ConstraintDfa& dfa);
ConstraintDfa DfaFromJson(const Json& j);

}  // namespace ctrlgen

#endif  // CTRLGEN_CONSTRAINT_DFA_H_

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

#include "ctrlgen/constraint/dfa.h"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <utility>

#include "ctrlgen/core/errors.h"

namespace ctrlgen {
namespace {

// Thompson automaton. Symbol -1 on an edge means "any state".
struct Nfa {
  struct Edge {
    int symbol;
    int target;
  };
  std::vector<std::vector<int>> epsilon;
  std::vector<std::vector<Edge>> edges;

  int NewState() {
    epsilon.emplace_back();
    edges.emplace_back();
    return static_cast<int>(epsilon.size()) - 1;
  }
};

struct Fragment {
  int in;
  int out;
};

Fragment Build(Nfa& nfa, const ConstraintAst& ast) {
  using Kind = ConstraintAst::Kind;
  switch (ast.kind) {
    case Kind::kLiteral:
    case Kind::kWildcard: {
      int a = nfa.NewState(), b = nfa.NewState();
      nfa.edges[a].push_back({ast.kind == Kind::kLiteral ? ast.state : -1, b});
      return {a, b};
    }
    case Kind::kEpsilon: {
      int a = nfa.NewState(), b = nfa.NewState();
      nfa.epsilon[a].push_back(b);
      return {a, b};
    }
    case Kind::kConcat: {
      Fragment f = Build(nfa, ast.children.front());
      for (std::size_t i = 1; i < ast.children.size(); ++i) {
        Fragment g = Build(nfa, ast.children[i]);
        nfa.epsilon[f.out].push_back(g.in);
        f.out = g.out;
      }
      return f;
    }
    case Kind::kAlternation: {
      int a = nfa.NewState(), b = nfa.NewState();
      for (const auto& c : ast.children) {
        Fragment g = Build(nfa, c);
        nfa.epsilon[a].push_back(g.in);
        nfa.epsilon[g.out].push_back(b);
      }
      return {a, b};
    }
    case Kind::kStar:
    case Kind::kPlus:
    case Kind::kOptional: {
      int a = nfa.NewState(), b = nfa.NewState();
      Fragment g = Build(nfa, ast.children.front());
      nfa.epsilon[a].push_back(g.in);
      nfa.epsilon[g.out].push_back(b);
      if (ast.kind != Kind::kPlus) nfa.epsilon[a].push_back(b);
      if (ast.kind != Kind::kOptional) nfa.epsilon[g.out].push_back(g.in);
      return {a, b};
    }
  }
  throw DomainError("unknown AST node");
}

std::vector<int> Closure(const Nfa& nfa, std::vector<int> states) {
  std::vector<bool> seen(nfa.epsilon.size(), false);
  std::vector<int> stack = states;
  for (int s : states) seen[s] = true;
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    for (int t : nfa.epsilon[s]) {
      if (!seen[t]) {
        seen[t] = true;
        states.push_back(t);
        stack.push_back(t);
      }
    }
  }
  std::sort(states.begin(), states.end());
  return states;
}

}  // namespace

ConstraintDfa::ConstraintDfa(int alphabet_size, int start,
                             std::vector<bool> accepting,
                             std::vector<int> delta)
    : alphabet_size_(alphabet_size),
      start_(start),
      accepting_(std::move(accepting)),
      delta_(std::move(delta)) {
  const int n = num_states();
  if (alphabet_size_ < 1 || n < 1 || start_ < 0 || start_ >= n ||
      delta_.size() != static_cast<std::size_t>(n) * alphabet_size_) {
    throw FormatError("inconsistent automaton shape");
  }
  for (int t : delta_) {
    if (t != kReject && (t < 0 || t >= n)) {
      throw FormatError("automaton transition out of range");
    }
  }
  allowed_.assign(n, {});
  for (int s = 0; s < n; ++s) {
    for (int c = 0; c < alphabet_size_; ++c) {
      if (delta_[s * alphabet_size_ + c] != kReject) allowed_[s].push_back(c);
    }
  }
}

int ConstraintDfa::Step(int dfa_state, StateId control_state) const {
  if (dfa_state == kReject) return kReject;
  if (control_state < 0 || control_state >= alphabet_size_) return kReject;
  return delta_[dfa_state * alphabet_size_ + control_state];
}

bool ConstraintDfa::Accepts(const ControlStateSeq& seq) const {
  int s = start_;
  for (StateId c : seq) {
    s = Step(s, c);
    if (s == kReject) return false;
  }
  return accepting_[s];
}

bool ConstraintDfa::LanguageEmpty() const {
  return std::none_of(accepting_.begin(), accepting_.end(),
                      [](bool b) { return b; });
}

ConstraintDfa Minimize(int alphabet_size, int start,
                       const std::vector<bool>& accepting,
                       const std::vector<int>& delta) {
  const int n = static_cast<int>(accepting.size());
  const int k = alphabet_size;

  // Co-reachability: states from which acceptance is possible.
  std::vector<std::vector<int>> reverse(n);
  for (int s = 0; s < n; ++s) {
    for (int c = 0; c < k; ++c) {
      int t = delta[s * k + c];
      if (t != ConstraintDfa::kReject) reverse[t].push_back(s);
    }
  }
  std::vector<bool> live(n, false);
  std::vector<int> stack;
  for (int s = 0; s < n; ++s) {
    if (accepting[s]) {
      live[s] = true;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    for (int p : reverse[s]) {
      if (!live[p]) {
        live[p] = true;
        stack.push_back(p);
      }
    }
  }
  if (!live[start]) {
    return ConstraintDfa(k, 0, {false}, std::vector<int>(k, ConstraintDfa::kReject));
  }
  auto target = [&](int s, int c) {
    int t = delta[s * k + c];
    return (t == ConstraintDfa::kReject || !live[t]) ? ConstraintDfa::kReject : t;
  };

  // Moore refinement over live states; kReject is its own class.
  std::vector<int> cls(n, -1);
  for (int s = 0; s < n; ++s) {
    if (live[s]) cls[s] = accepting[s] ? 1 : 0;
  }
  int num_classes = 0;
  while (true) {
    std::map<std::vector<int>, int> signature_ids;
    std::vector<int> next(n, -1);
    for (int s = 0; s < n; ++s) {
      if (!live[s]) continue;
      std::vector<int> sig;
      sig.reserve(k + 1);
      sig.push_back(cls[s]);
      for (int c = 0; c < k; ++c) {
        int t = target(s, c);
        sig.push_back(t == ConstraintDfa::kReject ? -1 : cls[t]);
      }
      auto [it, inserted] =
          signature_ids.emplace(std::move(sig), static_cast<int>(signature_ids.size()));
      next[s] = it->second;
    }
    int count = static_cast<int>(signature_ids.size());
    cls = std::move(next);
    if (count == num_classes) break;
    num_classes = count;
  }

  // Canonical numbering: breadth-first from the start in symbol order.
  std::vector<int> representative(num_classes, -1);
  for (int s = 0; s < n; ++s) {
    if (live[s] && representative[cls[s]] < 0) representative[cls[s]] = s;
  }
  std::vector<int> order(num_classes, -1);
  std::vector<int> by_order;
  std::deque<int> queue{cls[start]};
  order[cls[start]] = 0;
  by_order.push_back(cls[start]);
  while (!queue.empty()) {
    int c0 = queue.front();
    queue.pop_front();
    int s = representative[c0];
    for (int c = 0; c < k; ++c) {
      int t = target(s, c);
      if (t == ConstraintDfa::kReject) continue;
      int tc = cls[t];
      if (order[tc] < 0) {
        order[tc] = static_cast<int>(by_order.size());
        by_order.push_back(tc);
        queue.push_back(tc);
      }
    }
  }
  const int m = static_cast<int>(by_order.size());
  std::vector<bool> acc(m);
  std::vector<int> out(static_cast<std::size_t>(m) * k, ConstraintDfa::kReject);
  for (int i = 0; i < m; ++i) {
    int s = representative[by_order[i]];
    acc[i] = accepting[s];
    for (int c = 0; c < k; ++c) {
      int t = target(s, c);
      if (t != ConstraintDfa::kReject) out[i * k + c] = order[cls[t]];
    }
  }
  return ConstraintDfa(k, 0, std::move(acc), std::move(out));
}

ConstraintDfa Compile(const ConstraintAst& ast, int alphabet_size) {
  if (alphabet_size < 1) throw DomainError("alphabet size must be positive");
  if (ast.MaxLiteral() >= alphabet_size) {
    throw DomainError("constraint mentions state " +
                      std::to_string(ast.MaxLiteral()) +
                      " outside alphabet of size " +
                      std::to_string(alphabet_size));
  }
  Nfa nfa;
  Fragment f = Build(nfa, ast);
  const int k = alphabet_size;

  std::map<std::vector<int>, int> ids;
  std::vector<std::vector<int>> subsets;
  std::vector<int> delta;
  std::vector<bool> accepting;
  auto intern = [&](std::vector<int> subset) {
    auto [it, inserted] = ids.emplace(subset, static_cast<int>(subsets.size()));
    if (inserted) {
      accepting.push_back(std::binary_search(subset.begin(), subset.end(), f.out));
      subsets.push_back(std::move(subset));
      delta.resize(subsets.size() * k, ConstraintDfa::kReject);
    }
    return it->second;
  };
  intern(Closure(nfa, {f.in}));
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    for (int c = 0; c < k; ++c) {
      std::set<int> moved;
      for (int s : subsets[i]) {
        for (const auto& e : nfa.edges[s]) {
          if (e.symbol == -1 || e.symbol == c) moved.insert(e.target);
        }
      }
      if (moved.empty()) continue;
      int t = intern(Closure(nfa, std::vector<int>(moved.begin(), moved.end())));
      delta[i * k + c] = t;
    }
  }
  return Minimize(k, 0, accepting, delta);
}

bool DfaEquivalent(const ConstraintDfa& a, const ConstraintDfa& b) {
  if (a.alphabet_size() != b.alphabet_size()) return false;
  const int k = a.alphabet_size();
  auto accept = [](const ConstraintDfa& d, int s) {
    return s != ConstraintDfa::kReject && d.IsAccepting(s);
  };
  std::set<std::pair<int, int>> seen;
  std::deque<std::pair<int, int>> queue{{a.start(), b.start()}};
  seen.insert(queue.front());
  while (!queue.empty()) {
    auto [s, t] = queue.front();
    queue.pop_front();
    if (accept(a, s) != accept(b, t)) return false;
    for (int c = 0; c < k; ++c) {
      std::pair<int, int> next{a.Step(s, c), b.Step(t, c)};
      if (next.first == ConstraintDfa::kReject &&
          next.second == ConstraintDfa::kReject) {
        continue;
      }
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  return true;
}

Json DfaToJson(const ConstraintDfa& dfa) {
  Json j;
  j["alphabet_size"] = dfa.alphabet_size();
  j["num_states"] = dfa.num_states();
  j["start"] = dfa.start();
  Json acc = Json::array();
  for (int s = 0; s < dfa.num_states(); ++s) {
    if (dfa.IsAccepting(s)) acc.push_back(s);
  }
  j["accepting"] = std::move(acc);
  Json rows = Json::array();
  for (int s = 0; s < dfa.num_states(); ++s) {
    Json row = Json::array();
    for (int c = 0; c < dfa.alphabet_size(); ++c) row.push_back(dfa.Step(s, c));
    rows.push_back(std::move(row));
  }
  j["delta"] = std::move(rows);
  return j;
}

ConstraintDfa DfaFromJson(const Json& j) {
  try {
    int k = j.at("alphabet_size").get<int>();
    int n = j.at("num_states").get<int>();
    int start = j.at("start").get<int>();
    if (n < 1 || k < 1) throw FormatError("automaton must have states and symbols");
    std::vector<bool> acc(n, false);
    for (const auto& s : j.at("accepting")) {
      int id = s.get<int>();
      if (id < 0 || id >= n) throw FormatError("accepting state out of range");
      acc[id] = true;
    }
    const auto& rows = j.at("delta");
    if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
      throw FormatError("automaton delta has wrong row count");
    }
    std::vector<int> delta;
    for (const auto& row : rows) {
      if (!row.is_array() || static_cast<int>(row.size()) != k) {
        throw FormatError("automaton delta has wrong row width");
      }
      for (const auto& t : row) delta.push_back(t.get<int>());
    }
    ConstraintDfa raw(k, start, acc, delta);
    return raw;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bad automaton JSON: ") + e.what());
  }
}

}  // namespace ctrlgen

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

#ifndef CTRLGEN_CONSTRAINT_GRAPH_VIEW_H_
#define CTRLGEN_CONSTRAINT_GRAPH_VIEW_H_

#include <utility>
#include <vector>

#include "ctrlgen/constraint/ast.h"
#include "ctrlgen/core/codec.h"

namespace ctrlgen {

// Node-link form of a constraint for the visual editor. The graph is a
// directed acyclic series-parallel graph from `start` to `accept`; every
// start->accept path spells a state sequence. Repetition is never an edge:
// it is a `repeat` annotation on a state/wildcard node, or on an or-junction
// where it applies to the whole group up to the point its branches rejoin.
// An or-junction with a single branch is a plain group. `join` names the
// node where an or-junction's branches meet again; when absent (-1) the
// immediate post-dominator is used, which is ambiguous for single-branch
// groups.
struct ConstraintGraphView {
  enum class NodeKind { kStart, kAccept, kState, kWildcard, kOr };
  enum class Repeat { kNone, kStar, kPlus, kOptional };

  struct Node {
    int id = 0;
    NodeKind kind = NodeKind::kState;
    StateId state = -1;  // kState only
    Repeat repeat = Repeat::kNone;
    int join = -1;  // kOr only
    friend bool operator==(const Node&, const Node&) = default;
  };

  std::vector<Node> nodes;
  std::vector<std::pair<int, int>> edges;

  friend bool operator==(const ConstraintGraphView&,
                         const ConstraintGraphView&) = default;
};

ConstraintGraphView ToGraph(const ConstraintAst& ast);

// Throws GraphError for dangling edges, cycles, missing or duplicate
// start/accept nodes, forks without an or-junction, and branches that do
// not rejoin.
ConstraintAst FromGraph(const ConstraintGraphView& view);

// {"nodes":[{"id":0,"kind":"start"},{"id":1,"kind":"state-literal",
//   "state":0,"letter":"A","repeat":"plus"},{"id":2,"kind":"or-junction",
//   "join":5},...],"edges":[[0,1],...]}
// Kinds: start, accept, state-literal, wildcard, or-junction.
// Repeats: star, plus, optional.
Json GraphToJson(const ConstraintGraphView& view);
ConstraintGraphView GraphFromJson(const Json& j);

}  // namespace ctrlgen

#endif  // CTRLGEN_CONSTRAINT_GRAPH_VIEW_H_

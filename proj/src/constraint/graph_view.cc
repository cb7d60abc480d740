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

#include "ctrlgen/constraint/graph_view.h"

#include <algorithm>
#include <map>
#include <set>

#include "ctrlgen/core/errors.h"

namespace ctrlgen {
namespace {

using Kind = ConstraintGraphView::NodeKind;
using Repeat = ConstraintGraphView::Repeat;

class GraphBuilder {
 public:
  ConstraintGraphView Build(const ConstraintAst& ast) {
    int start = NewNode(Kind::kStart);
    std::vector<int> exits = Emit(ast, {start});
    int accept = NewNode(Kind::kAccept);
    Connect(exits, accept);
    return std::move(view_);
  }

 private:
  int NewNode(Kind kind, StateId state = -1, Repeat repeat = Repeat::kNone) {
    int id = static_cast<int>(view_.nodes.size());
    view_.nodes.push_back({id, kind, state, repeat, -1});
    return id;
  }

  // Closes group `junction` once its exits are wired to a successor.
  std::vector<int> Close(int junction, std::vector<int> exits) {
    open_.push_back({junction, exits});
    return exits;
  }

  void Connect(const std::vector<int>& preds, int node) {
    std::erase_if(open_, [&](const OpenGroup& g) {
      for (int e : g.exits) {
        if (std::find(preds.begin(), preds.end(), e) == preds.end()) {
          return false;
        }
      }
      view_.nodes[g.junction].join = node;
      return true;
    });
    for (int p : preds) {
      std::pair<int, int> e{p, node};
      if (std::find(view_.edges.begin(), view_.edges.end(), e) ==
          view_.edges.end()) {
        view_.edges.push_back(e);
      }
    }
  }

  int Leaf(const ConstraintAst& ast, Repeat repeat) {
    return ast.kind == ConstraintAst::Kind::kLiteral
               ? NewNode(Kind::kState, ast.state, repeat)
               : NewNode(Kind::kWildcard, -1, repeat);
  }

  static void AppendUnique(std::vector<int>& out, const std::vector<int>& in) {
    for (int n : in) {
      if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    }
  }

  std::vector<int> Branches(int junction,
                            const std::vector<ConstraintAst>& children) {
    std::vector<int> exits;
    for (const auto& c : children) AppendUnique(exits, Emit(c, {junction}));
    return exits;
  }

  std::vector<int> Emit(const ConstraintAst& ast, std::vector<int> preds) {
    using AK = ConstraintAst::Kind;
    switch (ast.kind) {
      case AK::kLiteral:
      case AK::kWildcard: {
        int n = Leaf(ast, Repeat::kNone);
        Connect(preds, n);
        return {n};
      }
      case AK::kEpsilon:
        return preds;
      case AK::kConcat:
        for (const auto& c : ast.children) preds = Emit(c, std::move(preds));
        return preds;
      case AK::kAlternation: {
        int o = NewNode(Kind::kOr);
        Connect(preds, o);
        return Close(o, Branches(o, ast.children));
      }
      case AK::kStar:
      case AK::kPlus:
      case AK::kOptional: {
        Repeat repeat = ast.kind == AK::kStar   ? Repeat::kStar
                        : ast.kind == AK::kPlus ? Repeat::kPlus
                                                : Repeat::kOptional;
        const ConstraintAst& child = ast.children.front();
        if (child.kind == AK::kLiteral || child.kind == AK::kWildcard) {
          int n = Leaf(child, repeat);
          Connect(preds, n);
          return {n};
        }
        int o = NewNode(Kind::kOr, -1, repeat);
        Connect(preds, o);
        if (child.kind == AK::kAlternation) {
          return Close(o, Branches(o, child.children));
        }
        return Close(o, Emit(child, {o}));
      }
    }
    throw GraphError("unknown AST node");
  }

  struct OpenGroup {
    int junction;
    std::vector<int> exits;
  };

  ConstraintGraphView view_;
  std::vector<OpenGroup> open_;
};

ConstraintAst ApplyRepeat(ConstraintAst ast, Repeat repeat) {
  switch (repeat) {
    case Repeat::kNone: return ast;
    case Repeat::kStar: return ConstraintAst::Star(std::move(ast));
    case Repeat::kPlus: return ConstraintAst::Plus(std::move(ast));
    case Repeat::kOptional: return ConstraintAst::Optional(std::move(ast));
  }
  return ast;
}

class GraphReader {
 public:
  explicit GraphReader(const ConstraintGraphView& view) : view_(view) {}

  ConstraintAst Read() {
    Index();
    CheckAcyclicAndConnected();
    ComputePostDominators();
    const auto& first = succ_[start_];
    if (first.size() != 1) {
      throw GraphError("start node must have exactly one successor");
    }
    return ReadSequence(first[0], accept_);
  }

 private:
  void Index() {
    const int n = static_cast<int>(view_.nodes.size());
    for (int i = 0; i < n; ++i) {
      const auto& node = view_.nodes[i];
      if (!pos_.emplace(node.id, i).second) {
        throw GraphError("duplicate node id " + std::to_string(node.id));
      }
      if (node.kind == Kind::kStart) {
        if (start_ >= 0) throw GraphError("more than one start node");
        start_ = i;
      }
      if (node.kind == Kind::kAccept) {
        if (accept_ >= 0) throw GraphError("more than one accept node");
        accept_ = i;
      }
      if (node.kind == Kind::kState && node.state < 0) {
        throw GraphError("state node " + std::to_string(node.id) +
                         " has no state");
      }
      if ((node.kind == Kind::kStart || node.kind == Kind::kAccept) &&
          node.repeat != Repeat::kNone) {
        throw GraphError("start/accept nodes cannot repeat");
      }
    }
    if (start_ < 0 || accept_ < 0) {
      throw GraphError("graph needs one start and one accept node");
    }
    succ_.assign(n, {});
    pred_count_.assign(n, 0);
    for (const auto& [from, to] : view_.edges) {
      auto a = pos_.find(from), b = pos_.find(to);
      if (a == pos_.end() || b == pos_.end()) {
        throw GraphError("dangling edge " + std::to_string(from) + "->" +
                         std::to_string(to));
      }
      succ_[a->second].push_back(b->second);
      ++pred_count_[b->second];
    }
    if (pred_count_[start_] != 0) throw GraphError("edge into start node");
    if (!succ_[accept_].empty()) throw GraphError("edge out of accept node");
    for (int i = 0; i < n; ++i) {
      Kind k = view_.nodes[i].kind;
      if ((k == Kind::kState || k == Kind::kWildcard) && succ_[i].size() != 1) {
        throw GraphError("node " + std::to_string(view_.nodes[i].id) +
                         " must have exactly one successor; use an "
                         "or-junction to branch");
      }
      if (k == Kind::kOr && succ_[i].empty()) {
        throw GraphError("or-junction " + std::to_string(view_.nodes[i].id) +
                         " has no branches");
      }
    }
  }

  void CheckAcyclicAndConnected() {
    const int n = static_cast<int>(succ_.size());
    std::vector<int> indegree = pred_count_;
    std::vector<int> ready;
    for (int i = 0; i < n; ++i) {
      if (indegree[i] == 0) ready.push_back(i);
    }
    while (!ready.empty()) {
      int u = ready.back();
      ready.pop_back();
      topo_.push_back(u);
      for (int v : succ_[u]) {
        if (--indegree[v] == 0) ready.push_back(v);
      }
    }
    if (static_cast<int>(topo_.size()) != n) {
      throw GraphError("cycle in constraint graph; use a repeat annotation");
    }
    std::vector<bool> reach(n, false);
    reach[start_] = true;
    for (int u : topo_) {
      if (!reach[u]) continue;
      for (int v : succ_[u]) reach[v] = true;
    }
    for (int i = 0; i < n; ++i) {
      if (!reach[i]) {
        throw GraphError("node " + std::to_string(view_.nodes[i].id) +
                         " is not reachable from start");
      }
    }
  }

  void ComputePostDominators() {
    const int n = static_cast<int>(succ_.size());
    pdom_.assign(n, {});
    for (auto it = topo_.rbegin(); it != topo_.rend(); ++it) {
      int u = *it;
      std::set<int> acc;
      bool first = true;
      for (int v : succ_[u]) {
        if (first) {
          acc = pdom_[v];
          first = false;
        } else {
          std::set<int> inter;
          std::set_intersection(acc.begin(), acc.end(), pdom_[v].begin(),
                                pdom_[v].end(),
                                std::inserter(inter, inter.begin()));
          acc = std::move(inter);
        }
      }
      if (succ_[u].empty() && u != accept_) {
        throw GraphError("node " + std::to_string(view_.nodes[u].id) +
                         " cannot reach accept");
      }
      acc.insert(u);
      pdom_[u] = std::move(acc);
    }
  }

  int Join(int junction) const {
    int declared = view_.nodes[junction].join;
    if (declared >= 0) {
      auto it = pos_.find(declared);
      if (it == pos_.end() || it->second == junction ||
          pdom_[junction].count(it->second) == 0) {
        throw GraphError("or-junction " +
                         std::to_string(view_.nodes[junction].id) +
                         " declares join " + std::to_string(declared) +
                         " that not every branch reaches");
      }
      return it->second;
    }
    int best = -1;
    std::size_t best_size = 0;
    for (int p : pdom_[junction]) {
      if (p == junction) continue;
      if (pdom_[p].size() > best_size) {
        best = p;
        best_size = pdom_[p].size();
      }
    }
    if (best < 0) throw GraphError("or-junction branches never rejoin");
    return best;
  }

  ConstraintAst ReadSequence(int u, int stop) {
    std::vector<ConstraintAst> parts;
    while (u != stop) {
      if (u == accept_) {
        throw GraphError("branch leaves its or-junction before rejoining");
      }
      const auto& node = view_.nodes[u];
      switch (node.kind) {
        case Kind::kState:
          parts.push_back(
              ApplyRepeat(ConstraintAst::Literal(node.state), node.repeat));
          u = succ_[u][0];
          break;
        case Kind::kWildcard:
          parts.push_back(ApplyRepeat(ConstraintAst::Wildcard(), node.repeat));
          u = succ_[u][0];
          break;
        case Kind::kOr: {
          int join = Join(u);
          std::vector<ConstraintAst> branches;
          for (int v : succ_[u]) {
            branches.push_back(v == join ? ConstraintAst::Epsilon()
                                         : ReadSequence(v, join));
          }
          parts.push_back(ApplyRepeat(
              ConstraintAst::Alternation(std::move(branches)), node.repeat));
          u = join;
          break;
        }
        case Kind::kStart:
        case Kind::kAccept:
          throw GraphError("unexpected start/accept node inside the graph");
      }
    }
    return ConstraintAst::Concat(std::move(parts));
  }

  const ConstraintGraphView& view_;
  std::map<int, int> pos_;
  int start_ = -1;
  int accept_ = -1;
  std::vector<std::vector<int>> succ_;
  std::vector<int> pred_count_;
  std::vector<int> topo_;
  std::vector<std::set<int>> pdom_;
};

const char* KindString(Kind kind) {
  switch (kind) {
    case Kind::kStart: return "start";
    case Kind::kAccept: return "accept";
    case Kind::kState: return "state-literal";
    case Kind::kWildcard: return "wildcard";
    case Kind::kOr: return "or-junction";
  }
  return "?";
}

const char* RepeatString(Repeat repeat) {
  switch (repeat) {
    case Repeat::kStar: return "star";
    case Repeat::kPlus: return "plus";
    case Repeat::kOptional: return "optional";
    case Repeat::kNone: return "";
  }
  return "";
}

}  // namespace

ConstraintGraphView ToGraph(const ConstraintAst& ast) {
  return GraphBuilder().Build(ast);
}

ConstraintAst FromGraph(const ConstraintGraphView& view) {
  return GraphReader(view).Read();
}

Json GraphToJson(const ConstraintGraphView& view) {
  Json nodes = Json::array();
  for (const auto& n : view.nodes) {
    Json j;
    j["id"] = n.id;
    j["kind"] = KindString(n.kind);
    if (n.kind == Kind::kState) {
      j["state"] = n.state;
      if (n.state >= 0 && n.state < 26) {
        j["letter"] = std::string(1, static_cast<char>('A' + n.state));
      }
    }
    if (n.repeat != Repeat::kNone) j["repeat"] = RepeatString(n.repeat);
    if (n.kind == Kind::kOr && n.join >= 0) j["join"] = n.join;
    nodes.push_back(std::move(j));
  }
  Json edges = Json::array();
  for (const auto& [a, b] : view.edges) edges.push_back(Json::array({a, b}));
  Json out;
  out["nodes"] = std::move(nodes);
  out["edges"] = std::move(edges);
  return out;
}

ConstraintGraphView GraphFromJson(const Json& j) {
  ConstraintGraphView view;
  try {
    for (const auto& n : j.at("nodes")) {
      ConstraintGraphView::Node node;
      node.id = n.at("id").get<int>();
      const std::string kind = n.at("kind").get<std::string>();
      if (kind == "start") {
        node.kind = Kind::kStart;
      } else if (kind == "accept") {
        node.kind = Kind::kAccept;
      } else if (kind == "state-literal") {
        node.kind = Kind::kState;
        if (n.contains("state")) {
          node.state = n.at("state").get<int>();
        } else if (n.contains("letter")) {
          std::string letter = n.at("letter").get<std::string>();
          if (letter.size() != 1 || letter[0] < 'A' || letter[0] > 'Z') {
            throw GraphError("bad letter '" + letter + "'");
          }
          node.state = letter[0] - 'A';
        }
      } else if (kind == "wildcard") {
        node.kind = Kind::kWildcard;
      } else if (kind == "or-junction") {
        node.kind = Kind::kOr;
        if (n.contains("join")) node.join = n.at("join").get<int>();
      } else {
        throw GraphError("unknown node kind '" + kind + "'");
      }
      if (n.contains("repeat")) {
        const std::string r = n.at("repeat").get<std::string>();
        if (r == "star") {
          node.repeat = Repeat::kStar;
        } else if (r == "plus") {
          node.repeat = Repeat::kPlus;
        } else if (r == "optional") {
          node.repeat = Repeat::kOptional;
        } else if (!r.empty()) {
          throw GraphError("unknown repeat '" + r + "'");
        }
      }
      view.nodes.push_back(node);
    }
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) {
        throw GraphError("edge must be a [from, to] pair");
      }
      view.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
  } catch (const Json::exception& e) {
    throw GraphError(std::string("malformed graph JSON: ") + e.what());
  }
  return view;
}

}  // namespace ctrlgen

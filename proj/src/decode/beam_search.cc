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

#include "ctrlgen/decode/beam_search.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

#include "ctrlgen/core/errors.h"
#include "ctrlgen/model/joint_model.h"

namespace ctrlgen {
namespace {

constexpr std::size_t kTreeFanout = 8;
constexpr int kNoNode = -1;

struct Hyp {
  std::vector<TokenId> tokens;
  std::vector<StateId> states;
  std::vector<double> steps;
  double score = 0.0;
  DecoderState dstate;
  int dfa_state = 0;
  int node = kNoNode;
};

struct Candidate {
  int parent = 0;
  StateId z = 0;  // K for the terminal state
  TokenId y = 0;
  double step = 0.0;
  double score = 0.0;
  int node = kNoNode;
  // Set when the word fills the last slot before max_len; the forced
  // terminal step is already folded into `score`.
  bool closes = false;
  double end_step = 0.0;
  DecoderState after{};
};

struct FlatNode {
  std::string sym;
  BeamTreeNode::Kind kind;
  double lp;
  bool on_beam;
  int parent;
  std::vector<int> children;
};

// Lexicographic comparison of `prefix + {last}` sequences.
template <typename T>
int CompareExtended(const std::vector<T>& a, T a_last, const std::vector<T>& b,
                    T b_last) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  // Equal-length histories in a beam step; fall through to the last item.
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  if (a_last != b_last) return a_last < b_last ? -1 : 1;
  return 0;
}

class BeamSearch {
 public:
  BeamSearch(const ModelParams& params, const DataTable& table,
             const ConstraintDfa* dfa, const DecodeOptions& options)
      : params_(params),
        dfa_(dfa),
        options_(options),
        input_(EncodeTable(params, table)),
        k_(params.num_states()) {
    if (options.beam_width < 1) throw DomainError("beam width must be >= 1");
    if (options.max_len < 1) throw DomainError("max_len must be >= 1");
    if (dfa_ != nullptr) {
      if (dfa_->alphabet_size() > k_) {
        throw DomainError("constraint alphabet of size " +
                          std::to_string(dfa_->alphabet_size()) +
                          " exceeds the model's " + std::to_string(k_) +
                          " control states");
      }
      if (dfa_->LanguageEmpty()) {
        throw NoFeasibleOutput("constraint accepts no state sequence");
      }
      distance_ = DistanceToAccept(*dfa_);
    }
  }

  GenerationResult Run(const std::vector<ForcedStep>& prefix) {
    Hyp start;
    start.dstate = InitialState(params_, input_);
    start.dfa_state = dfa_ ? dfa_->start() : 0;
    if (options_.capture_tree) {
      start.node = NewNode(kNoNode, "<bos>", BeamTreeNode::Kind::kWord, 0.0, true);
    }
    for (const auto& [z, y] : prefix) Force(start, z, y);
    if (static_cast<int>(start.tokens.size()) >= options_.max_len) {
      throw DomainError("forced prefix of " + std::to_string(prefix.size()) +
                        " words leaves no room for EOS within max_len " +
                        std::to_string(options_.max_len));
    }
    if (dfa_ && static_cast<int>(start.tokens.size()) +
                        distance_[start.dfa_state] + 1 > options_.max_len) {
      throw NoFeasibleOutput("no accepted state sequence fits in max_len " +
                             std::to_string(options_.max_len));
    }

    std::vector<Hyp> live{std::move(start)};
    std::vector<Hyp> finished;
    while (!live.empty()) {
      std::vector<Candidate> pool = Expand(live);
      std::sort(pool.begin(), pool.end(),
                [&](const Candidate& a, const Candidate& b) {
                  return Before(live, a, b);
                });
      // Finished candidates leave the pool; only live ones compete for slots.
      std::vector<Hyp> next;
      for (const Candidate& c : pool) {
        bool done = c.z == k_ || c.closes;
        if (!done && next.size() >= static_cast<std::size_t>(options_.beam_width)) {
          continue;
        }
        if (c.node != kNoNode) MarkOnBeam(c.node);
        Hyp h = Extend(live[c.parent], c);
        if (done) {
          finished.push_back(std::move(h));
        } else {
          next.push_back(std::move(h));
        }
      }
      live = std::move(next);
      if (!finished.empty() && !live.empty()) {
        double best_finished = finished.front().score;
        for (const Hyp& f : finished) best_finished = std::max(best_finished, f.score);
        double best_live = live.front().score;
        for (const Hyp& l : live) best_live = std::max(best_live, l.score);
        // Extensions only lower scores.
        if (best_finished >= best_live) break;
      }
    }
    if (finished.empty()) {
      throw NoFeasibleOutput("no hypothesis satisfies the constraint within " +
                             std::to_string(options_.max_len) + " words");
    }
    const Hyp* best = &finished.front();
    for (const Hyp& f : finished) {
      if (f.score > best->score ||
          (f.score == best->score &&
           (f.tokens < best->tokens ||
            (f.tokens == best->tokens && f.states < best->states)))) {
        best = &f;
      }
    }
    return ToResult(*best);
  }

 private:
  static std::vector<int> DistanceToAccept(const ConstraintDfa& dfa) {
    const int n = dfa.num_states();
    std::vector<std::vector<int>> preds(n);
    for (int s = 0; s < n; ++s) {
      for (int c = 0; c < dfa.alphabet_size(); ++c) {
        int t = dfa.Step(s, c);
        if (t != ConstraintDfa::kReject) preds[t].push_back(s);
      }
    }
    std::vector<int> dist(n, std::numeric_limits<int>::max() / 2);
    std::deque<int> queue;
    for (int s = 0; s < n; ++s) {
      if (dfa.IsAccepting(s)) {
        dist[s] = 0;
        queue.push_back(s);
      }
    }
    while (!queue.empty()) {
      int s = queue.front();
      queue.pop_front();
      for (int p : preds[s]) {
        if (dist[p] > dist[s] + 1) {
          dist[p] = dist[s] + 1;
          queue.push_back(p);
        }
      }
    }
    return dist;
  }

  void Force(Hyp& h, StateId z, TokenId y) {
    if (z < 0 || z >= k_) {
      throw DomainError("forced state " + std::to_string(z) + " outside 0.." +
                        std::to_string(k_ - 1));
    }
    if (y < 0 || y >= params_.words().size() || !Vocabulary::IsEmittable(y)) {
      throw DomainError("forced word id " + std::to_string(y) + " is not emittable");
    }
    int next_dfa = h.dfa_state;
    if (dfa_) {
      next_dfa = z < dfa_->alphabet_size() ? dfa_->Step(h.dfa_state, z)
                                           : ConstraintDfa::kReject;
      if (next_dfa == ConstraintDfa::kReject) {
        throw ConstraintViolation("forced prefix leaves the constraint at word " +
                                  std::to_string(h.tokens.size() + 1));
      }
    }
    StepView v = Observe(params_, h.dstate);
    double sl = StateLogProbs(params_, v)(z);
    double step = sl + WordLogProbs(params_, h.dstate, v, z)(y);
    if (h.node != kNoNode) {
      int sn = NewNode(h.node, std::string(1, static_cast<char>('A' + z)),
                       BeamTreeNode::Kind::kState, h.score + sl, true);
      h.node = NewNode(sn, params_.words().TokenOf(y), BeamTreeNode::Kind::kWord,
                       h.score + step, true);
    }
    h.dstate = Advance(params_, h.dstate, v, z, y);
    h.tokens.push_back(y);
    h.states.push_back(z);
    h.steps.push_back(step);
    h.score += step;
    h.dfa_state = next_dfa;
  }

  std::vector<Candidate> Expand(const std::vector<Hyp>& live) {
    const int s_width = options_.beam_width;
    const int w_width = options_.beam_width;
    std::vector<Candidate> pool;
    views_.clear();
    for (int hi = 0; hi < static_cast<int>(live.size()); ++hi) {
      const Hyp& h = live[hi];
      const int len = static_cast<int>(h.tokens.size());
      StepView view = Observe(params_, h.dstate);
      Vec state_lp = StateLogProbs(params_, view);

      // Candidate states, best first; the terminal state competes too.
      std::vector<StateId> options;
      bool may_end = !dfa_ || dfa_->IsAccepting(h.dfa_state);
      if (may_end) options.push_back(k_);
      // The closing EOS counts towards max_len.
      const bool last_word = len + 2 == options_.max_len;
      if (len + 2 <= options_.max_len) {
        for (StateId z = 0; z < k_; ++z) {
          if (dfa_) {
            if (z >= dfa_->alphabet_size()) continue;
            int next = dfa_->Step(h.dfa_state, z);
            if (next == ConstraintDfa::kReject) continue;
            if (len + 2 + distance_[next] > options_.max_len) continue;
          }
          options.push_back(z);
        }
      }
      std::stable_sort(options.begin(), options.end(), [&](StateId a, StateId b) {
        if (state_lp(a) != state_lp(b)) return state_lp(a) > state_lp(b);
        return a < b;
      });
      if (options.size() > static_cast<std::size_t>(s_width)) options.resize(s_width);

      for (StateId z : options) {
        double zs = h.score + state_lp(z);
        int state_node = kNoNode;
        if (h.node != kNoNode) {
          state_node = NewNode(
              h.node, z == k_ ? "<end>" : std::string(1, static_cast<char>('A' + z)),
              BeamTreeNode::Kind::kState, zs, false);
        }
        if (z == k_) {
          Candidate c{.parent = hi, .z = z, .y = Vocabulary::kEos, .step = state_lp(z),
                      .score = zs};
          if (state_node != kNoNode) {
            c.node = NewNode(state_node, "<eos>", BeamTreeNode::Kind::kWord, zs, false);
          }
          pool.push_back(c);
          continue;
        }
        Vec word_lp = WordLogProbs(params_, h.dstate, view, z);
        std::vector<TokenId> words = TopWords(word_lp, w_width);
        for (TokenId y : words) {
          double step = state_lp(z) + word_lp(y);
          Candidate c{.parent = hi, .z = z, .y = y, .step = step,
                      .score = h.score + step};
          if (state_node != kNoNode) {
            c.node = NewNode(state_node, params_.words().TokenOf(y),
                             BeamTreeNode::Kind::kWord, c.score, false);
          }
          if (last_word) {
            // Only the terminal state may follow, so score it now.
            c.after = Advance(params_, h.dstate, view, z, y);
            c.end_step = StateLogProbs(params_, Observe(params_, c.after))(k_);
            c.closes = true;
            if (c.node != kNoNode) {
              double lp = c.score + c.end_step;
              int end = NewNode(c.node, "<end>", BeamTreeNode::Kind::kState, lp, false);
              c.node = NewNode(end, "<eos>", BeamTreeNode::Kind::kWord, lp, false);
            }
            c.score += c.end_step;
          }
          pool.push_back(c);
        }
      }
      views_.push_back(std::move(view));
    }
    return pool;
  }

  std::vector<TokenId> TopWords(const Vec& lp, int width) const {
    std::vector<TokenId> ids;
    for (TokenId y = 0; y < lp.size(); ++y) {
      if (Vocabulary::IsEmittable(y) && lp(y) > -std::numeric_limits<double>::infinity()) {
        ids.push_back(y);
      }
    }
    auto better = [&](TokenId a, TokenId b) {
      if (lp(a) != lp(b)) return lp(a) > lp(b);
      return a < b;
    };
    if (ids.size() > static_cast<std::size_t>(width)) {
      std::partial_sort(ids.begin(), ids.begin() + width, ids.end(), better);
      ids.resize(width);
    } else {
      std::sort(ids.begin(), ids.end(), better);
    }
    return ids;
  }

  bool Before(const std::vector<Hyp>& live, const Candidate& a,
              const Candidate& b) const {
    if (a.score != b.score) return a.score > b.score;
    const Hyp& ha = live[a.parent];
    const Hyp& hb = live[b.parent];
    int c = CompareExtended(ha.tokens, a.y, hb.tokens, b.y);
    if (c != 0) return c < 0;
    return CompareExtended(ha.states, a.z, hb.states, b.z) < 0;
  }

  Hyp Extend(const Hyp& parent, const Candidate& c) {
    Hyp h;
    h.tokens = parent.tokens;
    h.states = parent.states;
    h.steps = parent.steps;
    h.steps.push_back(c.step);
    h.score = c.score;
    h.node = c.node;
    if (c.z == k_) {
      h.dstate = parent.dstate;
      h.dfa_state = parent.dfa_state;
      return h;
    }
    h.tokens.push_back(c.y);
    h.states.push_back(c.z);
    h.dfa_state = dfa_ ? dfa_->Step(parent.dfa_state, c.z) : 0;
    if (c.closes) {
      h.steps.push_back(c.end_step);
      h.dstate = c.after;
      return h;
    }
    h.dstate = Advance(params_, parent.dstate, views_[c.parent], c.z, c.y);
    return h;
  }

  int NewNode(int parent, std::string sym, BeamTreeNode::Kind kind, double lp,
              bool on_beam) {
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back({std::move(sym), kind, lp, on_beam, parent, {}});
    if (parent != kNoNode) nodes_[parent].children.push_back(id);
    return id;
  }

  void MarkOnBeam(int node) {
    for (; node != kNoNode && !nodes_[node].on_beam; node = nodes_[node].parent) {
      nodes_[node].on_beam = true;
    }
  }

  BeamTreeNode Materialize(int i) const {
    const FlatNode& f = nodes_[i];
    BeamTreeNode n{f.sym, f.kind, f.lp, f.on_beam, {}};
    for (int c : f.children) n.children.push_back(Materialize(c));
    return n;
  }

  GenerationResult ToResult(const Hyp& h) const {
    GenerationResult r;
    r.token_ids = h.tokens;
    r.tokens = params_.words().Decode(h.tokens);
    r.states = ControlStateSeq(h.states);
    r.log_prob = h.score;
    r.step_log_probs = h.steps;
    r.finished = true;
    if (options_.capture_tree && !nodes_.empty()) {
      BeamTreeNode root = Materialize(0);
      TrimBeamTree(root, kTreeFanout);
      r.tree = std::move(root);
    }
    return r;
  }

  const ModelParams& params_;
  const ConstraintDfa* dfa_;
  DecodeOptions options_;
  EncodedInput input_;
  int k_;
  std::vector<int> distance_;
  std::vector<FlatNode> nodes_;
  // Observations of the hypotheses expanded in the current round.
  std::vector<StepView> views_;
};

}  // namespace

GenerationResult FreeGenerate(const ModelParams& params, const DataTable& table,
                              const DecodeOptions& options) {
  return BeamSearch(params, table, nullptr, options).Run({});
}

GenerationResult ConstrainedGenerate(const ModelParams& params,
                                     const DataTable& table,
                                     const ConstraintDfa& dfa,
                                     const DecodeOptions& options) {
  return BeamSearch(params, table, &dfa, options).Run({});
}

GenerationResult ForcedGenerate(const ModelParams& params,
                                const DataTable& table,
                                const std::vector<ForcedStep>& prefix,
                                const ConstraintDfa* dfa,
                                const DecodeOptions& options) {
  return BeamSearch(params, table, dfa, options).Run(prefix);
}

void TrimBeamTree(BeamTreeNode& node, std::size_t keep) {
  if (node.children.size() > keep) {
    std::vector<std::size_t> order(node.children.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return node.children[a].lp > node.children[b].lp;
    });
    std::vector<bool> kept(order.size(), false);
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i < keep || node.children[order[i]].on_beam) kept[order[i]] = true;
    }
    std::vector<BeamTreeNode> children;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      if (kept[i]) children.push_back(std::move(node.children[i]));
    }
    node.children = std::move(children);
  }
  for (auto& c : node.children) TrimBeamTree(c, keep);
}

Json BeamTreeToJson(const BeamTreeNode& node) {
  Json j;
  j["sym"] = node.sym;
  j["kind"] = node.kind == BeamTreeNode::Kind::kState ? "state" : "word";
  j["lp"] = node.lp;
  j["on_beam"] = node.on_beam;
  Json children = Json::array();
  for (const auto& c : node.children) children.push_back(BeamTreeToJson(c));
  j["children"] = std::move(children);
  return j;
}

Json GenerationToJson(const GenerationResult& r) {
  Json j;
  j["tokens"] = r.tokens;
  j["text"] = [&] {
    std::string s;
    for (std::size_t i = 0; i < r.tokens.size(); ++i) {
      if (i) s += ' ';
      s += r.tokens[i];
    }
    return s;
  }();
  j["states"] = StatesToJson(r.states);
  j["log_prob"] = r.log_prob;
  j["step_log_probs"] = r.step_log_probs;
  j["finished"] = r.finished;
  if (r.tree) j["tree"] = BeamTreeToJson(*r.tree);
  return j;
}

}  // namespace ctrlgen

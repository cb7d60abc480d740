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

#include <gtest/gtest.h>

#include <functional>
#include <vector>

#include "ctrlgen/constraint/regex.h"
#include "ctrlgen/core/errors.h"
#include "ctrlgen/decode/beam_search.h"
#include "ctrlgen/model/joint_model.h"
#include "oracles/exhaustive_decode.h"
#include "oracles/random_ast.h"
#include "oracles/tiny_model.h"

namespace ctrlgen {
namespace {

using oracle::TinyModel;
using oracle::TinyTable;

ConstraintDfa Dfa(const std::string& re, int k) {
  return Compile(ParseRegex(re, ControlAlphabet(k)), k);
}

DecodeOptions Options(int beam, int max_len, bool tree = false) {
  DecodeOptions o;
  o.beam_width = beam;
  o.max_len = max_len;
  o.capture_tree = tree;
  return o;
}

// Emittable vocabulary of TinyModel(n): UNK plus n words.
TEST(BeamSearchTest, FullBranchingMatchesExhaustiveArgmax) {
  int mismatches = 0, trials = 0;
  for (double scale : {1.0, 3.0, 10.0}) {
    for (int words = 1; words <= 4; ++words) {
      for (int k = 2; k <= 3; ++k) {
        for (std::uint64_t seed = 0; seed < 8; ++seed) {
          ModelParams p = TinyModel(words, k, 1000 * words + 10 * k + seed, scale);
          int emittable = words + 1;
          oracle::Best want = oracle::ExhaustiveArgmax(p, TinyTable(), 3);
          GenerationResult got =
              FreeGenerate(p, TinyTable(), Options(k * emittable, 3));
          ++trials;
          if (got.token_ids != want.words || got.states.ids() != want.states) {
            ++mismatches;
            ADD_FAILURE() << "seed " << seed << " scale " << scale << " beam "
                          << got.log_prob << " exhaustive " << want.score;
          } else {
            EXPECT_NEAR(got.log_prob, want.score, 1e-12);
          }
        }
      }
    }
  }
  EXPECT_EQ(mismatches, 0) << "of " << trials;
}

TEST(BeamSearchTest, WidthOneIsGreedy) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    ModelParams p = TinyModel(5, 3, seed, 1.5);
    oracle::Best want = oracle::Greedy(p, TinyTable(), 6);
    GenerationResult got = FreeGenerate(p, TinyTable(), Options(1, 6));
    EXPECT_EQ(got.token_ids, want.words);
    EXPECT_EQ(got.states.ids(), want.states);
    EXPECT_NEAR(got.log_prob, want.score, 1e-12);
  }
}

TEST(BeamSearchTest, ScoreAgreesWithModel) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ModelParams p = TinyModel(6, 4, seed, 1.0, seed % 2 == 1);
    GenerationResult r = FreeGenerate(p, TinyTable(), Options(4, 8));
    EXPECT_TRUE(r.finished);
    EXPECT_NEAR(r.log_prob, ScoreSequence(p, TinyTable(), r.token_ids, r.states.ids()),
                1e-9);
    ASSERT_EQ(r.step_log_probs.size(), r.token_ids.size() + 1);
    for (double s : r.step_log_probs) EXPECT_LE(s, 0.0);
    EXPECT_EQ(r.tokens.size(), r.token_ids.size());
  }
}

TEST(BeamSearchTest, VacuousConstraintEqualsFree) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    ModelParams p = TinyModel(6, 4, seed, 1.5);
    for (int beam : {1, 3, 5}) {
      GenerationResult a = FreeGenerate(p, TinyTable(), Options(beam, 7));
      GenerationResult b =
          ConstrainedGenerate(p, TinyTable(), Dfa(".*", 4), Options(beam, 7));
      EXPECT_EQ(a.token_ids, b.token_ids);
      EXPECT_EQ(a.states, b.states);
      EXPECT_EQ(a.log_prob, b.log_prob);
    }
  }
}

TEST(BeamSearchTest, FirstStateConstraint) {
  ConstraintDfa dfa = Dfa("A.B*", 4);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    ModelParams p = TinyModel(5, 4, seed, 1.5);
    GenerationResult r = ConstrainedGenerate(p, TinyTable(), dfa, Options(3, 8));
    ASSERT_GE(r.states.size(), 2u);
    EXPECT_EQ(r.states[0], 0);
    EXPECT_TRUE(dfa.Accepts(r.states));
  }
}

TEST(BeamSearchTest, SoundUnderRandomConstraints) {
  Rng rng(4);
  int decoded = 0;
  for (int trial = 0; trial < 150; ++trial) {
    ModelParams p = TinyModel(4, 3, 500 + trial, 1.5);
    ConstraintDfa dfa = Compile(oracle::RandomAst(rng, 3, 3), 3);
    try {
      GenerationResult r = ConstrainedGenerate(
          p, TinyTable(), dfa, Options(static_cast<int>(rng.UniformInt(1, 4)), 6));
      EXPECT_TRUE(dfa.Accepts(r.states));
      ++decoded;
    } catch (const NoFeasibleOutput&) {
      // Only when nothing within five words is accepted.
      bool short_word = false;
      std::vector<StateId> z;
      std::function<void()> walk = [&] {
        if (dfa.Accepts(ControlStateSeq(z))) short_word = true;
        if (z.size() == 5 || short_word) return;
        for (int k = 0; k < 3; ++k) {
          z.push_back(k);
          walk();
          z.pop_back();
        }
      };
      walk();
      EXPECT_FALSE(short_word);
    }
  }
  EXPECT_GT(decoded, 100);
}

TEST(BeamSearchTest, ConstrainedMatchesExhaustiveConstrainedArgmax) {
  Rng rng(9);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    ModelParams p = TinyModel(2, 2, 900 + trial, 1.5);
    ConstraintDfa dfa = Compile(oracle::RandomAst(rng, 2, 3), 2);
    oracle::Best want = oracle::ExhaustiveArgmax(p, TinyTable(), 3, &dfa);
    if (want.words.empty() && want.states.empty() &&
        want.score == -std::numeric_limits<double>::infinity()) {
      EXPECT_THROW(ConstrainedGenerate(p, TinyTable(), dfa, Options(6, 3)),
                   NoFeasibleOutput);
      continue;
    }
    GenerationResult got = ConstrainedGenerate(p, TinyTable(), dfa, Options(6, 3));
    EXPECT_EQ(got.token_ids, want.words);
    EXPECT_EQ(got.states.ids(), want.states);
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

TEST(BeamSearchTest, InfeasibleLength) {
  ModelParams p = TinyModel(3, 2, 1);
  EXPECT_THROW(ConstrainedGenerate(p, TinyTable(), Dfa("AAAAA", 2), Options(3, 5)),
               NoFeasibleOutput);
  EXPECT_NO_THROW(ConstrainedGenerate(p, TinyTable(), Dfa("AAAAA", 2), Options(3, 6)));
}

TEST(BeamSearchTest, BadOptions) {
  ModelParams p = TinyModel(3, 2, 1);
  EXPECT_THROW(FreeGenerate(p, TinyTable(), Options(0, 3)), DomainError);
  EXPECT_THROW(FreeGenerate(p, TinyTable(), Options(2, 0)), DomainError);
  EXPECT_THROW(ConstrainedGenerate(p, TinyTable(), Dfa("C", 3), Options(2, 3)),
               DomainError);
}

TEST(BeamSearchTest, Deterministic) {
  ModelParams p = TinyModel(6, 4, 3, 1.5);
  GenerationResult a = FreeGenerate(p, TinyTable(), Options(5, 8, true));
  GenerationResult b = FreeGenerate(p, TinyTable(), Options(5, 8, true));
  EXPECT_EQ(GenerationToJson(a).dump(), GenerationToJson(b).dump());
}

TEST(ForcedGenerateTest, EmptyPrefixEqualsConstrained) {
  ConstraintDfa dfa = Dfa("A.B*", 4);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ModelParams p = TinyModel(5, 4, seed, 1.5);
    GenerationResult a = ConstrainedGenerate(p, TinyTable(), dfa, Options(3, 6));
    GenerationResult b = ForcedGenerate(p, TinyTable(), {}, &dfa, Options(3, 6));
    EXPECT_EQ(a.token_ids, b.token_ids);
    EXPECT_EQ(a.states, b.states);
    EXPECT_EQ(a.log_prob, b.log_prob);
  }
}

TEST(ForcedGenerateTest, PrefixIsKept) {
  ModelParams p = TinyModel(5, 4, 2, 1.5);
  std::vector<ForcedStep> prefix = {{1, 5}, {3, 3}};
  GenerationResult r = ForcedGenerate(p, TinyTable(), prefix, nullptr, Options(3, 6));
  ASSERT_GE(r.token_ids.size(), 2u);
  EXPECT_EQ(r.token_ids[0], 5);
  EXPECT_EQ(r.token_ids[1], 3);
  EXPECT_EQ(r.states[0], 1);
  EXPECT_EQ(r.states[1], 3);
  EXPECT_NEAR(r.log_prob, ScoreSequence(p, TinyTable(), r.token_ids, r.states.ids()),
              1e-9);
}

TEST(ForcedGenerateTest, FullLengthPrefix) {
  ModelParams p = TinyModel(5, 4, 2, 1.5);
  std::vector<ForcedStep> prefix = {{1, 5}, {3, 3}, {0, 7}};
  GenerationResult r = ForcedGenerate(p, TinyTable(), prefix, nullptr, Options(3, 4));
  EXPECT_EQ(r.token_ids, (std::vector<TokenId>{5, 3, 7}));
  EXPECT_EQ(r.states.ids(), (std::vector<StateId>{1, 3, 0}));
  EXPECT_NEAR(r.log_prob, ScoreSequence(p, TinyTable(), {5, 3, 7}, {1, 3, 0}), 1e-12);
}

TEST(ForcedGenerateTest, Errors) {
  ModelParams p = TinyModel(5, 4, 2, 1.5);
  ConstraintDfa dfa = Dfa("A.B*", 4);
  EXPECT_THROW(ForcedGenerate(p, TinyTable(), {{1, 4}}, &dfa, Options(3, 6)),
               ConstraintViolation);
  EXPECT_THROW(ForcedGenerate(p, TinyTable(), {{0, Vocabulary::kEos}}, &dfa,
                              Options(3, 6)),
               DomainError);
  EXPECT_THROW(ForcedGenerate(p, TinyTable(), {{9, 4}}, nullptr, Options(3, 6)),
               DomainError);
  EXPECT_THROW(ForcedGenerate(p, TinyTable(), {{1, 4}, {1, 4}}, nullptr, Options(3, 2)),
               DomainError);
}

int CountOnBeamLeaves(const BeamTreeNode& n) {
  if (n.children.empty()) return n.on_beam ? 1 : 0;
  int c = 0;
  for (const auto& k : n.children) c += CountOnBeamLeaves(k);
  return c;
}

void CheckTree(const BeamTreeNode& n, int* max_children) {
  *max_children = std::max(*max_children, static_cast<int>(n.children.size()));
  for (const auto& c : n.children) {
    EXPECT_NE(c.kind, n.kind);
    CheckTree(c, max_children);
  }
}

TEST(BeamTreeTest, Structure) {
  ModelParams p = TinyModel(12, 6, 8, 1.0);
  GenerationResult r = FreeGenerate(p, TinyTable(), Options(5, 6, true));
  ASSERT_TRUE(r.tree.has_value());
  const BeamTreeNode& root = *r.tree;
  EXPECT_EQ(root.sym, "<bos>");
  EXPECT_EQ(root.kind, BeamTreeNode::Kind::kWord);
  EXPECT_TRUE(root.on_beam);
  int max_children = 0;
  CheckTree(root, &max_children);
  // At most 8 plus on-beam extras per node; with beam 5 that is bounded by 13.
  EXPECT_LE(max_children, 13);
  EXPECT_GE(CountOnBeamLeaves(root), 1);
  // The returned path is on the beam from root to leaf.
  const BeamTreeNode* n = &root;
  for (std::size_t t = 0; t < r.tokens.size(); ++t) {
    const BeamTreeNode* next = nullptr;
    for (const auto& s : n->children) {
      if (s.sym == std::string(1, static_cast<char>('A' + r.states[t])) && s.on_beam) {
        for (const auto& w : s.children) {
          if (w.sym == r.tokens[t] && w.on_beam) next = &w;
        }
      }
    }
    ASSERT_NE(next, nullptr) << "step " << t;
    n = next;
  }
  Json j = BeamTreeToJson(root);
  EXPECT_EQ(j["sym"], "<bos>");
  EXPECT_EQ(j["kind"], "word");
  EXPECT_TRUE(j["children"].is_array());
  EXPECT_EQ(j["children"][0]["kind"], "state");
  EXPECT_TRUE(j["children"][0].contains("lp"));
  EXPECT_TRUE(j["children"][0].contains("on_beam"));
}

TEST(BeamTreeTest, TrimKeepsOnBeam) {
  BeamTreeNode root{"<bos>", BeamTreeNode::Kind::kWord, 0, true, {}};
  for (int i = 0; i < 12; ++i) {
    root.children.push_back({"s", BeamTreeNode::Kind::kState, -static_cast<double>(i),
                             i == 11, {}});
  }
  TrimBeamTree(root, 8);
  EXPECT_EQ(root.children.size(), 9u);
  EXPECT_TRUE(root.children.back().on_beam);
}

}  // namespace
}  // namespace ctrlgen

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

#include <string>
#include <vector>

#include "ctrlgen/constraint/ast.h"
#include "ctrlgen/constraint/dfa.h"
#include "ctrlgen/constraint/graph_view.h"
#include "ctrlgen/constraint/merge.h"
#include "ctrlgen/constraint/regex.h"
#include "ctrlgen/core/errors.h"
#include "ctrlgen/core/random.h"
#include "oracles/naive_regex.h"
#include "oracles/random_ast.h"

namespace ctrlgen {
namespace {

using Kind = ConstraintAst::Kind;

ConstraintDfa CompileText(const std::string& re, int k) {
  return Compile(ParseRegex(re, ControlAlphabet(k)), k);
}

bool AcceptsLetters(const ConstraintDfa& dfa, const std::string& letters) {
  return dfa.Accepts(ControlStateSeq::FromLetters(letters));
}

TEST(ParseRegexTest, PaperExample) {
  ConstraintAst ast = ParseRegex("A.B*", ControlAlphabet(4));
  ASSERT_EQ(ast.kind, Kind::kConcat);
  ASSERT_EQ(ast.children.size(), 3u);
  EXPECT_EQ(ast.children[0], ConstraintAst::Literal(0));
  EXPECT_EQ(ast.children[1], ConstraintAst::Wildcard());
  EXPECT_EQ(ast.children[2], ConstraintAst::Star(ConstraintAst::Literal(1)));
}

TEST(ParseRegexTest, EmptyIsEpsilon) {
  EXPECT_EQ(ParseRegex("", ControlAlphabet(4)), ConstraintAst::Epsilon());
  EXPECT_EQ(ParseRegex("   ", ControlAlphabet(4)), ConstraintAst::Epsilon());
}

TEST(ParseRegexTest, TwoOrders) {
  ConstraintAst ast = ParseRegex("(AG|GA)", ControlAlphabet(10));
  ConstraintAst want = ConstraintAst::Alternation(
      {ConstraintAst::Concat({ConstraintAst::Literal(0), ConstraintAst::Literal(6)}),
       ConstraintAst::Concat({ConstraintAst::Literal(6), ConstraintAst::Literal(0)})});
  EXPECT_EQ(ast, want);
}

TEST(ParseRegexTest, Precedence) {
  ConstraintAst ast = ParseRegex("AB*|C", ControlAlphabet(4));
  ASSERT_EQ(ast.kind, Kind::kAlternation);
  EXPECT_EQ(ast.children[0].kind, Kind::kConcat);
  EXPECT_EQ(ast.children[0].children[1].kind, Kind::kStar);
  EXPECT_EQ(ast.children[1], ConstraintAst::Literal(2));
}

TEST(ParseRegexTest, WhitespaceIgnored) {
  EXPECT_EQ(ParseRegex(" A . B * ", ControlAlphabet(4)),
            ParseRegex("A.B*", ControlAlphabet(4)));
}

TEST(ParseRegexTest, LetterOutsideAlphabet) {
  try {
    ParseRegex("AB E", ControlAlphabet(4));
    FAIL() << "expected AlphabetError";
  } catch (const AlphabetError& e) {
    EXPECT_EQ(e.position(), 3u);
    EXPECT_EQ(e.code(), "alphabet_error");
  }
}

TEST(ParseRegexTest, SyntaxErrorsCarryPosition) {
  struct Case {
    std::string text;
    std::size_t position;
  };
  std::vector<Case> cases = {
      {"(AB", 0}, {"AB)", 2}, {"*A", 0}, {"A|", 1}, {"|A", 0},
      {"A(|B)", 2}, {"A#", 1}, {"((A)", 0},
  };
  for (const auto& c : cases) {
    try {
      ParseRegex(c.text, ControlAlphabet(4));
      ADD_FAILURE() << "no error for " << c.text;
    } catch (const SyntaxError& e) {
      EXPECT_EQ(e.position(), c.position) << c.text;
    }
  }
}

TEST(CompileTest, SingleLiteral) {
  ConstraintDfa dfa = CompileText("A", 4);
  EXPECT_EQ(dfa.num_states(), 2);
  EXPECT_TRUE(AcceptsLetters(dfa, "A"));
  EXPECT_FALSE(AcceptsLetters(dfa, ""));
  EXPECT_FALSE(AcceptsLetters(dfa, "AA"));
  EXPECT_FALSE(AcceptsLetters(dfa, "B"));
}

TEST(CompileTest, PaperExample) {
  ConstraintDfa dfa = CompileText("A.B*", 4);
  EXPECT_TRUE(AcceptsLetters(dfa, "AC"));
  EXPECT_TRUE(AcceptsLetters(dfa, "ACB"));
  EXPECT_TRUE(AcceptsLetters(dfa, "ACBBB"));
  EXPECT_FALSE(AcceptsLetters(dfa, "A"));
  EXPECT_FALSE(AcceptsLetters(dfa, "CAB"));
}

TEST(CompileTest, StepAndAllowed) {
  ConstraintDfa a = CompileText("A", 4);
  int next = a.Step(a.start(), 0);
  ASSERT_NE(next, ConstraintDfa::kReject);
  EXPECT_TRUE(a.IsAccepting(next));
  EXPECT_EQ(a.Step(a.start(), 1), ConstraintDfa::kReject);

  ConstraintDfa b = CompileText("A.B*", 4);
  EXPECT_EQ(b.Allowed(b.start()), std::vector<StateId>{0});
}

TEST(CompileTest, AllowedMatchesStep) {
  for (const auto& re : oracle::RegexCorpus()) {
    ConstraintDfa dfa = CompileText(re, 4);
    for (int s = 0; s < dfa.num_states(); ++s) {
      std::vector<StateId> want;
      for (int c = 0; c < 4; ++c) {
        if (dfa.Step(s, c) != ConstraintDfa::kReject) want.push_back(c);
      }
      EXPECT_EQ(dfa.Allowed(s), want) << re;
    }
  }
}

TEST(CompileTest, LiteralBeyondAlphabetRejected) {
  EXPECT_THROW(Compile(ConstraintAst::Literal(5), 4), DomainError);
}

TEST(CompileTest, EmptyLanguage) {
  // A literal-free alternation of nothing cannot be written in the syntax;
  // build an unsatisfiable automaton through Minimize instead.
  ConstraintDfa dfa = Minimize(2, 0, {false}, {0, 0});
  EXPECT_TRUE(dfa.LanguageEmpty());
  EXPECT_EQ(dfa.num_states(), 1);
  EXPECT_TRUE(dfa.Allowed(dfa.start()).empty());
}

// Every corpus regex agrees with the reference matcher on every sequence of
// length at most six over four letters.
TEST(CompileTest, AgreesWithReferenceMatcher) {
  auto seqs = oracle::AllSequences(4, 6);
  ASSERT_GE(oracle::RegexCorpus().size(), 30u);
  for (const auto& re : oracle::RegexCorpus()) {
    ConstraintDfa dfa = CompileText(re, 4);
    oracle::NaiveRegex naive(re);
    int mismatches = 0;
    for (const auto& s : seqs) {
      if (AcceptsLetters(dfa, s) != naive.Matches(s)) ++mismatches;
    }
    EXPECT_EQ(mismatches, 0) << re;
  }
}

TEST(CompileTest, MinimalAndReachable) {
  for (const auto& re : oracle::RegexCorpus()) {
    ConstraintDfa dfa = CompileText(re, 4);
    ConstraintDfa again = Minimize(dfa.alphabet_size(), dfa.start(),
                                   dfa.accepting(), dfa.delta());
    EXPECT_EQ(again.num_states(), dfa.num_states()) << re;
    EXPECT_EQ(again, dfa) << re;
    // Reachability from the start state.
    std::vector<bool> seen(dfa.num_states(), false);
    std::vector<int> stack{dfa.start()};
    seen[dfa.start()] = true;
    while (!stack.empty()) {
      int s = stack.back();
      stack.pop_back();
      for (int c = 0; c < 4; ++c) {
        int t = dfa.Step(s, c);
        if (t != ConstraintDfa::kReject && !seen[t]) {
          seen[t] = true;
          stack.push_back(t);
        }
      }
    }
    for (int s = 0; s < dfa.num_states(); ++s) EXPECT_TRUE(seen[s]) << re;
  }
}

TEST(CompileTest, RandomTreesAgreeWithReferenceMatcher) {
  Rng rng(7);
  auto seqs = oracle::AllSequences(3, 5);
  for (int trial = 0; trial < 200; ++trial) {
    ConstraintAst ast = oracle::RandomAst(rng, 3, 4);
    std::string text = RenderRegex(ast);
    ConstraintDfa dfa = Compile(ast, 3);
    oracle::NaiveRegex naive(text);
    for (const auto& s : seqs) {
      ASSERT_EQ(AcceptsLetters(dfa, s), naive.Matches(s)) << text << " on " << s;
    }
  }
}

TEST(DfaEquivalentTest, Basics) {
  EXPECT_TRUE(DfaEquivalent(CompileText("A|A", 4), CompileText("A", 4)));
  EXPECT_FALSE(DfaEquivalent(CompileText("A.B*", 4), CompileText("A.B+", 4)));
  EXPECT_TRUE(DfaEquivalent(CompileText("(A|B)*", 4), CompileText("(A*B*)*", 4)));
}

TEST(DfaEquivalentTest, AgreesWithEnumeration) {
  Rng rng(11);
  auto seqs = oracle::AllSequences(2, 6);
  for (int trial = 0; trial < 300; ++trial) {
    ConstraintDfa a = Compile(oracle::RandomAst(rng, 2, 3), 2);
    ConstraintDfa b = Compile(oracle::RandomAst(rng, 2, 3), 2);
    bool same_on_prefix = true;
    for (const auto& s : seqs) {
      if (AcceptsLetters(a, s) != AcceptsLetters(b, s)) {
        same_on_prefix = false;
        break;
      }
    }
    // Enumeration can only refute equivalence; a disagreement must be seen
    // by the product check as well.
    if (!same_on_prefix) {
      EXPECT_FALSE(DfaEquivalent(a, b));
    }
    if (DfaEquivalent(a, b)) {
      EXPECT_TRUE(same_on_prefix);
    }
    EXPECT_TRUE(DfaEquivalent(a, a));
  }
}

TEST(DfaJsonTest, RoundTrip) {
  ConstraintDfa dfa = CompileText("A(B|C)*D?", 4);
  EXPECT_EQ(DfaFromJson(DfaToJson(dfa)), dfa);
}

TEST(RenderRegexTest, Examples) {
  EXPECT_EQ(RenderRegex(ParseRegex("A.B*", ControlAlphabet(4))), "A.B*");
  EXPECT_EQ(RenderRegex(ConstraintAst::Epsilon()), "");
  EXPECT_EQ(RenderRegex(ParseRegex("(AB)*|C", ControlAlphabet(4))), "(AB)*|C");
  EXPECT_EQ(RenderRegex(ParseRegex("((A))", ControlAlphabet(4))), "A");
  EXPECT_EQ(RenderRegex(ParseRegex("A(B|C)", ControlAlphabet(4))), "A(B|C)");
}

TEST(RenderRegexTest, RoundTripPreservesLanguage) {
  for (const auto& re : oracle::RegexCorpus()) {
    ConstraintAst ast = ParseRegex(re, ControlAlphabet(4));
    ConstraintAst back = ParseRegex(RenderRegex(ast), ControlAlphabet(4));
    EXPECT_TRUE(DfaEquivalent(Compile(ast, 4), Compile(back, 4))) << re;
  }
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    ConstraintAst ast = oracle::RandomAst(rng, 4, 4);
    std::string text = RenderRegex(ast);
    ConstraintAst back = ParseRegex(text, ControlAlphabet(4));
    ASSERT_TRUE(DfaEquivalent(Compile(ast, 4), Compile(back, 4))) << text;
  }
}

std::vector<ControlStateSeq> Seqs(const std::vector<std::string>& letters) {
  std::vector<ControlStateSeq> out;
  for (const auto& s : letters) out.push_back(ControlStateSeq::FromLetters(s));
  return out;
}

TEST(MergeTest, SingleSequenceIsLiteralConcat) {
  ConstraintAst ast = MergeExamples(Seqs({"FFJKECT"}));
  EXPECT_EQ(RenderRegex(ast), "FFJKECT");
}

TEST(MergeTest, Idempotent) {
  EXPECT_EQ(MergeExamples(Seqs({"ABC", "ABC"})), MergeExamples(Seqs({"ABC"})));
}

TEST(MergeTest, OptionalNotState) {
  // X = I, Y = H, N = N.
  ConstraintAst ast = MergeExamples(Seqs({"DEFAIHB", "DEFAINHB"}));
  EXPECT_EQ(RenderRegex(ast), "DEFAIN?HB");
}

TEST(MergeTest, AlternativesMatchExactly) {
  ConstraintAst ast = MergeExamples(Seqs({"AB", "AC"}));
  ConstraintAst back = ParseRegex(RenderRegex(ast), ControlAlphabet(4));
  EXPECT_TRUE(DfaEquivalent(Compile(back, 4), CompileText("AB|AC", 4)));
}

TEST(MergeTest, EmptyListRejected) {
  EXPECT_THROW(MergeExamples({}), DomainError);
}

TEST(MergeTest, LanguageIsExactlyTheInputs) {
  Rng rng(5);
  auto all = oracle::AllSequences(3, 5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> inputs;
    int n = static_cast<int>(rng.UniformInt(1, 4));
    for (int i = 0; i < n; ++i) {
      std::string s;
      int len = static_cast<int>(rng.UniformInt(0, 5));
      for (int j = 0; j < len; ++j) {
        s += static_cast<char>('A' + rng.UniformInt(0, 2));
      }
      inputs.push_back(s);
    }
    ConstraintAst ast = MergeExamples(Seqs(inputs));
    ConstraintDfa dfa = Compile(ast, 3);
    for (const auto& s : all) {
      bool want = std::find(inputs.begin(), inputs.end(), s) != inputs.end();
      ASSERT_EQ(AcceptsLetters(dfa, s), want) << RenderRegex(ast) << " " << s;
    }
  }
}

TEST(GraphViewTest, SmallestAlternation) {
  ConstraintGraphView view = ToGraph(ParseRegex("A|B", ControlAlphabet(4)));
  int ors = 0, states = 0;
  for (const auto& n : view.nodes) {
    if (n.kind == ConstraintGraphView::NodeKind::kOr) ++ors;
    if (n.kind == ConstraintGraphView::NodeKind::kState) ++states;
  }
  EXPECT_EQ(ors, 1);
  EXPECT_EQ(states, 2);
}

TEST(GraphViewTest, FamilyFriendlyLayout) {
  // Seed block, fork into two location orders, then a block with an
  // optional not-state.
  std::string re = "DEF(AG|GA)IN?HB";
  ConstraintAst ast = ParseRegex(re, ControlAlphabet(14));
  ConstraintGraphView view = ToGraph(ast);
  bool optional_not = false;
  for (const auto& n : view.nodes) {
    if (n.kind == ConstraintGraphView::NodeKind::kState && n.state == 13 &&
        n.repeat == ConstraintGraphView::Repeat::kOptional) {
      optional_not = true;
    }
  }
  EXPECT_TRUE(optional_not);
  ConstraintAst back = FromGraph(view);
  EXPECT_TRUE(DfaEquivalent(Compile(ast, 14), Compile(back, 14)));
}

TEST(GraphViewTest, RandomRoundTrip) {
  Rng rng(13);
  for (int trial = 0; trial < 3000; ++trial) {
    ConstraintAst ast = oracle::RandomAst(rng, 4, 4);
    ConstraintGraphView view = ToGraph(ast);
    ConstraintAst back = FromGraph(GraphFromJson(GraphToJson(view)));
    ASSERT_TRUE(DfaEquivalent(Compile(ast, 4), Compile(back, 4)))
        << RenderRegex(ast) << " vs " << RenderRegex(back);
  }
}

TEST(GraphViewTest, JoinInferredWhenAbsent) {
  ConstraintAst ast = ParseRegex("A(B|CD)*E", ControlAlphabet(5));
  ConstraintGraphView view = ToGraph(ast);
  for (auto& n : view.nodes) n.join = -1;
  EXPECT_TRUE(DfaEquivalent(Compile(ast, 5), Compile(FromGraph(view), 5)));
}

TEST(GraphViewTest, MalformedViews) {
  ConstraintGraphView view = ToGraph(ParseRegex("AB", ControlAlphabet(4)));
  ConstraintGraphView dangling = view;
  dangling.edges.push_back({0, 99});
  EXPECT_THROW(FromGraph(dangling), GraphError);

  // Turn A -> B into a cycle.
  ConstraintGraphView cyclic = view;
  int a = -1, b = -1;
  for (const auto& n : view.nodes) {
    if (n.kind == ConstraintGraphView::NodeKind::kState && n.state == 0) a = n.id;
    if (n.kind == ConstraintGraphView::NodeKind::kState && n.state == 1) b = n.id;
  }
  cyclic.edges.push_back({b, a});
  EXPECT_THROW(FromGraph(cyclic), GraphError);

  ConstraintGraphView no_accept = view;
  std::erase_if(no_accept.nodes, [](const auto& n) {
    return n.kind == ConstraintGraphView::NodeKind::kAccept;
  });
  EXPECT_THROW(FromGraph(no_accept), GraphError);
}

TEST(AstJsonTest, RoundTrip) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    ConstraintAst ast = oracle::RandomAst(rng, 5, 4);
    EXPECT_EQ(AstFromJson(AstToJson(ast)), ast);
  }
}

}  // namespace
}  // namespace ctrlgen

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

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "ctrlgen/constraint/dfa.h"
#include "ctrlgen/constraint/regex.h"
#include "ctrlgen/core/errors.h"
#include "ctrlgen/core/tokenize.h"
#include "ctrlgen/core/vocabulary.h"
#include "ctrlgen/data/dates.h"
#include "ctrlgen/data/table_dataset.h"

namespace ctrlgen {
namespace {

std::string DataPath(const std::string& name) {
  return std::string(CTRLGEN_TEST_DATA_DIR) + "/" + name;
}

std::string Join(const std::vector<std::string>& t) { return Detokenize(t); }

std::string Letters(const ControlStateSeq& s) { return s.ToLetters(); }

// Written out by hand, independent of the renderer.
const std::vector<std::string> kOrdinalTable = {
    "first", "second", "third", "fourth", "fifth", "sixth", "seventh",
    "eighth", "ninth", "tenth", "eleventh", "twelfth", "thirteenth",
    "fourteenth", "fifteenth", "sixteenth", "seventeenth", "eighteenth",
    "nineteenth", "twentieth", "twenty first", "twenty second",
    "twenty third", "twenty fourth", "twenty fifth", "twenty sixth",
    "twenty seventh", "twenty eighth"};

TEST(DatesTest, OrdinalWords) {
  for (int d = 1; d <= 28; ++d) EXPECT_EQ(OrdinalWords(d), kOrdinalTable[d - 1]);
  EXPECT_THROW(OrdinalWords(0), DomainError);
  EXPECT_THROW(OrdinalWords(29), DomainError);
}

TEST(DatesTest, ExhibitedStrings) {
  Date d{14, 9, 2015};
  Example a = MakeDateExample(d, 0);
  EXPECT_EQ(Join(a.tokens), "today is the fourteenth of september , 2015 .");
  EXPECT_EQ(Letters(*a.states), "AAFBFCEDE");
  Example b = MakeDateExample(d, 3);
  EXPECT_EQ(Join(b.tokens), "today is september the fourteenth in the year 2015 .");
  EXPECT_EQ(Letters(*b.states), "AACFBFFFDE");
  EXPECT_EQ(Join(MakeDateExample(d, 1).tokens),
            "today is the fourteenth of september 2015 .");
  EXPECT_EQ(Join(MakeDateExample(d, 4).tokens), "today is 14 september , 2015 .");
}

TEST(DatesTest, TwoWordDay) {
  Example e = MakeDateExample({21, 9, 2015}, 0);
  EXPECT_EQ(Join(e.tokens), "today is the twenty first of september , 2015 .");
  EXPECT_EQ(Letters(*e.states), "AAFBBFCEDE");
}

TEST(DatesTest, FormatsCoverCrossProduct) {
  const auto& f = DateFormats();
  ASSERT_EQ(f.size(), 8u);
  std::set<std::tuple<bool, bool, bool>> axes;
  std::set<std::string> patterns;
  for (const auto& s : f) {
    axes.insert({s.ordinal_day, s.day_first, s.comma_before_year});
    patterns.insert(s.pattern);
    // Axis flags agree with the pattern text.
    EXPECT_EQ(s.pattern.find("{DAY}") < s.pattern.find("{MONTH}"), s.day_first);
    EXPECT_EQ(s.pattern.find(", {YEAR}") != std::string::npos, s.comma_before_year);
  }
  EXPECT_EQ(axes.size(), 8u);
  EXPECT_EQ(patterns.size(), 8u);
  for (int d : {3, 14}) {
    for (int i = 0; i < 8; ++i) {
      std::string text = Join(MakeDateExample({d, 5, 2001}, i).tokens);
      bool has_word = text.find(kOrdinalTable[d - 1]) != std::string::npos;
      EXPECT_EQ(has_word, f[i].ordinal_day) << text;
      EXPECT_EQ(text.find(" " + std::to_string(d) + " ") != std::string::npos,
                !f[i].ordinal_day);
    }
  }
}

TEST(DatesTest, DatasetDeterministicAndInRange) {
  auto a = GenDateDataset(300, 7);
  auto b = GenDateDataset(300, 7);
  auto c = GenDateDataset(300, 8);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  std::set<int> formats;
  for (const Example& e : a) {
    Date d = DateFromTable(e.table);
    EXPECT_GE(d.day, 1);
    EXPECT_LE(d.day, 28);
    EXPECT_GE(d.year, 1990);
    EXPECT_LE(d.year, 2025);
    formats.insert(MatchDateFormat(e));
    e.Validate();
  }
  EXPECT_EQ(formats.size(), 8u);
  EXPECT_THROW(GenDateDataset(0, 1), DomainError);
}

TEST(DatesTest, AlignmentIsTotalAndExact) {
  for (const Example& e : GenDateDataset(2000, 3)) {
    ControlStateSeq z = AlignDate(e);
    ASSERT_EQ(z.size(), e.tokens.size());
    EXPECT_EQ(z, *e.states);
  }
}

TEST(DatesTest, AlignmentErrors) {
  Example e = MakeDateExample({14, 9, 2015}, 0);
  Example wrong_word = e;
  wrong_word.tokens[3] = "fifteenth";
  EXPECT_THROW(AlignDate(wrong_word), AlignmentError);
  Example extra = e;
  extra.tokens.push_back("!");
  EXPECT_THROW(AlignDate(extra), AlignmentError);
  Example bad_table = e;
  bad_table.table = DataTable(std::vector<DataTable::Entry>{{"day", "x"}, {"month", "9"}, {"year", "2015"}});
  EXPECT_THROW(AlignDate(bad_table), AlignmentError);
}

// Lexicon enumerated from the format definitions by hand.
std::set<std::string> DateLexicon() {
  std::set<std::string> words = {"today", "is", "the", "of", "in", "year", ",", "."};
  for (const char* m : {"january", "february", "march", "april", "may", "june",
                        "july", "august", "september", "october", "november",
                        "december"}) {
    words.insert(m);
  }
  for (const auto& o : kOrdinalTable) {
    for (const auto& w : Tokenize(o)) words.insert(w);
  }
  for (int d = 1; d <= 28; ++d) words.insert(std::to_string(d));
  for (int y = 1990; y <= 2025; ++y) words.insert(std::to_string(y));
  return words;
}

TEST(DatesTest, VocabularySize) {
  std::set<std::string> lexicon = DateLexicon();
  EXPECT_EQ(lexicon.size(), 105u);
  Vocabulary v = BuildVocab(GenDateDataset(5000, 0), 1);
  EXPECT_EQ(v.size(), 108);
  std::set<std::string> got(v.tokens().begin() + 3, v.tokens().end());
  EXPECT_EQ(got, lexicon);
}

TEST(DatesTest, FormatConstraints) {
  std::vector<ConstraintDfa> dfas;
  for (int i = 0; i < 8; ++i) {
    dfas.push_back(Compile(ParseRegex(FormatConstraint(i), ControlAlphabet(10)), 10));
  }
  EXPECT_EQ(FormatConstraint(0), "AAFB+FCEDE");
  EXPECT_EQ(FormatConstraint(4), "AABCEDE");
  for (const Example& e : GenDateDataset(500, 5)) {
    int f = MatchDateFormat(e);
    for (int i = 0; i < 8; ++i) {
      EXPECT_EQ(dfas[i].Accepts(*e.states), i == f) << i << " " << Join(e.tokens);
    }
  }
}

TEST(TableDatasetTest, ParseMeaningRepresentation) {
  DataTable t = ParseMeaningRepresentation(
      "name[the phoenix], eatType[pub], food[French], area[city centre], "
      "near[Café Sicilia]");
  ASSERT_EQ(t.size(), 5u);
  EXPECT_EQ(t.Find("food"), "french");
  EXPECT_EQ(t.Find("near"), "cafe sicilia");
  EXPECT_EQ(t.entries()[1].first, "eatType");
  EXPECT_EQ(ParseMeaningRepresentation(FormatMeaningRepresentation(t)), t);
  EXPECT_THROW(ParseMeaningRepresentation(""), FormatError);
  EXPECT_THROW(ParseMeaningRepresentation("  "), FormatError);
  EXPECT_THROW(ParseMeaningRepresentation("name[x"), FormatError);
  EXPECT_THROW(ParseMeaningRepresentation("name[x],"), FormatError);
  EXPECT_THROW(ParseMeaningRepresentation("name[x] food[y]"), FormatError);
  EXPECT_THROW(ParseMeaningRepresentation("name[]"), FormatError);
  EXPECT_THROW(ParseMeaningRepresentation("name[a], name[b]"), SchemaError);
}

TEST(TableDatasetTest, TokenizeReference) {
  EXPECT_EQ(Join(TokenizeReference("The Phoenix is a French pub near Café Sicilia.")),
            "the phoenix is a french pub near cafe sicilia .");
  EXPECT_EQ(Join(TokenizeReference("Prices: £20-25, rated 4.5!")),
            "prices : £20-25 , rated 4.5 !");
  EXPECT_EQ(Join(TokenizeReference("family-friendly (yes)")),
            "family-friendly ( yes )");
}

TEST(TableDatasetTest, LoadFixture) {
  TableDataset d = LoadTableDataset(DataPath("restaurants.csv"));
  EXPECT_EQ(d.skipped(), 0);
  ASSERT_EQ(d.examples.size(), 241u);
  const Example& first = d.examples.front();
  EXPECT_EQ(first.table.size(), 5u);
  EXPECT_EQ(first.table.Find("name"), "the phoenix");
  EXPECT_EQ(Join(first.tokens),
            "the phoenix is a french pub near cafe sicilia in the city centre .");
  EXPECT_FALSE(first.states.has_value());
}

TEST(TableDatasetTest, MalformedRowsAreCounted) {
  TableDataset d = LoadTableDataset(DataPath("restaurants_malformed.csv"));
  ASSERT_EQ(d.examples.size(), 2u);
  EXPECT_EQ(d.skipped(), 4);
  EXPECT_EQ(Join(d.examples[1].tokens),
            "zizzi serves italian food , with a line break .");
  EXPECT_NE(d.warnings[0].find("line 3"), std::string::npos) << d.warnings[0];
}

TEST(TableDatasetTest, Errors) {
  EXPECT_THROW(LoadTableDataset(DataPath("no_such_file.csv")), IoError);
  EXPECT_THROW(ParseTableDataset(""), FormatError);
  EXPECT_THROW(ParseTableDataset("mr,text\n\"name[a]\",\"a\"\n"), FormatError);
  EXPECT_THROW(ParseTableDataset("mr,ref\n\"\",\"nothing\"\n"), FormatError);
}

TEST(TableDatasetTest, RoundTrip) {
  TableDataset d = LoadTableDataset(DataPath("restaurants.csv"));
  std::string path =
      (std::filesystem::temp_directory_path() / "ctrlgen_roundtrip.csv").string();
  SaveTableDataset(path, d.examples);
  TableDataset back = LoadTableDataset(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.examples, d.examples);
  EXPECT_EQ(back.skipped(), 0);
}

TEST(HeuristicAlignTest, Examples) {
  DataTable t(std::vector<DataTable::Entry>{{"name", "the phoenix"},
               {"eatType", "pub"},
               {"food", "french"},
               {"area", "city centre"},
               {"near", "cafe sicilia"}});
  auto tokens = Tokenize("the phoenix is a french pub near cafe sicilia in the city centre .");
  auto labels = HeuristicAlign(t, tokens);
  std::vector<std::string> got;
  for (const auto& l : labels) got.push_back(l.value_or("-"));
  EXPECT_EQ(got, (std::vector<std::string>{"name", "name", "-", "-", "food", "eatType",
                                           "-", "near", "near", "-", "-", "area", "area",
                                           "-"}));
  auto none = HeuristicAlign(t, Tokenize("a lovely place to eat"));
  for (const auto& l : none) EXPECT_FALSE(l.has_value());
  // Partial value spans count when they hold a content word.
  auto partial = HeuristicAlign(t, Tokenize("phoenix is by sicilia ."));
  EXPECT_EQ(partial[0], "name");
  EXPECT_EQ(partial[3], "near");
  EXPECT_FALSE(partial[1].has_value());
}

TEST(HeuristicAlignTest, LongestSpanWins) {
  DataTable t(std::vector<DataTable::Entry>{{"near", "the rice boat"}, {"food", "rice"}});
  auto labels = HeuristicAlign(t, Tokenize("near the rice boat , rice"));
  EXPECT_EQ(labels[1], "near");
  EXPECT_EQ(labels[2], "near");
  EXPECT_EQ(labels[3], "near");
  // "rice" alone ties between near (partial) and food (whole); first field wins.
  EXPECT_EQ(labels[5], "near");
}

// Brute force: the label set agrees with per-token membership in some value
// for single-word values.
TEST(HeuristicAlignTest, DateCorpusMatchesStringEquality) {
  for (const Example& e : GenDateDataset(500, 11)) {
    auto labels = HeuristicAlign(e.table, e.tokens);
    for (std::size_t i = 0; i < e.tokens.size(); ++i) {
      std::optional<std::string> want;
      for (const auto& [f, v] : e.table.entries()) {
        if (!want && v == e.tokens[i]) want = f;
      }
      EXPECT_EQ(labels[i], want) << Join(e.tokens);
    }
  }
}

TEST(HeuristicAlignTest, WeakStates) {
  DataTable t(std::vector<DataTable::Entry>{{"name", "strada"}, {"food", "italian"}});
  auto z = WeakStates(t, Tokenize("strada serves italian food"), {"name", "food"}, 3);
  EXPECT_EQ(z.ids(), (std::vector<StateId>{1, 0, 2, 0}));
  EXPECT_THROW(WeakStates(t, Tokenize("strada"), {"name", "food"}, 2), DomainError);
  EXPECT_THROW(WeakStates(t, Tokenize("strada"), {"food"}, 4), SchemaError);
}

}  // namespace
}  // namespace ctrlgen

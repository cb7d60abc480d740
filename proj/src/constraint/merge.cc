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

#include "ctrlgen/constraint/merge.h"

#include <algorithm>

#include "ctrlgen/core/errors.h"

namespace ctrlgen {
namespace {

using Seq = std::vector<StateId>;

std::vector<ConstraintAst> Literals(Seq::const_iterator begin,
                                    Seq::const_iterator end) {
  std::vector<ConstraintAst> out;
  for (auto it = begin; it != end; ++it) {
    out.push_back(ConstraintAst::Literal(*it));
  }
  return out;
}

// `seqs` is deduplicated and in first-seen order.
ConstraintAst MergeDistinct(const std::vector<Seq>& seqs) {
  if (seqs.size() == 1) {
    return ConstraintAst::Concat(Literals(seqs[0].begin(), seqs[0].end()));
  }
  std::size_t min_len = seqs[0].size();
  for (const auto& s : seqs) min_len = std::min(min_len, s.size());

  std::size_t prefix = 0;
  while (prefix < min_len &&
         std::all_of(seqs.begin(), seqs.end(), [&](const Seq& s) {
           return s[prefix] == seqs[0][prefix];
         })) {
    ++prefix;
  }
  std::size_t suffix = 0;
  while (prefix + suffix < min_len &&
         std::all_of(seqs.begin(), seqs.end(), [&](const Seq& s) {
           return s[s.size() - 1 - suffix] ==
                  seqs[0][seqs[0].size() - 1 - suffix];
         })) {
    ++suffix;
  }

  // Group the middles by their first state; an empty middle marks the
  // whole alternation optional.
  bool has_empty = false;
  std::vector<StateId> heads;
  std::vector<std::vector<Seq>> groups;
  for (const auto& s : seqs) {
    Seq middle(s.begin() + prefix, s.end() - suffix);
    if (middle.empty()) {
      has_empty = true;
      continue;
    }
    auto it = std::find(heads.begin(), heads.end(), middle.front());
    if (it == heads.end()) {
      heads.push_back(middle.front());
      groups.push_back({std::move(middle)});
    } else {
      groups[it - heads.begin()].push_back(std::move(middle));
    }
  }
  std::vector<ConstraintAst> alternatives;
  for (const auto& g : groups) alternatives.push_back(MergeDistinct(g));
  ConstraintAst middle = ConstraintAst::Alternation(std::move(alternatives));
  if (has_empty) middle = ConstraintAst::Optional(std::move(middle));

  const Seq& first = seqs[0];
  std::vector<ConstraintAst> parts = Literals(first.begin(), first.begin() + prefix);
  parts.push_back(std::move(middle));
  for (auto& lit : Literals(first.end() - suffix, first.end())) {
    parts.push_back(std::move(lit));
  }
  return ConstraintAst::Concat(std::move(parts));
}

}  // namespace

ConstraintAst MergeExamples(const std::vector<ControlStateSeq>& sequences) {
  if (sequences.empty()) throw DomainError("nothing to merge");
  std::vector<Seq> distinct;
  for (const auto& s : sequences) {
    if (std::find(distinct.begin(), distinct.end(), s.ids()) == distinct.end()) {
      distinct.push_back(s.ids());
    }
  }
  return MergeDistinct(distinct);
}

}  // namespace ctrlgen

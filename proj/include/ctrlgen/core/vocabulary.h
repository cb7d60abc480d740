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

#ifndef CTRLGEN_CORE_VOCABULARY_H_
#define CTRLGEN_CORE_VOCABULARY_H_

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctrlgen/core/types.h"

namespace ctrlgen {

// Dense string <-> id map without special entries. Used for field names.
class SymbolTable {
 public:
  SymbolTable() = default;
  explicit SymbolTable(const std::vector<std::string>& symbols);

  int Add(std::string_view symbol);
  std::optional<int> Find(std::string_view symbol) const;
  const std::string& SymbolOf(int id) const { return symbols_.at(id); }
  int size() const { return static_cast<int>(symbols_.size()); }
  const std::vector<std::string>& symbols() const { return symbols_; }

  friend bool operator==(const SymbolTable& a, const SymbolTable& b) {
    return a.symbols_ == b.symbols_;
  }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
};

// Word vocabulary with BOS/EOS/UNK at fixed ids 0/1/2.
class Vocabulary {
 public:
  static constexpr TokenId kBos = 0;
  static constexpr TokenId kEos = 1;
  static constexpr TokenId kUnk = 2;
  static constexpr std::string_view kBosToken = "<bos>";
  static constexpr std::string_view kEosToken = "<eos>";
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocabulary();
  // Rebuilds a vocabulary from its full token list (specials first).
  // Throws FormatError when the list is not a valid vocabulary.
  static Vocabulary FromTokens(const std::vector<std::string>& tokens);

  TokenId Add(std::string_view token);
  // Unknown tokens map to kUnk.
  TokenId Lookup(std::string_view token) const;
  bool Contains(std::string_view token) const;
  const std::string& TokenOf(TokenId id) const;
  int size() const { return table_.size(); }
  const std::vector<std::string>& tokens() const { return table_.symbols(); }

  std::vector<TokenId> Encode(const std::vector<std::string>& tokens) const;
  std::vector<std::string> Decode(const std::vector<TokenId>& ids) const;

  // True for ids a generator may emit as an ordinary word.
  static bool IsEmittable(TokenId id) { return id != kBos && id != kEos; }

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

 private:
  SymbolTable table_;
};

// Every token with corpus count >= min_count gets an id, in order of first
// occurrence. Throws DomainError on an empty corpus.
Vocabulary BuildVocab(const std::vector<Example>& examples, int min_count);

// Vocabulary over the whitespace tokens of all table values.
Vocabulary BuildValueVocab(const std::vector<Example>& examples);

// Field names across all tables, in order of first occurrence.
SymbolTable BuildFieldTable(const std::vector<Example>& examples);

}  // namespace ctrlgen

#endif  // CTRLGEN_CORE_VOCABULARY_H_

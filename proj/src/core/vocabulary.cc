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

#include "ctrlgen/core/vocabulary.h"

#include "ctrlgen/core/errors.h"
#include "ctrlgen/core/tokenize.h"

namespace ctrlgen {

SymbolTable::SymbolTable(const std::vector<std::string>& symbols) {
  for (const auto& s : symbols) {
    if (Find(s)) throw FormatError("duplicate symbol '" + s + "'");
    Add(s);
  }
}

int SymbolTable::Add(std::string_view symbol) {
  std::string key(symbol);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  int id = static_cast<int>(symbols_.size());
  symbols_.push_back(key);
  index_.emplace(std::move(key), id);
  return id;
}

std::optional<int> SymbolTable::Find(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary::Vocabulary() {
  table_.Add(kBosToken);
  table_.Add(kEosToken);
  table_.Add(kUnkToken);
}

Vocabulary Vocabulary::FromTokens(const std::vector<std::string>& tokens) {
  if (tokens.size() < 3 || tokens[kBos] != kBosToken ||
      tokens[kEos] != kEosToken || tokens[kUnk] != kUnkToken) {
    throw FormatError("vocabulary must start with <bos>, <eos>, <unk>");
  }
  Vocabulary vocab;
  for (std::size_t i = 3; i < tokens.size(); ++i) {
    if (vocab.Contains(tokens[i])) {
      throw FormatError("duplicate vocabulary token '" + tokens[i] + "'");
    }
    vocab.Add(tokens[i]);
  }
  return vocab;
}

TokenId Vocabulary::Add(std::string_view token) { return table_.Add(token); }

TokenId Vocabulary::Lookup(std::string_view token) const {
  return table_.Find(token).value_or(kUnk);
}

bool Vocabulary::Contains(std::string_view token) const {
  return table_.Find(token).has_value();
}

const std::string& Vocabulary::TokenOf(TokenId id) const {
  if (id < 0 || id >= size()) {
    throw DomainError("token id " + std::to_string(id) + " out of range");
  }
  return table_.SymbolOf(id);
}

std::vector<TokenId> Vocabulary::Encode(
    const std::vector<std::string>& tokens) const {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(Lookup(t));
  return ids;
}

std::vector<std::string> Vocabulary::Decode(
    const std::vector<TokenId>& ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (TokenId id : ids) out.push_back(TokenOf(id));
  return out;
}

Vocabulary BuildVocab(const std::vector<Example>& examples, int min_count) {
  if (examples.empty()) throw DomainError("cannot build a vocabulary from an empty corpus");
  std::vector<std::string> order;
  std::unordered_map<std::string, int> counts;
  for (const auto& ex : examples) {
    for (const auto& tok : ex.tokens) {
      auto [it, inserted] = counts.try_emplace(tok, 0);
      if (inserted) order.push_back(tok);
      ++it->second;
    }
  }
  Vocabulary vocab;
  for (const auto& tok : order) {
    if (counts[tok] >= min_count) vocab.Add(tok);
  }
  return vocab;
}

Vocabulary BuildValueVocab(const std::vector<Example>& examples) {
  Vocabulary vocab;
  for (const auto& ex : examples) {
    for (const auto& [field, value] : ex.table.entries()) {
      for (const auto& tok : Tokenize(value)) vocab.Add(tok);
    }
  }
  return vocab;
}

SymbolTable BuildFieldTable(const std::vector<Example>& examples) {
  SymbolTable fields;
  for (const auto& ex : examples) {
    for (const auto& [field, value] : ex.table.entries()) fields.Add(field);
  }
  return fields;
}

}  // namespace ctrlgen

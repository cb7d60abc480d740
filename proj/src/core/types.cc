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

#include "ctrlgen/core/types.h"

#include <set>

#include "ctrlgen/core/errors.h"

namespace ctrlgen {

DataTable::DataTable(std::vector<Entry> entries, std::string schema_id)
    : entries_(std::move(entries)), schema_id_(std::move(schema_id)) {
  std::set<std::string_view> seen;
  for (const auto& [name, value] : entries_) {
    if (!seen.insert(name).second) {
      throw SchemaError("duplicate field '" + name + "'");
    }
    if (value.empty()) {
      throw DomainError("field '" + name + "' has an empty value");
    }
  }
}

std::optional<std::string> DataTable::Find(std::string_view field) const {
  for (const auto& [name, value] : entries_) {
    if (name == field) return value;
  }
  return std::nullopt;
}

DataTable DataTable::WithValue(std::string_view field,
                               std::string value) const {
  std::vector<Entry> entries = entries_;
  bool found = false;
  for (auto& [name, v] : entries) {
    if (name == field) {
      v = value;
      found = true;
    }
  }
  if (!found) throw SchemaError("unknown field '" + std::string(field) + "'");
  return DataTable(std::move(entries), schema_id_);
}

ControlAlphabet::ControlAlphabet(int size) : size_(size) {
  if (size < 2 || size > kMaxSize) {
    throw DomainError("control alphabet size must be in 2..26, got " +
                      std::to_string(size));
  }
}

char ControlAlphabet::Letter(StateId state) const {
  if (!Contains(state)) {
    throw DomainError("control state " + std::to_string(state) +
                      " outside alphabet of size " + std::to_string(size_));
  }
  return static_cast<char>('A' + state);
}

std::optional<StateId> ControlAlphabet::StateOf(char letter) const {
  if (letter < 'A' || letter > 'Z') return std::nullopt;
  StateId s = letter - 'A';
  if (s >= size_) return std::nullopt;
  return s;
}

ControlStateSeq ControlStateSeq::FromLetters(std::string_view letters) {
  return FromLetters(letters, ControlAlphabet(ControlAlphabet::kMaxSize));
}

ControlStateSeq ControlStateSeq::FromLetters(std::string_view letters,
                                             const ControlAlphabet& alphabet) {
  std::vector<StateId> ids;
  ids.reserve(letters.size());
  for (char c : letters) {
    auto s = alphabet.StateOf(c);
    if (!s) {
      throw DomainError(std::string("'") + c +
                        "' is not a control-state letter");
    }
    ids.push_back(*s);
  }
  return ControlStateSeq(std::move(ids));
}

std::string ControlStateSeq::ToLetters() const {
  std::string out;
  out.reserve(ids_.size());
  for (StateId s : ids_) {
    if (s < 0 || s >= ControlAlphabet::kMaxSize) {
      throw DomainError("control state " + std::to_string(s) +
                        " has no letter");
    }
    out.push_back(static_cast<char>('A' + s));
  }
  return out;
}

void Example::Validate() const {
  if (states && states->size() != tokens.size()) {
    throw DomainError("example has " + std::to_string(tokens.size()) +
                      " tokens but " + std::to_string(states->size()) +
                      " gold states");
  }
}

}  // namespace ctrlgen

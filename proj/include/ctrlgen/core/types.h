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

#ifndef CTRLGEN_CORE_TYPES_H_
#define CTRLGEN_CORE_TYPES_H_

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ctrlgen {

using StateId = int;
using TokenId = int;

// One input x: an ordered field -> value map.
class DataTable {
 public:
  using Entry = std::pair<std::string, std::string>;

  DataTable() = default;
  // Throws SchemaError on duplicate field names and DomainError on empty
  // values.
  explicit DataTable(std::vector<Entry> entries, std::string schema_id = "");

  const std::vector<Entry>& entries() const { return entries_; }
  const std::string& schema_id() const { return schema_id_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  std::optional<std::string> Find(std::string_view field) const;
  bool Has(std::string_view field) const { return Find(field).has_value(); }
  // Copy with one value replaced; the field must exist.
  DataTable WithValue(std::string_view field, std::string value) const;

  friend bool operator==(const DataTable&, const DataTable&) = default;

 private:
  std::vector<Entry> entries_;
  std::string schema_id_;
};

// Letters A..Z naming the user-visible control states 0..K-1.
class ControlAlphabet {
 public:
  static constexpr int kMaxSize = 26;

  explicit ControlAlphabet(int size);
  int size() const { return size_; }

  char Letter(StateId state) const;
  // Returns nullopt for characters that are not letters of this alphabet.
  std::optional<StateId> StateOf(char letter) const;
  bool Contains(StateId state) const { return state >= 0 && state < size_; }

 private:
  int size_;
};

// Control states z_1..z_T, one per output word.
class ControlStateSeq {
 public:
  ControlStateSeq() = default;
  explicit ControlStateSeq(std::vector<StateId> ids) : ids_(std::move(ids)) {}

  // Parses a letter string such as "FFJKECT" (any A..Z).
  static ControlStateSeq FromLetters(std::string_view letters);
  // Same, additionally checking every state against the alphabet.
  static ControlStateSeq FromLetters(std::string_view letters,
                                     const ControlAlphabet& alphabet);
  std::string ToLetters() const;

  const std::vector<StateId>& ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  StateId operator[](std::size_t i) const { return ids_[i]; }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }

  friend bool operator==(const ControlStateSeq&,
                         const ControlStateSeq&) = default;
  friend auto operator<=>(const ControlStateSeq&,
                          const ControlStateSeq&) = default;

 private:
  std::vector<StateId> ids_;
};

// A table paired with its reference text and, when known, gold states.
struct Example {
  DataTable table;
  std::vector<std::string> tokens;
  std::optional<ControlStateSeq> states;

  // Throws DomainError when the gold states do not cover the tokens.
  void Validate() const;

  friend bool operator==(const Example&, const Example&) = default;
};

}  // namespace ctrlgen

#endif  // CTRLGEN_CORE_TYPES_H_

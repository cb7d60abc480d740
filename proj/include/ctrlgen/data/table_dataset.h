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

// Restaurant-style table datasets in CSV form ("mr" and "ref" columns) and
// the string-match alignment between table values and text.
#ifndef CTRLGEN_DATA_TABLE_DATASET_H_
#define CTRLGEN_DATA_TABLE_DATASET_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctrlgen/core/types.h"

namespace ctrlgen {

// Parses "name[the phoenix], eatType[pub], ..." into a table. Values are
// lowercased and accent-folded; field names are kept. Throws FormatError on
// an empty or malformed list and SchemaError on a repeated field.
DataTable ParseMeaningRepresentation(std::string_view mr);
std::string FormatMeaningRepresentation(const DataTable& table);

// Lowercases, folds accents and splits punctuation into its own tokens:
// "The Phoenix is a French pub." -> the phoenix is a french pub .
std::vector<std::string> TokenizeReference(std::string_view text);

struct TableDataset {
  std::vector<Example> examples;
  // One message per skipped row, with its line number.
  std::vector<std::string> warnings;
  int skipped() const { return static_cast<int>(warnings.size()); }
};

// Throws IoError when the file cannot be read and FormatError when the
// header lacks mr/ref or no row is valid. Bad rows are skipped.
TableDataset LoadTableDataset(const std::string& path);
TableDataset ParseTableDataset(std::string_view csv);

// Writes the mr/ref CSV that LoadTableDataset reads back.
std::string FormatTableDataset(const std::vector<Example>& examples);
void SaveTableDataset(const std::string& path,
                      const std::vector<Example>& examples);

// Per token, the field whose value contains the longest matching span
// starting there, scanning left to right. Spans made only of function words
// are ignored. Unmatched tokens get nullopt.
std::vector<std::optional<std::string>> HeuristicAlign(
    const DataTable& table, const std::vector<std::string>& tokens);

// Weak state labels from HeuristicAlign: field i of `fields` maps to state
// i + 1 and unmatched tokens to state 0. Throws DomainError when the labels
// need more than `num_states` states.
ControlStateSeq WeakStates(const DataTable& table,
                           const std::vector<std::string>& tokens,
                           const std::vector<std::string>& fields,
                           int num_states);

// JSON lines of examples, or an mr/ref CSV when the path ends in ".csv".
// CSV warnings go to `warnings` when given.
std::vector<Example> LoadExamples(const std::string& path,
                                  std::vector<std::string>* warnings = nullptr);

// Fills missing gold states with WeakStates, fields ordered as in
// BuildFieldTable(examples).
void AddWeakStates(std::vector<Example>& examples, int num_states);

}  // namespace ctrlgen

#endif  // CTRLGEN_DATA_TABLE_DATASET_H_

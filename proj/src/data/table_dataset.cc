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

#include "ctrlgen/data/table_dataset.h"

#include <algorithm>
#include <array>
#include <cctype>

#include "ctrlgen/core/codec.h"
#include "ctrlgen/core/errors.h"
#include "ctrlgen/core/tokenize.h"
#include "ctrlgen/core/vocabulary.h"

namespace ctrlgen {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

// RFC 4180 records: quoted fields may hold commas, doubled quotes and
// newlines. Each record carries the line it starts on.
struct Record {
  int line;
  std::vector<std::string> fields;
};

std::vector<Record> ParseCsv(std::string_view text) {
  std::vector<Record> records;
  Record cur{1, {}};
  std::string field;
  bool quoted = false, any = false;
  int line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        any = true;
        break;
      case ',':
        cur.fields.push_back(std::move(field));
        field.clear();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        if (any || !field.empty()) {
          cur.fields.push_back(std::move(field));
          records.push_back(std::move(cur));
        }
        field.clear();
        any = false;
        cur = Record{++line, {}};
        break;
      default:
        field.push_back(c);
        any = true;
    }
  }
  if (any || !field.empty()) {
    cur.fields.push_back(std::move(field));
    records.push_back(std::move(cur));
  }
  return records;
}

std::string CsvQuote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

bool IsPunct(char c) {
  return c == '.' || c == ',' || c == '!' || c == '?' || c == ';' ||
         c == ':' || c == '(' || c == ')' || c == '"';
}

bool IsFunctionWord(std::string_view w) {
  static constexpr std::array<std::string_view, 14> kWords = {
      "the", "a", "an", "of", "in", "on", "and", "is", "it", "at",
      "to", "near", "with", ","};
  return std::find(kWords.begin(), kWords.end(), w) != kWords.end() ||
         (w.size() == 1 && IsPunct(w[0]));
}

}  // namespace

DataTable ParseMeaningRepresentation(std::string_view mr) {
  std::vector<DataTable::Entry> entries;
  std::string_view rest = Trim(mr);
  if (rest.empty()) throw FormatError("empty attribute list");
  while (!rest.empty()) {
    std::size_t open = rest.find('[');
    std::size_t close = rest.find(']');
    if (open == std::string_view::npos || close == std::string_view::npos ||
        close < open) {
      throw FormatError("malformed attribute near '" + std::string(rest) + "'");
    }
    if (rest.substr(open + 1, close - open - 1).find('[') != std::string_view::npos) {
      throw FormatError("unbalanced '[' in attribute list");
    }
    std::string_view name = Trim(rest.substr(0, open));
    std::string value =
        FoldAccentsLower(Trim(rest.substr(open + 1, close - open - 1)));
    if (name.empty() || value.empty()) {
      throw FormatError("attribute with empty name or value");
    }
    entries.emplace_back(std::string(name), Detokenize(Tokenize(value)));
    rest = Trim(rest.substr(close + 1));
    if (!rest.empty()) {
      if (rest.front() != ',') {
        throw FormatError("expected ',' between attributes");
      }
      rest = Trim(rest.substr(1));
      if (rest.empty()) throw FormatError("trailing ',' in attribute list");
    }
  }
  return DataTable(std::move(entries));
}

std::string FormatMeaningRepresentation(const DataTable& table) {
  std::string out;
  for (const auto& [name, value] : table.entries()) {
    if (!out.empty()) out += ", ";
    out += name + "[" + value + "]";
  }
  return out;
}

std::vector<std::string> TokenizeReference(std::string_view text) {
  std::string folded = FoldAccentsLower(text);
  std::string spaced;
  for (std::size_t i = 0; i < folded.size(); ++i) {
    char c = folded[i];
    bool numeric_sep = (c == '.' || c == ',') && i > 0 && i + 1 < folded.size() &&
                       std::isdigit(static_cast<unsigned char>(folded[i - 1])) &&
                       std::isdigit(static_cast<unsigned char>(folded[i + 1]));
    if (IsPunct(c) && !numeric_sep) {
      spaced += ' ';
      if (c != '"') spaced += c;
      spaced += ' ';
    } else {
      spaced += c;
    }
  }
  return Tokenize(spaced);
}

TableDataset ParseTableDataset(std::string_view csv) {
  std::vector<Record> records = ParseCsv(csv);
  if (records.empty()) throw FormatError("dataset has no header");
  int mr_col = -1, ref_col = -1;
  const auto& header = records.front().fields;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    std::string_view h = Trim(header[i]);
    if (h == "mr") mr_col = i;
    if (h == "ref") ref_col = i;
  }
  if (mr_col < 0 || ref_col < 0) {
    throw FormatError("dataset header needs 'mr' and 'ref' columns");
  }
  TableDataset out;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const Record& rec = records[r];
    auto warn = [&](const std::string& why) {
      out.warnings.push_back("line " + std::to_string(rec.line) + ": " + why);
    };
    if (rec.fields.size() != header.size()) {
      warn("expected " + std::to_string(header.size()) + " columns, got " +
           std::to_string(rec.fields.size()));
      continue;
    }
    try {
      DataTable table = ParseMeaningRepresentation(rec.fields[mr_col]);
      std::vector<std::string> tokens = TokenizeReference(rec.fields[ref_col]);
      if (tokens.empty()) throw FormatError("empty reference");
      out.examples.push_back({std::move(table), std::move(tokens), std::nullopt});
    } catch (const Error& e) {
      warn(e.what());
    }
  }
  if (out.examples.empty()) throw FormatError("dataset has no valid rows");
  return out;
}

TableDataset LoadTableDataset(const std::string& path) {
  return ParseTableDataset(ReadFileBytes(path));
}

std::string FormatTableDataset(const std::vector<Example>& examples) {
  std::string out = "mr,ref\n";
  for (const Example& e : examples) {
    out += CsvQuote(FormatMeaningRepresentation(e.table)) + "," +
           CsvQuote(Detokenize(e.tokens)) + "\n";
  }
  return out;
}

void SaveTableDataset(const std::string& path,
                      const std::vector<Example>& examples) {
  WriteFileBytes(path, FormatTableDataset(examples));
}

std::vector<std::optional<std::string>> HeuristicAlign(
    const DataTable& table, const std::vector<std::string>& tokens) {
  std::vector<std::vector<std::string>> values;
  for (const auto& [name, value] : table.entries()) {
    values.push_back(Tokenize(value));
  }
  std::vector<std::optional<std::string>> labels(tokens.size());
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t best_len = 0;
    int best_field = -1;
    for (int f = 0; f < static_cast<int>(values.size()); ++f) {
      const auto& v = values[f];
      for (std::size_t start = 0; start < v.size(); ++start) {
        std::size_t len = 0;
        while (i + len < tokens.size() && start + len < v.size() &&
               tokens[i + len] == v[start + len]) {
          ++len;
        }
        bool content = false;
        for (std::size_t k = 0; k < len; ++k) {
          content = content || !IsFunctionWord(tokens[i + k]);
        }
        // A whole-value match counts even for function words.
        bool whole = start == 0 && len == v.size();
        if ((content || whole) && len > best_len) {
          best_len = len;
          best_field = f;
        }
      }
    }
    if (best_field < 0) {
      ++i;
      continue;
    }
    for (std::size_t k = 0; k < best_len; ++k) {
      labels[i + k] = table.entries()[best_field].first;
    }
    i += best_len;
  }
  return labels;
}

ControlStateSeq WeakStates(const DataTable& table,
                           const std::vector<std::string>& tokens,
                           const std::vector<std::string>& fields,
                           int num_states) {
  if (static_cast<int>(fields.size()) + 1 > num_states) {
    throw DomainError(std::to_string(fields.size()) + " fields need " +
                      std::to_string(fields.size() + 1) + " states, have " +
                      std::to_string(num_states));
  }
  std::vector<StateId> ids;
  for (const auto& label : HeuristicAlign(table, tokens)) {
    StateId s = 0;
    if (label) {
      auto it = std::find(fields.begin(), fields.end(), *label);
      if (it == fields.end()) {
        throw SchemaError("field '" + *label + "' missing from the field list");
      }
      s = static_cast<StateId>(it - fields.begin()) + 1;
    }
    ids.push_back(s);
  }
  return ControlStateSeq(std::move(ids));
}

std::vector<Example> LoadExamples(const std::string& path,
                                  std::vector<std::string>* warnings) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
    TableDataset d = LoadTableDataset(path);
    if (warnings) warnings->insert(warnings->end(), d.warnings.begin(), d.warnings.end());
    return std::move(d.examples);
  }
  return ReadExamplesJsonl(path);
}

void AddWeakStates(std::vector<Example>& examples, int num_states) {
  std::vector<std::string> fields = BuildFieldTable(examples).symbols();
  for (Example& e : examples) {
    if (!e.states) e.states = WeakStates(e.table, e.tokens, fields, num_states);
  }
}

}  // namespace ctrlgen

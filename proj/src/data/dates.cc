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

#include "ctrlgen/data/dates.h"

#include <array>
#include <sstream>

#include "ctrlgen/core/errors.h"
#include "ctrlgen/core/random.h"

namespace ctrlgen {
namespace {

constexpr std::array<std::string_view, 12> kMonths = {
    "january", "february", "march",     "april",   "may",      "june",
    "july",    "august",   "september", "october", "november", "december"};

constexpr std::array<std::string_view, 20> kOrdinals = {
    "first",      "second",     "third",       "fourth",     "fifth",
    "sixth",      "seventh",    "eighth",      "ninth",      "tenth",
    "eleventh",   "twelfth",    "thirteenth",  "fourteenth", "fifteenth",
    "sixteenth",  "seventeenth", "eighteenth", "nineteenth", "twentieth"};

GoldRole LiteralRole(std::string_view token) {
  if (token == "today" || token == "is") return GoldRole::kFiller;
  if (token == "," || token == ".") return GoldRole::kPunct;
  if (token == "the" || token == "of" || token == "in" || token == "year") {
    return GoldRole::kConnective;
  }
  throw DomainError("no role for template token '" + std::string(token) + "'");
}

std::vector<std::string> Split(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

int ParseField(const DataTable& table, std::string_view field) {
  auto v = table.Find(field);
  if (!v) throw SchemaError("date table lacks field '" + std::string(field) + "'");
  try {
    std::size_t used = 0;
    int x = std::stoi(*v, &used);
    if (used != v->size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw DomainError("date field '" + std::string(field) + "' is not an integer: " +
                      *v);
  }
}

}  // namespace

StateId RoleState(GoldRole role) { return static_cast<StateId>(role); }

std::string_view RoleName(GoldRole role) {
  switch (role) {
    case GoldRole::kFiller: return "FILLER";
    case GoldRole::kDay: return "DAY";
    case GoldRole::kMonth: return "MONTH";
    case GoldRole::kYear: return "YEAR";
    case GoldRole::kPunct: return "PUNCT";
    case GoldRole::kConnective: return "CONNECTIVE";
  }
  return "?";
}

const std::vector<DateFormatSpec>& DateFormats() {
  // Index bits: ordinal, day_first, comma.
  static const std::vector<DateFormatSpec> formats = {
      {true, true, true, "today is the {DAY} of {MONTH} , {YEAR} ."},
      {true, true, false, "today is the {DAY} of {MONTH} {YEAR} ."},
      {true, false, true, "today is {MONTH} the {DAY} , {YEAR} ."},
      {true, false, false, "today is {MONTH} the {DAY} in the year {YEAR} ."},
      {false, true, true, "today is {DAY} {MONTH} , {YEAR} ."},
      {false, true, false, "today is {DAY} {MONTH} {YEAR} ."},
      {false, false, true, "today is {MONTH} {DAY} , {YEAR} ."},
      {false, false, false, "today is {MONTH} {DAY} {YEAR} ."},
  };
  return formats;
}

void ValidateDate(const Date& d) {
  if (d.day < 1 || d.day > kMaxDay || d.month < 1 || d.month > 12 ||
      d.year < kMinYear || d.year > kMaxYear) {
    throw DomainError("date out of range: " + std::to_string(d.day) + "/" +
                      std::to_string(d.month) + "/" + std::to_string(d.year));
  }
}

DataTable DateTable(const Date& d) {
  ValidateDate(d);
  return DataTable({{"day", std::to_string(d.day)},
                    {"month", std::to_string(d.month)},
                    {"year", std::to_string(d.year)}},
                   "date");
}

Date DateFromTable(const DataTable& table) {
  Date d{ParseField(table, "day"), ParseField(table, "month"),
         ParseField(table, "year")};
  ValidateDate(d);
  return d;
}

std::string OrdinalWords(int day) {
  if (day < 1 || day > kMaxDay) {
    throw DomainError("day out of range: " + std::to_string(day));
  }
  if (day <= 20) return std::string(kOrdinals[day - 1]);
  return "twenty " + std::string(kOrdinals[day - 21]);
}

std::string_view MonthName(int month) {
  if (month < 1 || month > 12) {
    throw DomainError("month out of range: " + std::to_string(month));
  }
  return kMonths[month - 1];
}

RenderedDate RenderDate(const Date& date, const DateFormatSpec& format) {
  ValidateDate(date);
  RenderedDate out;
  auto emit = [&](const std::string& words, GoldRole role) {
    for (auto& w : Split(words)) {
      out.tokens.push_back(std::move(w));
      out.roles.push_back(role);
    }
  };
  for (const std::string& tok : Split(format.pattern)) {
    if (tok == "{DAY}") {
      emit(format.ordinal_day ? OrdinalWords(date.day) : std::to_string(date.day),
           GoldRole::kDay);
    } else if (tok == "{MONTH}") {
      emit(std::string(MonthName(date.month)), GoldRole::kMonth);
    } else if (tok == "{YEAR}") {
      emit(std::to_string(date.year), GoldRole::kYear);
    } else {
      emit(tok, LiteralRole(tok));
    }
  }
  return out;
}

Example MakeDateExample(const Date& date, int format_index) {
  const auto& formats = DateFormats();
  if (format_index < 0 || format_index >= static_cast<int>(formats.size())) {
    throw DomainError("date format index out of range: " +
                      std::to_string(format_index));
  }
  RenderedDate r = RenderDate(date, formats[format_index]);
  std::vector<StateId> states;
  for (GoldRole role : r.roles) states.push_back(RoleState(role));
  return Example{DateTable(date), std::move(r.tokens),
                 ControlStateSeq(std::move(states))};
}

std::vector<Example> GenDateDataset(int n, std::uint64_t seed) {
  if (n < 1) throw DomainError("dataset size must be >= 1");
  Rng rng(seed);
  std::vector<Example> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Date d;
    d.day = static_cast<int>(rng.UniformInt(1, kMaxDay));
    d.month = static_cast<int>(rng.UniformInt(1, 12));
    d.year = static_cast<int>(rng.UniformInt(kMinYear, kMaxYear));
    int format = static_cast<int>(rng.UniformInt(0, 7));
    out.push_back(MakeDateExample(d, format));
  }
  return out;
}

int MatchDateFormat(const Example& example) {
  Date d;
  try {
    d = DateFromTable(example.table);
  } catch (const Error& e) {
    throw AlignmentError(std::string("not a date table: ") + e.what());
  }
  const auto& formats = DateFormats();
  for (int i = 0; i < static_cast<int>(formats.size()); ++i) {
    if (RenderDate(d, formats[i]).tokens == example.tokens) return i;
  }
  throw AlignmentError("tokens are not a rendering of the table's date");
}

ControlStateSeq AlignDate(const Example& example) {
  int format = MatchDateFormat(example);
  return *MakeDateExample(DateFromTable(example.table), format).states;
}

std::string FormatConstraint(int format_index) {
  const auto& formats = DateFormats();
  if (format_index < 0 || format_index >= static_cast<int>(formats.size())) {
    throw DomainError("date format index out of range: " +
                      std::to_string(format_index));
  }
  const DateFormatSpec& f = formats[format_index];
  std::string re;
  auto letter = [](GoldRole r) { return static_cast<char>('A' + RoleState(r)); };
  for (const std::string& tok : Split(f.pattern)) {
    if (tok == "{DAY}") {
      re += letter(GoldRole::kDay);
      if (f.ordinal_day) re += '+';
    } else if (tok == "{MONTH}") {
      re += letter(GoldRole::kMonth);
    } else if (tok == "{YEAR}") {
      re += letter(GoldRole::kYear);
    } else {
      re += letter(LiteralRole(tok));
    }
  }
  return re;
}

}  // namespace ctrlgen

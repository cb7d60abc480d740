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

// Synthetic date corpus: a (day, month, year) table rendered in one of eight
// formats, with a gold control state per token.
#ifndef CTRLGEN_DATA_DATES_H_
#define CTRLGEN_DATA_DATES_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ctrlgen/core/types.h"

namespace ctrlgen {

enum class GoldRole { kFiller, kDay, kMonth, kYear, kPunct, kConnective };

inline constexpr int kNumGoldRoles = 6;
// Model size for dates; states past the six roles stay unused by the gold
// labels.
inline constexpr int kDateNumStates = 10;

// Roles map to the first six states, A..F.
StateId RoleState(GoldRole role);
std::string_view RoleName(GoldRole role);

struct DateFormatSpec {
  bool ordinal_day = false;
  bool day_first = false;
  bool comma_before_year = false;
  // Space-separated tokens with {DAY}, {MONTH} and {YEAR} slots.
  std::string pattern;
};

// The eight formats, indexed 0..7.
const std::vector<DateFormatSpec>& DateFormats();

struct Date {
  int day = 1;     // 1..28
  int month = 1;   // 1..12
  int year = 1990;  // 1990..2025

  friend bool operator==(const Date&, const Date&) = default;
};

inline constexpr int kMaxDay = 28;
inline constexpr int kMinYear = 1990;
inline constexpr int kMaxYear = 2025;

// Throws DomainError outside the ranges above.
void ValidateDate(const Date& date);

// Table with fields day, month, year holding decimal strings.
DataTable DateTable(const Date& date);
// Inverse of DateTable. Throws SchemaError or DomainError.
Date DateFromTable(const DataTable& table);

// "fourteenth", "twenty first".
std::string OrdinalWords(int day);
std::string_view MonthName(int month);

struct RenderedDate {
  std::vector<std::string> tokens;
  std::vector<GoldRole> roles;
};

RenderedDate RenderDate(const Date& date, const DateFormatSpec& format);

// Example for `date` in format `format_index`, gold states attached.
Example MakeDateExample(const Date& date, int format_index);

// `n` examples with uniform dates and formats. Deterministic per seed.
std::vector<Example> GenDateDataset(int n, std::uint64_t seed);

// Index of the format whose rendering of the example's date equals its
// tokens. Throws AlignmentError when none does.
int MatchDateFormat(const Example& example);

// Gold states of a rendered date example. Throws AlignmentError when the
// tokens are not a rendering of the table's date.
ControlStateSeq AlignDate(const Example& example);

// State regex accepted by every rendering in the format. Ordinal days may be
// one or two words, so their state repeats.
std::string FormatConstraint(int format_index);

}  // namespace ctrlgen

#endif  // CTRLGEN_DATA_DATES_H_

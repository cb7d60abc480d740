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

#include "ctrlgen/core/tokenize.h"

#include <cctype>
#include <string_view>
#include <utility>

namespace ctrlgen {

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string Detokenize(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

namespace {

// Two-byte UTF-8 sequences (lead byte 0xC3) for Latin-1 letters.
char FoldLatin1(unsigned char second) {
  static constexpr std::pair<unsigned char, char> kTable[] = {
      {0x80, 'a'}, {0x81, 'a'}, {0x82, 'a'}, {0x83, 'a'}, {0x84, 'a'},
      {0x85, 'a'}, {0x87, 'c'}, {0x88, 'e'}, {0x89, 'e'}, {0x8A, 'e'},
      {0x8B, 'e'}, {0x8C, 'i'}, {0x8D, 'i'}, {0x8E, 'i'}, {0x8F, 'i'},
      {0x91, 'n'}, {0x92, 'o'}, {0x93, 'o'}, {0x94, 'o'}, {0x95, 'o'},
      {0x96, 'o'}, {0x98, 'o'}, {0x99, 'u'}, {0x9A, 'u'}, {0x9B, 'u'},
      {0x9C, 'u'}, {0x9D, 'y'}, {0xA0, 'a'}, {0xA1, 'a'}, {0xA2, 'a'},
      {0xA3, 'a'}, {0xA4, 'a'}, {0xA5, 'a'}, {0xA7, 'c'}, {0xA8, 'e'},
      {0xA9, 'e'}, {0xAA, 'e'}, {0xAB, 'e'}, {0xAC, 'i'}, {0xAD, 'i'},
      {0xAE, 'i'}, {0xAF, 'i'}, {0xB1, 'n'}, {0xB2, 'o'}, {0xB3, 'o'},
      {0xB4, 'o'}, {0xB5, 'o'}, {0xB6, 'o'}, {0xB8, 'o'}, {0xB9, 'u'},
      {0xBA, 'u'}, {0xBB, 'u'}, {0xBC, 'u'}, {0xBD, 'y'}, {0xBF, 'y'},
  };
  for (const auto& [byte, ascii] : kTable) {
    if (byte == second) return ascii;
  }
  return 0;
}

}  // namespace

std::string FoldAccentsLower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    auto c = static_cast<unsigned char>(text[i]);
    if (c == 0xC3 && i + 1 < text.size()) {
      char folded = FoldLatin1(static_cast<unsigned char>(text[i + 1]));
      if (folded != 0) {
        out.push_back(folded);
        ++i;
        continue;
      }
    }
    out.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
  }
  return out;
}

}  // namespace ctrlgen

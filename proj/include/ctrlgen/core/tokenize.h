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

#ifndef CTRLGEN_CORE_TOKENIZE_H_
#define CTRLGEN_CORE_TOKENIZE_H_

#include <string>
#include <string_view>
#include <vector>

namespace ctrlgen {

// Lowercases ASCII and splits on whitespace. Corpora are expected to be
// pre-tokenized, with punctuation already separated by spaces.
std::vector<std::string> Tokenize(std::string_view text);

// Joins tokens with single spaces.
std::string Detokenize(const std::vector<std::string>& tokens);

// Maps common accented Latin letters (UTF-8) to their ASCII base letter and
// lowercases the result, e.g. "Café Sicilia" -> "cafe sicilia".
std::string FoldAccentsLower(std::string_view text);

}  // namespace ctrlgen

#endif  // CTRLGEN_CORE_TOKENIZE_H_

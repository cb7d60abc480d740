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

#ifndef CTRLGEN_CONSTRAINT_REGEX_H_
#define CTRLGEN_CONSTRAINT_REGEX_H_

#include <string>
#include <string_view>

#include "ctrlgen/constraint/ast.h"
#include "ctrlgen/core/types.h"

namespace ctrlgen {

// Grammar: uppercase letters are literals, `.` matches any state, postfix
// `*` `+` `?`, infix `|`, grouping `(...)`, implicit concatenation.
// Whitespace is ignored; `()` and the empty string denote the empty
// sequence. Throws AlphabetError for letters outside the alphabet and
// SyntaxError for malformed text, both with the character offset.
ConstraintAst ParseRegex(std::string_view text, const ControlAlphabet& alphabet);

// Inverse of ParseRegex up to language equality, with the fewest parentheses
// the grammar allows.
std::string RenderRegex(const ConstraintAst& ast);

}  // namespace ctrlgen

#endif  // CTRLGEN_CONSTRAINT_REGEX_H_

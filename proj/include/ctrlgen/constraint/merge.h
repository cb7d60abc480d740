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

#ifndef CTRLGEN_CONSTRAINT_MERGE_H_
#define CTRLGEN_CONSTRAINT_MERGE_H_

#include <vector>

#include "ctrlgen/constraint/ast.h"
#include "ctrlgen/core/types.h"

namespace ctrlgen {

// Combines example state sequences into one constraint whose language is
// exactly the set of inputs. Shared prefixes and suffixes are factored out,
// diverging middles become alternations grouped trie-style by their first
// state, and a middle that is empty in some inputs becomes Optional. Never
// introduces Star/Plus. Throws DomainError for an empty list.
ConstraintAst MergeExamples(const std::vector<ControlStateSeq>& sequences);

}  // namespace ctrlgen

#endif  // CTRLGEN_CONSTRAINT_MERGE_H_

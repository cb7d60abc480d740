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

#ifndef CTRLGEN_CONSTRAINT_AST_H_
#define CTRLGEN_CONSTRAINT_AST_H_

#include <string>
#include <vector>

#include "ctrlgen/core/codec.h"
#include "ctrlgen/core/types.h"

namespace ctrlgen {

// Regular expression over control states.
struct ConstraintAst {
  enum class Kind {
    kLiteral,
    kWildcard,
    kConcat,
    kAlternation,
    kStar,
    kPlus,
    kOptional,
    kEpsilon,
  };

  Kind kind = Kind::kEpsilon;
  StateId state = -1;  // kLiteral only
  std::vector<ConstraintAst> children;

  static ConstraintAst Literal(StateId state);
  static ConstraintAst Wildcard();
  static ConstraintAst Epsilon();
  // Zero parts collapse to Epsilon and one part to that part.
  static ConstraintAst Concat(std::vector<ConstraintAst> parts);
  static ConstraintAst Alternation(std::vector<ConstraintAst> alternatives);
  static ConstraintAst Star(ConstraintAst child);
  static ConstraintAst Plus(ConstraintAst child);
  static ConstraintAst Optional(ConstraintAst child);

  bool IsPostfix() const {
    return kind == Kind::kStar || kind == Kind::kPlus ||
           kind == Kind::kOptional;
  }

  // Largest literal state id, or -1 when there are none.
  StateId MaxLiteral() const;
  int Depth() const;

  friend bool operator==(const ConstraintAst&, const ConstraintAst&) = default;
};

const char* KindName(ConstraintAst::Kind kind);

// {"type":"concat","children":[{"type":"lit","state":0,"letter":"A"},...]}
Json AstToJson(const ConstraintAst& ast);
ConstraintAst AstFromJson(const Json& j);

}  // namespace ctrlgen

#endif  // CTRLGEN_CONSTRAINT_AST_H_

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

#include "ctrlgen/constraint/ast.h"

#include <algorithm>

#include "ctrlgen/core/errors.h"

namespace ctrlgen {

ConstraintAst ConstraintAst::Literal(StateId state) {
  ConstraintAst a;
  a.kind = Kind::kLiteral;
  a.state = state;
  return a;
}

ConstraintAst ConstraintAst::Wildcard() {
  ConstraintAst a;
  a.kind = Kind::kWildcard;
  return a;
}

ConstraintAst ConstraintAst::Epsilon() { return ConstraintAst(); }

ConstraintAst ConstraintAst::Concat(std::vector<ConstraintAst> parts) {
  if (parts.empty()) return Epsilon();
  if (parts.size() == 1) return std::move(parts.front());
  ConstraintAst a;
  a.kind = Kind::kConcat;
  a.children = std::move(parts);
  return a;
}

ConstraintAst ConstraintAst::Alternation(
    std::vector<ConstraintAst> alternatives) {
  if (alternatives.empty()) {
    throw DomainError("alternation needs at least one alternative");
  }
  if (alternatives.size() == 1) return std::move(alternatives.front());
  ConstraintAst a;
  a.kind = Kind::kAlternation;
  a.children = std::move(alternatives);
  return a;
}

namespace {
ConstraintAst Wrap(ConstraintAst::Kind kind, ConstraintAst child) {
  ConstraintAst a;
  a.kind = kind;
  a.children.push_back(std::move(child));
  return a;
}
}  // namespace

ConstraintAst ConstraintAst::Star(ConstraintAst child) {
  return Wrap(Kind::kStar, std::move(child));
}
ConstraintAst ConstraintAst::Plus(ConstraintAst child) {
  return Wrap(Kind::kPlus, std::move(child));
}
ConstraintAst ConstraintAst::Optional(ConstraintAst child) {
  return Wrap(Kind::kOptional, std::move(child));
}

StateId ConstraintAst::MaxLiteral() const {
  StateId m = kind == Kind::kLiteral ? state : -1;
  for (const auto& c : children) m = std::max(m, c.MaxLiteral());
  return m;
}

int ConstraintAst::Depth() const {
  int d = 0;
  for (const auto& c : children) d = std::max(d, c.Depth());
  return d + 1;
}

const char* KindName(ConstraintAst::Kind kind) {
  switch (kind) {
    case ConstraintAst::Kind::kLiteral: return "lit";
    case ConstraintAst::Kind::kWildcard: return "any";
    case ConstraintAst::Kind::kConcat: return "concat";
    case ConstraintAst::Kind::kAlternation: return "alt";
    case ConstraintAst::Kind::kStar: return "star";
    case ConstraintAst::Kind::kPlus: return "plus";
    case ConstraintAst::Kind::kOptional: return "opt";
    case ConstraintAst::Kind::kEpsilon: return "eps";
  }
  return "?";
}

Json AstToJson(const ConstraintAst& ast) {
  Json j;
  j["type"] = KindName(ast.kind);
  if (ast.kind == ConstraintAst::Kind::kLiteral) {
    j["state"] = ast.state;
    if (ast.state >= 0 && ast.state < 26) {
      j["letter"] = std::string(1, static_cast<char>('A' + ast.state));
    }
  }
  if (!ast.children.empty()) {
    Json children = Json::array();
    for (const auto& c : ast.children) children.push_back(AstToJson(c));
    j["children"] = std::move(children);
  }
  return j;
}

ConstraintAst AstFromJson(const Json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw FormatError("AST node must have a string \"type\"");
  }
  const std::string type = j["type"].get<std::string>();
  std::vector<ConstraintAst> children;
  if (j.contains("children")) {
    for (const auto& c : j["children"]) children.push_back(AstFromJson(c));
  }
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (children.size() < lo || children.size() > hi) {
      throw FormatError("AST node '" + type + "' has " +
                        std::to_string(children.size()) + " children");
    }
  };
  if (type == "lit") {
    if (!j.contains("state") || !j["state"].is_number_integer()) {
      throw FormatError("literal needs an integer \"state\"");
    }
    return ConstraintAst::Literal(j["state"].get<int>());
  }
  if (type == "any") return ConstraintAst::Wildcard();
  if (type == "eps") return ConstraintAst::Epsilon();
  if (type == "concat") {
    need(1, SIZE_MAX);
    ConstraintAst a;
    a.kind = ConstraintAst::Kind::kConcat;
    a.children = std::move(children);
    return a;
  }
  if (type == "alt") {
    need(1, SIZE_MAX);
    ConstraintAst a;
    a.kind = ConstraintAst::Kind::kAlternation;
    a.children = std::move(children);
    return a;
  }
  need(1, 1);
  if (type == "star") return ConstraintAst::Star(std::move(children[0]));
  if (type == "plus") return ConstraintAst::Plus(std::move(children[0]));
  if (type == "opt") return ConstraintAst::Optional(std::move(children[0]));
  throw FormatError("unknown AST node type '" + type + "'");
}

}  // namespace ctrlgen

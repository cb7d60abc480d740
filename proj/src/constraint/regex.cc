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

#include "ctrlgen/constraint/regex.h"

#include <cctype>
#include <utility>
#include <vector>

#include "ctrlgen/core/errors.h"

namespace ctrlgen {
namespace {

class Parser {
 public:
  Parser(std::string_view text, const ControlAlphabet& alphabet)
      : text_(text), alphabet_(alphabet) {}

  ConstraintAst Parse() {
    ConstraintAst ast = ParseAlternation();
    SkipSpace();
    if (pos_ < text_.size()) {
      throw SyntaxError("unbalanced ')'", pos_);
    }
    return ast;
  }

 private:
  void SkipSpace() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  int Peek() {
    SkipSpace();
    return pos_ < text_.size() ? text_[pos_] : -1;
  }

  ConstraintAst ParseAlternation() {
    std::vector<ConstraintAst> alternatives;
    bool empty = false;
    alternatives.push_back(ParseConcat(&empty));
    bool any_empty = empty;
    while (Peek() == '|') {
      std::size_t bar = pos_++;
      if (any_empty) throw SyntaxError("dangling '|'", bar);
      alternatives.push_back(ParseConcat(&empty));
      if (empty) throw SyntaxError("dangling '|'", bar);
    }
    return ConstraintAst::Alternation(std::move(alternatives));
  }

  ConstraintAst ParseConcat(bool* empty) {
    std::vector<ConstraintAst> items;
    for (int c = Peek(); c != -1 && c != '|' && c != ')'; c = Peek()) {
      items.push_back(ParsePostfix());
    }
    *empty = items.empty();
    if (items.size() == 1) return std::move(items.front());
    if (items.empty()) return ConstraintAst::Epsilon();
    ConstraintAst a;
    a.kind = ConstraintAst::Kind::kConcat;
    a.children = std::move(items);
    return a;
  }

  ConstraintAst ParsePostfix() {
    ConstraintAst atom = ParseAtom();
    for (int c = Peek(); c == '*' || c == '+' || c == '?'; c = Peek()) {
      ++pos_;
      if (c == '*') atom = ConstraintAst::Star(std::move(atom));
      if (c == '+') atom = ConstraintAst::Plus(std::move(atom));
      if (c == '?') atom = ConstraintAst::Optional(std::move(atom));
    }
    return atom;
  }

  ConstraintAst ParseAtom() {
    int c = Peek();
    std::size_t at = pos_;
    if (c == '*' || c == '+' || c == '?') {
      throw SyntaxError(std::string("dangling '") + static_cast<char>(c) + "'",
                        at);
    }
    if (c == '.') {
      ++pos_;
      return ConstraintAst::Wildcard();
    }
    if (c == '(') {
      ++pos_;
      if (Peek() == ')') {
        ++pos_;
        return ConstraintAst::Epsilon();
      }
      ConstraintAst inner = ParseAlternation();
      if (Peek() != ')') throw SyntaxError("unbalanced '('", at);
      ++pos_;
      return inner;
    }
    if (c >= 'A' && c <= 'Z') {
      auto state = alphabet_.StateOf(static_cast<char>(c));
      if (!state) {
        throw AlphabetError(std::string("letter '") + static_cast<char>(c) +
                                "' outside alphabet of size " +
                                std::to_string(alphabet_.size()),
                            at);
      }
      ++pos_;
      return ConstraintAst::Literal(*state);
    }
    throw SyntaxError(std::string("unexpected character '") +
                          static_cast<char>(c) + "'",
                      at);
  }

  std::string_view text_;
  const ControlAlphabet& alphabet_;
  std::size_t pos_ = 0;
};

// Binding strength: alternation < concatenation < postfix < atom.
enum Level { kAlt = 0, kCat = 1, kPostfix = 2, kAtom = 3 };

std::pair<std::string, Level> Render(const ConstraintAst& ast) {
  using Kind = ConstraintAst::Kind;
  switch (ast.kind) {
    case Kind::kLiteral:
      return {std::string(1, static_cast<char>('A' + ast.state)), kAtom};
    case Kind::kWildcard:
      return {".", kAtom};
    case Kind::kEpsilon:
      return {"()", kAtom};
    case Kind::kConcat: {
      std::string out;
      int parts = 0;
      for (const auto& c : ast.children) {
        if (c.kind == Kind::kEpsilon) continue;
        auto [s, level] = Render(c);
        out += level < kCat ? "(" + s + ")" : s;
        ++parts;
      }
      if (parts == 0) return {"()", kAtom};
      return {out, parts == 1 ? kPostfix : kCat};
    }
    case Kind::kAlternation: {
      std::vector<const ConstraintAst*> rest;
      bool has_epsilon = false;
      for (const auto& c : ast.children) {
        if (c.kind == Kind::kEpsilon) {
          has_epsilon = true;
        } else {
          rest.push_back(&c);
        }
      }
      if (rest.empty()) return {"()", kAtom};
      std::string out;
      for (std::size_t i = 0; i < rest.size(); ++i) {
        if (i > 0) out += "|";
        out += Render(*rest[i]).first;
      }
      Level level = rest.size() == 1 ? Render(*rest[0]).second : kAlt;
      if (!has_epsilon) return {out, level};
      if (level < kPostfix) out = "(" + out + ")";
      return {out + "?", kPostfix};
    }
    case Kind::kStar:
    case Kind::kPlus:
    case Kind::kOptional: {
      auto [s, level] = Render(ast.children.front());
      if (level < kPostfix) s = "(" + s + ")";
      char op = ast.kind == Kind::kStar ? '*' : ast.kind == Kind::kPlus ? '+' : '?';
      return {s + op, kPostfix};
    }
  }
  return {"", kAtom};
}

}  // namespace

ConstraintAst ParseRegex(std::string_view text,
                         const ControlAlphabet& alphabet) {
  return Parser(text, alphabet).Parse();
}

std::string RenderRegex(const ConstraintAst& ast) {
  if (ast.kind == ConstraintAst::Kind::kEpsilon) return "";
  return Render(ast).first;
}

}  // namespace ctrlgen

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

#ifndef CTRLGEN_CORE_ERRORS_H_
#define CTRLGEN_CORE_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ctrlgen {

// Base of every error raised by the library. `code()` is the stable
// machine-readable identifier used on the wire and in CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

#define CTRLGEN_DEFINE_ERROR(Name, code_str)                       \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& message)                      \
        : Error(code_str, message) {}                              \
  };

CTRLGEN_DEFINE_ERROR(DomainError, "domain_error")
CTRLGEN_DEFINE_ERROR(SchemaError, "schema_error")
CTRLGEN_DEFINE_ERROR(NumericalError, "numerical_error")
CTRLGEN_DEFINE_ERROR(GraphError, "graph_error")
CTRLGEN_DEFINE_ERROR(NoFeasibleOutput, "no_feasible_output")
CTRLGEN_DEFINE_ERROR(ConstraintViolation, "constraint_violation")
CTRLGEN_DEFINE_ERROR(AlignmentError, "alignment_error")
CTRLGEN_DEFINE_ERROR(IoError, "io_error")
CTRLGEN_DEFINE_ERROR(FormatError, "format_error")
CTRLGEN_DEFINE_ERROR(CompatibilityError, "compatibility_error")
CTRLGEN_DEFINE_ERROR(IntegrityError, "integrity_error")
CTRLGEN_DEFINE_ERROR(ExportError, "export_error")
CTRLGEN_DEFINE_ERROR(RangeTooLarge, "range_too_large")

#undef CTRLGEN_DEFINE_ERROR

// Errors raised while reading constraint text carry the offending offset.
class PositionedError : public Error {
 public:
  PositionedError(std::string code, const std::string& message,
                  std::size_t position)
      : Error(std::move(code), message + " at position " +
                                   std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class SyntaxError : public PositionedError {
 public:
  SyntaxError(const std::string& message, std::size_t position)
      : PositionedError("syntax_error", message, position) {}
};

class AlphabetError : public PositionedError {
 public:
  AlphabetError(const std::string& message, std::size_t position)
      : PositionedError("alphabet_error", message, position) {}
};

}  // namespace ctrlgen

#endif  // CTRLGEN_CORE_ERRORS_H_

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

// Deployable constrained generators: a checkpoint and a compiled constraint
// packed into one ZIP archive, plus an offline runner over such archives.
#ifndef CTRLGEN_EXPORT_BUNDLE_H_
#define CTRLGEN_EXPORT_BUNDLE_H_

#include <string>
#include <string_view>
#include <vector>

#include "ctrlgen/constraint/dfa.h"
#include "ctrlgen/core/codec.h"
#include "ctrlgen/forecast/forecast.h"
#include "ctrlgen/model/params.h"
#include "ctrlgen/train/evaluate.h"

namespace ctrlgen {

inline constexpr int kBundleFormatVersion = 1;

// Archive members, in archive order.
inline constexpr const char* kManifestMember = "manifest.json";
inline constexpr const char* kModelMember = "model.ckpt";
inline constexpr const char* kDfaMember = "dfa.json";
inline constexpr const char* kVocabMember = "vocab.json";

struct Bundle {
  ModelParams params;
  ConstraintDfa dfa;
  std::string regex;
  int format_version = kBundleFormatVersion;
  // SHA-256 over the manifest body, which lists a SHA-256 per member.
  std::string content_hash;
  Json manifest;
};

// Archive bytes for `params` constrained by `dfa`. `regex` is the source
// text and must compile to a DFA equivalent to `dfa` over the model's
// alphabet. Throws ExportError for an empty language, a regex/DFA mismatch
// or an alphabet that differs from the model's state count.
std::string SerializeBundle(const ModelParams& params, const ConstraintDfa& dfa,
                            const std::string& regex);

// SerializeBundle written to `path`; returns the bundle as a load would.
Bundle ExportBundle(const ModelParams& params, const ConstraintDfa& dfa,
                    const std::string& regex, const std::string& path);

// Throws FormatError for a malformed archive, IntegrityError when a CRC,
// digest or cross-member check fails or the archive bytes differ from what
// SerializeBundle writes for the same members, CompatibilityError for another
// format version.
Bundle ParseBundle(std::string_view bytes);
// ParseBundle on a file; IoError when it cannot be read.
Bundle LoadBundle(const std::string& path);

// Constrained decode of each table with the bundle's DFA. Infeasible tables
// stay in the output with an empty result.
std::vector<ForecastTuple> RunBundle(const Bundle& bundle,
                                     std::vector<DataTable> tables,
                                     const ForecastOptions& options);

// Evaluate() with the bundle's model and DFA.
EvalMetrics RunBundleEval(const Bundle& bundle, const std::vector<Example>& dataset,
                          const DecodeOptions& options);

}  // namespace ctrlgen

#endif  // CTRLGEN_EXPORT_BUNDLE_H_

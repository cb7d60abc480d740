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

#include "ctrlgen/export/bundle.h"

#include <map>

#include "ctrlgen/constraint/regex.h"
#include "ctrlgen/core/errors.h"
#include "ctrlgen/core/hash.h"
#include "ctrlgen/export/zip.h"
#include "ctrlgen/model/checkpoint.h"

namespace ctrlgen {
namespace {

Json ConfigToJson(const ModelConfig& c) {
  return Json{{"embed_dim", c.embed_dim},
              {"hidden_dim", c.hidden_dim},
              {"num_states", c.num_states},
              {"crf_embed_dim", c.crf_embed_dim},
              {"crf_hidden_dim", c.crf_hidden_dim},
              {"copy", c.copy}};
}

Json VocabToJson(const ModelParams& p) {
  return Json{{"words", p.words().tokens()},
              {"fields", p.fields().symbols()},
              {"values", p.values().tokens()}};
}

// Body is the manifest without its content_hash entry.
std::string ContentHash(const Json& manifest) {
  Json body = manifest;
  body.erase("content_hash");
  return Sha256Hex(body.dump());
}

ConstraintDfa CompileFor(const std::string& regex, int num_states) {
  return Compile(ParseRegex(regex, ControlAlphabet(num_states)), num_states);
}

template <typename T>
T Field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw FormatError(std::string("bundle manifest lacks '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw FormatError(std::string("bundle manifest field '") + key +
                      "' has the wrong type");
  }
}

}  // namespace

std::string SerializeBundle(const ModelParams& params, const ConstraintDfa& dfa,
                            const std::string& regex) {
  if (dfa.alphabet_size() != params.num_states()) {
    throw ExportError("constraint alphabet has " + std::to_string(dfa.alphabet_size()) +
                      " states but the model has " +
                      std::to_string(params.num_states()));
  }
  if (dfa.LanguageEmpty()) {
    throw ExportError("constraint '" + regex + "' accepts no state sequence");
  }
  ConstraintDfa compiled;
  try {
    compiled = CompileFor(regex, params.num_states());
  } catch (const Error& e) {
    throw ExportError("constraint '" + regex + "' does not compile: " + e.what());
  }
  if (!DfaEquivalent(compiled, dfa)) {
    throw ExportError("automaton does not match constraint '" + regex + "'");
  }

  std::vector<ZipMember> members = {
      {kManifestMember, ""},
      {kModelMember, SerializeCheckpoint(params)},
      {kDfaMember, DfaToJson(dfa).dump()},
      {kVocabMember, VocabToJson(params).dump()},
  };
  Json digests = Json::object();
  for (std::size_t i = 1; i < members.size(); ++i) {
    digests[members[i].name] = Sha256Hex(members[i].data);
  }
  Json manifest = {{"format_version", kBundleFormatVersion},
                   {"regex", regex},
                   {"alphabet_size", params.num_states()},
                   {"vocab_hash", params.VocabHash()},
                   {"config", ConfigToJson(params.config())},
                   {"members", digests}};
  manifest["content_hash"] = ContentHash(manifest);
  members[0].data = manifest.dump(2);
  return WriteStoredZip(members);
}

Bundle ExportBundle(const ModelParams& params, const ConstraintDfa& dfa,
                    const std::string& regex, const std::string& path) {
  std::string bytes = SerializeBundle(params, dfa, regex);
  WriteFileBytes(path, bytes);
  return ParseBundle(bytes);
}

Bundle ParseBundle(std::string_view bytes) {
  std::vector<ZipMember> listed = ReadStoredZip(bytes);
  // Header fields outside the CRCs (timestamps, attributes) are pinned by
  // requiring the exact bytes the writer produces.
  if (WriteStoredZip(listed) != bytes) {
    throw IntegrityError("bundle archive is not in canonical form");
  }
  std::map<std::string, std::string> members;
  for (ZipMember& m : listed) members[m.name] = std::move(m.data);
  for (const char* name : {kManifestMember, kModelMember, kDfaMember, kVocabMember}) {
    if (!members.count(name)) {
      throw FormatError(std::string("bundle lacks member '") + name + "'");
    }
  }
  if (members.size() != 4) throw FormatError("bundle has unexpected members");

  Json manifest;
  try {
    manifest = Json::parse(members[kManifestMember]);
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bundle manifest is not JSON: ") + e.what());
  }
  int version = Field<int>(manifest, "format_version");
  if (version != kBundleFormatVersion) {
    throw CompatibilityError("bundle format version " + std::to_string(version) +
                             ", this build reads " +
                             std::to_string(kBundleFormatVersion));
  }
  std::string content_hash = Field<std::string>(manifest, "content_hash");
  if (ContentHash(manifest) != content_hash) {
    throw IntegrityError("bundle manifest does not match its content hash");
  }
  Json digests = Field<Json>(manifest, "members");
  for (const char* name : {kModelMember, kDfaMember, kVocabMember}) {
    if (Field<std::string>(digests, name) != Sha256Hex(members[name])) {
      throw IntegrityError(std::string("bundle member '") + name +
                           "' does not match its digest");
    }
  }

  Bundle b;
  b.format_version = version;
  b.content_hash = content_hash;
  b.regex = Field<std::string>(manifest, "regex");
  b.params = DeserializeCheckpoint(members[kModelMember]);
  try {
    b.dfa = DfaFromJson(Json::parse(members[kDfaMember]));
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bundle dfa.json is not JSON: ") + e.what());
  }

  // Cross-member checks; the digests already pin the bytes, so a failure
  // here means the bundle was assembled inconsistently.
  if (Field<int>(manifest, "alphabet_size") != b.params.num_states() ||
      b.dfa.alphabet_size() != b.params.num_states()) {
    throw IntegrityError("bundle alphabet size disagrees with the model");
  }
  if (Field<std::string>(manifest, "vocab_hash") != b.params.VocabHash() ||
      Json::parse(members[kVocabMember]) != VocabToJson(b.params)) {
    throw IntegrityError("bundle vocabulary disagrees with the model");
  }
  if (Field<Json>(manifest, "config") != ConfigToJson(b.params.config())) {
    throw IntegrityError("bundle config disagrees with the model");
  }
  if (!DfaEquivalent(CompileFor(b.regex, b.params.num_states()), b.dfa)) {
    throw IntegrityError("bundle automaton does not match its regex");
  }
  b.manifest = std::move(manifest);
  return b;
}

Bundle LoadBundle(const std::string& path) { return ParseBundle(ReadFileBytes(path)); }

std::vector<ForecastTuple> RunBundle(const Bundle& bundle,
                                     std::vector<DataTable> tables,
                                     const ForecastOptions& options) {
  return DecodeTables(bundle.params, &bundle.dfa, std::move(tables), options);
}

EvalMetrics RunBundleEval(const Bundle& bundle, const std::vector<Example>& dataset,
                          const DecodeOptions& options) {
  return Evaluate(bundle.params, dataset, &bundle.dfa, options);
}

}  // namespace ctrlgen

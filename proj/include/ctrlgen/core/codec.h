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

#ifndef CTRLGEN_CORE_CODEC_H_
#define CTRLGEN_CORE_CODEC_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "ctrlgen/core/types.h"

namespace ctrlgen {

using Json = nlohmann::ordered_json;

// Canonical encodings:
//   DataTable       {"fields":[["name","the phoenix"],...]} (+ "schema")
//   ControlStateSeq "FFJKECT"
//   Example         {"table":...,"text":"...","states":"..."}
// Decoders throw FormatError on malformed input.
Json TableToJson(const DataTable& table);
DataTable TableFromJson(const Json& j);

Json StatesToJson(const ControlStateSeq& states);
ControlStateSeq StatesFromJson(const Json& j);

Json ExampleToJson(const Example& example);
Example ExampleFromJson(const Json& j);

// JSON-lines datasets, one Example per line.
std::vector<Example> ReadExamplesJsonl(const std::string& path);
void WriteExamplesJsonl(const std::string& path,
                        const std::vector<Example>& examples);

std::string ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, const std::string& bytes);

}  // namespace ctrlgen

#endif  // CTRLGEN_CORE_CODEC_H_

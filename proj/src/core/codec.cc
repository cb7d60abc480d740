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

#include "ctrlgen/core/codec.h"

#include <fstream>
#include <sstream>

#include "ctrlgen/core/errors.h"
#include "ctrlgen/core/tokenize.h"

namespace ctrlgen {

Json TableToJson(const DataTable& table) {
  Json fields = Json::array();
  for (const auto& [name, value] : table.entries()) {
    fields.push_back(Json::array({name, value}));
  }
  Json j;
  j["fields"] = std::move(fields);
  if (!table.schema_id().empty()) j["schema"] = table.schema_id();
  return j;
}

DataTable TableFromJson(const Json& j) {
  if (!j.is_object() || !j.contains("fields") || !j["fields"].is_array()) {
    throw FormatError("table must be an object with a \"fields\" array");
  }
  std::vector<DataTable::Entry> entries;
  for (const auto& f : j["fields"]) {
    if (!f.is_array() || f.size() != 2 || !f[0].is_string() ||
        !f[1].is_string()) {
      throw FormatError("table field must be a [name, value] string pair");
    }
    entries.emplace_back(f[0].get<std::string>(), f[1].get<std::string>());
  }
  std::string schema;
  if (j.contains("schema")) {
    if (!j["schema"].is_string()) throw FormatError("schema must be a string");
    schema = j["schema"].get<std::string>();
  }
  return DataTable(std::move(entries), std::move(schema));
}

Json StatesToJson(const ControlStateSeq& states) { return states.ToLetters(); }

ControlStateSeq StatesFromJson(const Json& j) {
  if (!j.is_string()) throw FormatError("states must be a letter string");
  try {
    return ControlStateSeq::FromLetters(j.get<std::string>());
  } catch (const DomainError& e) {
    throw FormatError(e.what());
  }
}

Json ExampleToJson(const Example& example) {
  Json j;
  j["table"] = TableToJson(example.table);
  j["text"] = Detokenize(example.tokens);
  if (example.states) j["states"] = StatesToJson(*example.states);
  return j;
}

Example ExampleFromJson(const Json& j) {
  if (!j.is_object() || !j.contains("table") || !j.contains("text") ||
      !j["text"].is_string()) {
    throw FormatError("example must have \"table\" and \"text\"");
  }
  Example ex;
  ex.table = TableFromJson(j["table"]);
  ex.tokens = Tokenize(j["text"].get<std::string>());
  if (j.contains("states")) ex.states = StatesFromJson(j["states"]);
  try {
    ex.Validate();
  } catch (const DomainError& e) {
    throw FormatError(e.what());
  }
  return ex;
}

std::vector<Example> ReadExamplesJsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<Example> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(ExampleFromJson(Json::parse(line)));
    } catch (const Json::exception& e) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": " +
                        e.what());
    } catch (const Error& e) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
  return out;
}

void WriteExamplesJsonl(const std::string& path,
                        const std::vector<Example>& examples) {
  std::ostringstream out;
  for (const auto& ex : examples) out << ExampleToJson(ex).dump() << '\n';
  WriteFileBytes(path, out.str());
}

std::string ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFileBytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to '" + path + "'");
}

}  // namespace ctrlgen

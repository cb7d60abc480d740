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

#include "ctrlgen/model/checkpoint.h"

#include <bit>
#include <cstdint>
#include <cstring>

#include "ctrlgen/core/codec.h"
#include "ctrlgen/core/errors.h"
#include "ctrlgen/core/hash.h"

namespace ctrlgen {
namespace {

constexpr std::string_view kMagic = "CGCKPT01";

void PutU64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t GetU64(std::string_view in) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) {
    v = (v << 8) | static_cast<unsigned char>(in[i]);
  }
  return v;
}

void PutF32(std::string& out, double value) {
  auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(value));
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

double GetF32(const char* p) {
  std::uint32_t bits = 0;
  for (int i = 3; i >= 0; --i) bits = (bits << 8) | static_cast<unsigned char>(p[i]);
  return static_cast<double>(std::bit_cast<float>(bits));
}

Json ConfigToJson(const ModelConfig& c) {
  Json j;
  j["embed_dim"] = c.embed_dim;
  j["hidden_dim"] = c.hidden_dim;
  j["num_states"] = c.num_states;
  j["crf_embed_dim"] = c.crf_embed_dim;
  j["crf_hidden_dim"] = c.crf_hidden_dim;
  j["copy"] = c.copy;
  return j;
}

ModelConfig ConfigFromJson(const Json& j) {
  ModelConfig c;
  c.embed_dim = j.at("embed_dim").get<int>();
  c.hidden_dim = j.at("hidden_dim").get<int>();
  c.num_states = j.at("num_states").get<int>();
  c.crf_embed_dim = j.at("crf_embed_dim").get<int>();
  c.crf_hidden_dim = j.at("crf_hidden_dim").get<int>();
  c.copy = j.at("copy").get<bool>();
  return c;
}

}  // namespace

std::string SerializeCheckpoint(const ModelParams& params) {
  std::string blob;
  blob.reserve(params.NumScalars() * 4);
  Json tensors = Json::array();
  for (int i = 0; i < kNumTensors; ++i) {
    const Mat& m = params.tensors()[i];
    for (Eigen::Index k = 0; k < m.size(); ++k) PutF32(blob, m.data()[k]);
    Json t;
    t["name"] = TensorName(static_cast<Tensor>(i));
    t["rows"] = m.rows();
    t["cols"] = m.cols();
    tensors.push_back(std::move(t));
  }
  Json header;
  header["format_version"] = kCheckpointVersion;
  header["config"] = ConfigToJson(params.config());
  header["words"] = params.words().tokens();
  header["fields"] = params.fields().symbols();
  header["values"] = params.values().tokens();
  header["vocab_hash"] = params.VocabHash();
  header["tensors"] = std::move(tensors);
  header["blob_bytes"] = blob.size();
  header["blob_sha256"] = Sha256Hex(blob);
  std::string text = header.dump();

  std::string out(kMagic);
  PutU64(out, text.size());
  out += text;
  out += blob;
  return out;
}

ModelParams DeserializeCheckpoint(std::string_view bytes) {
  if (bytes.size() < kMagic.size() + 8 || bytes.substr(0, kMagic.size()) != kMagic) {
    throw FormatError("not a checkpoint (bad magic)");
  }
  std::uint64_t header_len = GetU64(bytes.substr(kMagic.size(), 8));
  std::size_t header_at = kMagic.size() + 8;
  if (header_len > bytes.size() - header_at) {
    throw FormatError("checkpoint header truncated");
  }
  Json header;
  try {
    header = Json::parse(bytes.substr(header_at, header_len));
  } catch (const Json::exception& e) {
    throw FormatError(std::string("checkpoint header is not JSON: ") + e.what());
  }
  std::string_view blob = bytes.substr(header_at + header_len);

  try {
    int version = header.at("format_version").get<int>();
    if (version != kCheckpointVersion) {
      throw CompatibilityError("checkpoint format version " +
                               std::to_string(version) + ", expected " +
                               std::to_string(kCheckpointVersion));
    }
    ModelConfig config = ConfigFromJson(header.at("config"));
    Vocabulary words = Vocabulary::FromTokens(
        header.at("words").get<std::vector<std::string>>());
    SymbolTable fields(header.at("fields").get<std::vector<std::string>>());
    Vocabulary values = Vocabulary::FromTokens(
        header.at("values").get<std::vector<std::string>>());
    ModelParams params(config, std::move(words), std::move(fields),
                       std::move(values));
    if (params.VocabHash() != header.at("vocab_hash").get<std::string>()) {
      throw CompatibilityError("checkpoint vocabulary hash mismatch");
    }
    const Json& tensors = header.at("tensors");
    auto shapes = params.Shapes();
    if (tensors.size() != shapes.size()) {
      throw CompatibilityError("checkpoint has " +
                               std::to_string(tensors.size()) +
                               " tensors, expected " +
                               std::to_string(shapes.size()));
    }
    for (std::size_t i = 0; i < shapes.size(); ++i) {
      const Json& t = tensors[i];
      if (t.at("name").get<std::string>() != TensorName(static_cast<Tensor>(i)) ||
          t.at("rows").get<int>() != shapes[i].first ||
          t.at("cols").get<int>() != shapes[i].second) {
        throw CompatibilityError(std::string("tensor ") +
                                 TensorName(static_cast<Tensor>(i)) +
                                 " does not match the declared dimensions");
      }
    }
    if (blob.size() != header.at("blob_bytes").get<std::size_t>() ||
        blob.size() != params.NumScalars() * 4) {
      throw FormatError("checkpoint weight blob has the wrong size");
    }
    if (Sha256Hex(blob) != header.at("blob_sha256").get<std::string>()) {
      throw IntegrityError("checkpoint weight blob digest mismatch");
    }
    const char* p = blob.data();
    for (auto& m : params.tensors()) {
      for (Eigen::Index k = 0; k < m.size(); ++k, p += 4) m.data()[k] = GetF32(p);
    }
    if (!params.AllFinite()) throw IntegrityError("checkpoint has non-finite weights");
    return params;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed checkpoint header: ") + e.what());
  }
}

void SaveCheckpoint(const ModelParams& params, const std::string& path) {
  WriteFileBytes(path, SerializeCheckpoint(params));
}

ModelParams LoadCheckpoint(const std::string& path) {
  return DeserializeCheckpoint(ReadFileBytes(path));
}

}  // namespace ctrlgen

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

#include "ctrlgen/model/params.h"

#include <cmath>
#include <limits>

#include "ctrlgen/core/errors.h"
#include "ctrlgen/core/hash.h"
#include "ctrlgen/core/random.h"

namespace ctrlgen {

const char* TensorName(Tensor t) {
  static const char* const kNames[kNumTensors] = {
      "field_emb",   "value_emb",   "cell_w",      "cell_b",
      "init_w",      "init_b",      "word_emb",    "state_emb",
      "gru_wx",      "gru_wh",      "gru_bx",      "gru_bh",
      "state_w",     "state_b",     "state_g",     "word_w",
      "word_b",      "copy_w",      "copy_b",      "crf_emb",
      "crf_fwd_wx",  "crf_fwd_wh",  "crf_fwd_bx",  "crf_fwd_bh",
      "crf_bwd_wx",  "crf_bwd_wh",  "crf_bwd_bx",  "crf_bwd_bh",
      "crf_emit_w",  "crf_emit_b",  "crf_trans",
  };
  return kNames[static_cast<int>(t)];
}

bool IsBias(Tensor t) {
  switch (t) {
    case Tensor::kCellB:
    case Tensor::kInitB:
    case Tensor::kGruBx:
    case Tensor::kGruBh:
    case Tensor::kStateB:
    case Tensor::kWordB:
    case Tensor::kCopyB:
    case Tensor::kCrfFwdBx:
    case Tensor::kCrfFwdBh:
    case Tensor::kCrfBwdBx:
    case Tensor::kCrfBwdBh:
    case Tensor::kCrfEmitB:
      return true;
    default:
      return false;
  }
}

ModelParams::ModelParams(ModelConfig config, Vocabulary words,
                         SymbolTable fields, Vocabulary values)
    : config_(config),
      words_(std::move(words)),
      fields_(std::move(fields)),
      values_(std::move(values)) {
  if (config_.embed_dim < 1 || config_.hidden_dim < 1 ||
      config_.crf_embed_dim < 1 || config_.crf_hidden_dim < 1) {
    throw DomainError("model dimensions must be positive");
  }
  if (config_.num_states < 1 || config_.num_states > 26) {
    throw DomainError("number of control states must be in 1..26");
  }
  if (fields_.size() == 0) throw DomainError("model needs at least one field");
  for (const auto& [rows, cols] : Shapes()) tensors_.push_back(Mat::Zero(rows, cols));
  word_mask_ = Vec::Zero(words_.size());
  word_mask_(Vocabulary::kBos) = -std::numeric_limits<double>::infinity();
  word_mask_(Vocabulary::kEos) = -std::numeric_limits<double>::infinity();
}

ModelParams ModelParams::Initialize(ModelConfig config, Vocabulary words,
                                    SymbolTable fields, Vocabulary values,
                                    std::uint64_t seed) {
  ModelParams p(config, std::move(words), std::move(fields), std::move(values));
  Rng rng(seed);
  for (int i = 0; i < kNumTensors; ++i) {
    if (IsBias(static_cast<Tensor>(i))) continue;
    Mat& m = p.tensors_[i];
    // Column-major fill order, matching the checkpoint layout.
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      m.data()[k] = rng.Uniform(-0.08, 0.08);
    }
  }
  p.RoundToFloat();
  return p;
}

std::vector<std::pair<int, int>> ModelParams::Shapes() const {
  const int e = config_.embed_dim, h = config_.hidden_dim,
            k = config_.num_states, v = words_.size(), f = fields_.size(),
            u = values_.size(), c = config_.crf_embed_dim,
            r = config_.crf_hidden_dim;
  return {
      {e, f},         {e, u},     {h, 2 * e},     {h, 1},
      {h, h},         {h, 1},     {e, v},         {e, k + 1},
      {3 * h, 2 * e + h}, {3 * h, h}, {3 * h, 1}, {3 * h, 1},
      {k + 1, 2 * h}, {k + 1, 1}, {2 * h, k + 1}, {v, 2 * h},
      {v, 1},         {1, 2 * h}, {1, 1},         {c, v},
      {3 * r, c},     {3 * r, r}, {3 * r, 1},     {3 * r, 1},
      {3 * r, c},     {3 * r, r}, {3 * r, 1},     {3 * r, 1},
      {k, 2 * r + f}, {k, 1},     {k, k},
  };
}

std::size_t ModelParams::NumScalars() const {
  std::size_t n = 0;
  for (const auto& m : tensors_) n += static_cast<std::size_t>(m.size());
  return n;
}

bool ModelParams::AllFinite() const {
  for (const auto& m : tensors_) {
    if (!m.allFinite()) return false;
  }
  return true;
}

void ModelParams::RoundToFloat() {
  for (auto& m : tensors_) {
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      m.data()[k] = static_cast<double>(static_cast<float>(m.data()[k]));
    }
  }
}

std::vector<Mat> ModelParams::ZerosLike() const {
  std::vector<Mat> out;
  out.reserve(tensors_.size());
  for (const auto& m : tensors_) out.push_back(Mat::Zero(m.rows(), m.cols()));
  return out;
}

std::string ModelParams::VocabHash() const {
  std::vector<std::string> items = {"#words"};
  items.insert(items.end(), words_.tokens().begin(), words_.tokens().end());
  items.push_back("#fields");
  items.insert(items.end(), fields_.symbols().begin(), fields_.symbols().end());
  items.push_back("#values");
  items.insert(items.end(), values_.tokens().begin(), values_.tokens().end());
  return ToHex(Fnv1a64(items));
}

bool operator==(const ModelParams& a, const ModelParams& b) {
  if (!(a.config_ == b.config_) || !(a.words_ == b.words_) ||
      !(a.fields_ == b.fields_) || !(a.values_ == b.values_) ||
      a.tensors_.size() != b.tensors_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.tensors_.size(); ++i) {
    if (a.tensors_[i].rows() != b.tensors_[i].rows() ||
        a.tensors_[i].cols() != b.tensors_[i].cols() ||
        a.tensors_[i] != b.tensors_[i]) {
      return false;
    }
  }
  return true;
}

}  // namespace ctrlgen

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

#ifndef CTRLGEN_MODEL_PARAMS_H_
#define CTRLGEN_MODEL_PARAMS_H_

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "ctrlgen/core/vocabulary.h"

namespace ctrlgen {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct ModelConfig {
  int embed_dim = 64;
  int hidden_dim = 64;
  int num_states = 10;  // K, the user-visible control alphabet
  int crf_embed_dim = 32;
  int crf_hidden_dim = 32;  // per direction
  bool copy = false;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Tensor order is also the checkpoint blob order. E = embed_dim,
// H = hidden_dim, K = num_states, V = |words|, F = |fields|, U = |values|,
// C = crf_embed_dim, R = crf_hidden_dim.
enum class Tensor : int {
  kFieldEmb,   // E x F
  kValueEmb,   // E x U
  kCellW,      // H x 2E
  kCellB,      // H x 1
  kInitW,      // H x H
  kInitB,      // H x 1
  kWordEmb,    // E x V
  kStateEmb,   // E x (K+1)
  kGruWx,      // 3H x (2E+H), gate rows ordered reset, update, candidate
  kGruWh,      // 3H x H
  kGruBx,      // 3H x 1
  kGruBh,      // 3H x 1
  kStateW,     // (K+1) x 2H, row K is the terminal state
  kStateB,     // (K+1) x 1
  kStateG,     // 2H x (K+1), columns are g(z)
  kWordW,      // V x 2H
  kWordB,      // V x 1
  kCopyW,      // 1 x 2H
  kCopyB,      // 1 x 1
  kCrfEmb,     // C x V
  kCrfFwdWx,   // 3R x C
  kCrfFwdWh,   // 3R x R
  kCrfFwdBx,   // 3R x 1
  kCrfFwdBh,   // 3R x 1
  kCrfBwdWx,   // 3R x C
  kCrfBwdWh,   // 3R x R
  kCrfBwdBx,   // 3R x 1
  kCrfBwdBh,   // 3R x 1
  kCrfEmitW,   // K x (2R+F)
  kCrfEmitB,   // K x 1
  kCrfTrans,   // K x K, [previous, next]
  kCount,
};

inline constexpr int kNumTensors = static_cast<int>(Tensor::kCount);

const char* TensorName(Tensor t);
bool IsBias(Tensor t);

// All learned tensors of the joint model and the CRF inference network,
// together with the symbol tables they index.
class ModelParams {
 public:
  ModelParams() = default;
  // Zero-filled tensors of the shapes implied by the config and tables.
  ModelParams(ModelConfig config, Vocabulary words, SymbolTable fields,
              Vocabulary values);

  // Weights uniform in [-0.08, 0.08] (rounded to float), biases zero.
  static ModelParams Initialize(ModelConfig config, Vocabulary words,
                                SymbolTable fields, Vocabulary values,
                                std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const Vocabulary& words() const { return words_; }
  const SymbolTable& fields() const { return fields_; }
  const Vocabulary& values() const { return values_; }
  int num_states() const { return config_.num_states; }
  // Index of the terminal state that emits EOS.
  int terminal_state() const { return config_.num_states; }

  Mat& operator[](Tensor t) { return tensors_[static_cast<int>(t)]; }
  const Mat& operator[](Tensor t) const { return tensors_[static_cast<int>(t)]; }
  std::vector<Mat>& tensors() { return tensors_; }
  const std::vector<Mat>& tensors() const { return tensors_; }

  // Expected (rows, cols) per tensor.
  std::vector<std::pair<int, int>> Shapes() const;
  std::size_t NumScalars() const;
  bool AllFinite() const;
  void RoundToFloat();
  // Zero tensors of identical shapes, e.g. for gradient accumulation.
  std::vector<Mat> ZerosLike() const;
  // FNV-1a over words, fields and values, as 16 hex digits.
  std::string VocabHash() const;
  // Additive word mask: -inf for BOS and EOS, 0 elsewhere.
  const Vec& word_mask() const { return word_mask_; }

  friend bool operator==(const ModelParams& a, const ModelParams& b);

 private:
  ModelConfig config_;
  Vocabulary words_;
  SymbolTable fields_;
  Vocabulary values_;
  std::vector<Mat> tensors_;
  Vec word_mask_;
};

}  // namespace ctrlgen

#endif  // CTRLGEN_MODEL_PARAMS_H_

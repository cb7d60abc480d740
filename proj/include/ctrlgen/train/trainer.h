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

#ifndef CTRLGEN_TRAIN_TRAINER_H_
#define CTRLGEN_TRAIN_TRAINER_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "ctrlgen/core/codec.h"
#include "ctrlgen/core/types.h"
#include "ctrlgen/model/params.h"

namespace ctrlgen {

struct TrainConfig {
  int epochs = 20;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double clip_norm = 5.0;
  std::uint64_t seed = 0;
  // Words seen fewer times in the training set map to UNK.
  int min_count = 1;
  ModelConfig model;

  // Throws DomainError on non-positive sizes or rates out of range. A zero
  // learning rate is allowed.
  void Validate() const;
};

// Missing keys keep their defaults; unknown keys are rejected with
// SchemaError.
Json TrainConfigToJson(const TrainConfig& config);
TrainConfig TrainConfigFromJson(const Json& j);

struct EpochReport {
  int epoch = 0;  // 1-based
  double joint_nll = 0.0;  // mean per training example
  double crf_nll = 0.0;
  double dev_token_accuracy = 0.0;
  double dev_state_accuracy = 0.0;
};

struct TrainReport {
  std::vector<EpochReport> epochs;
  int best_epoch = 0;  // 0 when the initial parameters were never beaten
};

Json TrainReportToJson(const TrainReport& report);

struct TrainResult {
  ModelParams params;
  TrainReport report;
};

enum class LossKind { kTotal, kJoint, kCrf };

struct LossParts {
  double joint = 0.0;
  double crf = 0.0;
  double total() const { return joint + crf; }
};

// -log p(y, z | x) and -log q(z | x, y) for one gold-labelled example. When
// `grads` is set the gradient of the selected loss is added into it.
LossParts ExampleLoss(const ModelParams& params, const Example& example,
                      LossKind kind, std::vector<Mat>* grads);

// Scales `grads` in place so their global L2 norm is at most max_norm.
// Returns the norm before scaling.
double ClipGradients(std::vector<Mat>& grads, double max_norm);

// Adaptive-moment optimizer with bias correction.
class Adam {
 public:
  Adam(const ModelParams& params, const TrainConfig& config);
  void Step(ModelParams& params, const std::vector<Mat>& grads);
  int steps() const { return step_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  int step_ = 0;
  std::vector<Mat> m_, v_;
};

struct TeacherForcedMetrics {
  // Argmax word under gold history and gold state equals the reference.
  double token_accuracy = 0.0;
  // Viterbi states of the inference network equal the gold states.
  double state_accuracy = 0.0;
};

TeacherForcedMetrics EvaluateTeacherForced(const ModelParams& params,
                                           const std::vector<Example>& dev);

using EpochCallback = std::function<void(const EpochReport&)>;

// Builds vocabularies from `train`, initializes from config.seed and trains.
// Returns the parameters of the epoch with the best dev token + state
// accuracy, rounded to float precision.
TrainResult Train(const TrainConfig& config, const std::vector<Example>& train,
                  const std::vector<Example>& dev,
                  const EpochCallback& on_epoch = nullptr);

// Same loop from given initial parameters.
TrainResult TrainFrom(ModelParams init, const TrainConfig& config,
                      const std::vector<Example>& train,
                      const std::vector<Example>& dev,
                      const EpochCallback& on_epoch = nullptr);

}  // namespace ctrlgen

#endif  // CTRLGEN_TRAIN_TRAINER_H_

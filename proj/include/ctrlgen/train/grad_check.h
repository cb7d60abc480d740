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

// Central finite-difference check of analytic gradients.
#ifndef CTRLGEN_TRAIN_GRAD_CHECK_H_
#define CTRLGEN_TRAIN_GRAD_CHECK_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ctrlgen/model/params.h"
#include "ctrlgen/train/trainer.h"

namespace ctrlgen {

struct GradCheckResult {
  double max_relative_error = 0.0;
  int coordinates = 0;
  // Location of the worst coordinate.
  int tensor = -1;
  int index = -1;
  double analytic = 0.0;
  double numeric = 0.0;
};

// |a - n| / max(|a|, |n|, floor). The floor keeps coordinates whose true
// gradient is at rounding level from dominating.
double RelativeError(double analytic, double numeric, double floor = 1e-4);

// Loss at `point`, adding its gradient into `grad` when non-null.
using LossFunction =
    std::function<double(const std::vector<Mat>& point, std::vector<Mat>* grad)>;

// Compares `loss`'s analytic gradient with central differences on
// `coordinates` coordinates drawn without replacement from those with a
// non-zero analytic gradient (all coordinates when fewer exist).
GradCheckResult GradCheck(const std::vector<Mat>& point, const LossFunction& loss,
                          double epsilon, int coordinates, std::uint64_t seed);

// The model's loss on one example as a function of all its tensors.
GradCheckResult GradCheckExample(const ModelParams& params, const Example& example,
                                 LossKind kind, double epsilon,
                                 int coordinates = 200, std::uint64_t seed = 0);

}  // namespace ctrlgen

#endif  // CTRLGEN_TRAIN_GRAD_CHECK_H_

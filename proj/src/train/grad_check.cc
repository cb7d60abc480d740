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

#include "ctrlgen/train/grad_check.h"

#include <algorithm>
#include <cmath>

#include "ctrlgen/core/errors.h"
#include "ctrlgen/core/random.h"

namespace ctrlgen {

double RelativeError(double analytic, double numeric, double floor) {
  double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

GradCheckResult GradCheck(const std::vector<Mat>& point, const LossFunction& loss,
                          double epsilon, int coordinates, std::uint64_t seed) {
  if (!(epsilon > 0)) throw DomainError("finite-difference step must be > 0");
  std::vector<Mat> grad;
  for (const Mat& m : point) grad.push_back(Mat::Zero(m.rows(), m.cols()));
  loss(point, &grad);

  std::vector<std::pair<int, int>> active, all;
  for (int t = 0; t < static_cast<int>(grad.size()); ++t) {
    for (int i = 0; i < static_cast<int>(grad[t].size()); ++i) {
      all.emplace_back(t, i);
      if (grad[t].data()[i] != 0.0) active.emplace_back(t, i);
    }
  }
  std::vector<std::pair<int, int>>& pool =
      static_cast<int>(active.size()) >= coordinates ? active : all;
  Rng rng(seed);
  rng.Shuffle(pool);
  if (static_cast<int>(pool.size()) > coordinates) pool.resize(coordinates);

  GradCheckResult result;
  std::vector<Mat> probe = point;
  for (const auto& [t, i] : pool) {
    double& x = probe[t].data()[i];
    const double saved = x;
    x = saved + epsilon;
    double up = loss(probe, nullptr);
    x = saved - epsilon;
    double down = loss(probe, nullptr);
    x = saved;
    double numeric = (up - down) / (2.0 * epsilon);
    double analytic = grad[t].data()[i];
    double err = RelativeError(analytic, numeric);
    ++result.coordinates;
    if (err >= result.max_relative_error) {
      result.max_relative_error = err;
      result.tensor = t;
      result.index = i;
      result.analytic = analytic;
      result.numeric = numeric;
    }
  }
  return result;
}

GradCheckResult GradCheckExample(const ModelParams& params, const Example& example,
                                 LossKind kind, double epsilon, int coordinates,
                                 std::uint64_t seed) {
  ModelParams work = params;
  LossFunction loss = [&](const std::vector<Mat>& point, std::vector<Mat>* grad) {
    work.tensors() = point;
    LossParts parts = ExampleLoss(work, example, kind, grad);
    return kind == LossKind::kJoint ? parts.joint
           : kind == LossKind::kCrf ? parts.crf
                                    : parts.total();
  };
  return GradCheck(params.tensors(), loss, epsilon, coordinates, seed);
}

}  // namespace ctrlgen

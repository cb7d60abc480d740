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

#include <gtest/gtest.h>

#include <cmath>

#include "ctrlgen/constraint/regex.h"
#include "ctrlgen/core/errors.h"
#include "ctrlgen/core/vocabulary.h"
#include "ctrlgen/data/dates.h"
#include "ctrlgen/model/checkpoint.h"
#include "ctrlgen/train/evaluate.h"
#include "ctrlgen/train/grad_check.h"
#include "ctrlgen/train/trainer.h"

namespace ctrlgen {
namespace {

TrainConfig SmallConfig() {
  TrainConfig c;
  c.epochs = 2;
  c.batch_size = 8;
  c.learning_rate = 1e-2;
  c.model.embed_dim = 8;
  c.model.hidden_dim = 8;
  c.model.crf_embed_dim = 6;
  c.model.crf_hidden_dim = 5;
  return c;
}

ModelParams InitFor(const TrainConfig& c, const std::vector<Example>& data) {
  return ModelParams::Initialize(c.model, BuildVocab(data, 1), BuildFieldTable(data),
                                 BuildValueVocab(data), c.seed);
}

TEST(TrainConfigTest, JsonRoundTripAndValidation) {
  TrainConfig c = SmallConfig();
  c.seed = 42;
  c.model.copy = true;
  TrainConfig back = TrainConfigFromJson(TrainConfigToJson(c));
  EXPECT_EQ(TrainConfigToJson(back), TrainConfigToJson(c));
  EXPECT_EQ(TrainConfigFromJson(Json::object()).epochs, 20);
  EXPECT_THROW(TrainConfigFromJson(Json{{"epochs", 0}}), DomainError);
  EXPECT_THROW(TrainConfigFromJson(Json{{"epoch", 3}}), SchemaError);
  EXPECT_THROW(TrainConfigFromJson(Json{{"epochs", "x"}}), SchemaError);
  EXPECT_THROW(TrainConfigFromJson(Json::array()), SchemaError);
}

TEST(GradCheckTest, LinearFunctionIsExact) {
  Mat c = Mat::Random(4, 3);
  std::vector<Mat> point = {Mat::Random(4, 3)};
  LossFunction loss = [&](const std::vector<Mat>& p, std::vector<Mat>* g) {
    if (g) (*g)[0] += c;
    return (p[0].array() * c.array()).sum() + 0.5;
  };
  GradCheckResult r = GradCheck(point, loss, 1e-5, 12, 0);
  EXPECT_EQ(r.coordinates, 12);
  EXPECT_LE(r.max_relative_error, 1e-9);
}

TEST(GradCheckTest, DetectsWrongGradient) {
  std::vector<Mat> point = {Mat::Constant(2, 2, 0.3)};
  LossFunction loss = [&](const std::vector<Mat>& p, std::vector<Mat>* g) {
    if (g) (*g)[0] += 2.2 * p[0];  // should be 2 * p
    return p[0].squaredNorm();
  };
  EXPECT_GT(GradCheck(point, loss, 1e-5, 4, 0).max_relative_error, 0.05);
}

TEST(GradCheckTest, RelativeErrorFloor) {
  EXPECT_NEAR(RelativeError(1.0, 1.1), 0.1 / 1.1, 1e-15);
  EXPECT_DOUBLE_EQ(RelativeError(0.0, 1e-9), 1e-5);
  EXPECT_DOUBLE_EQ(RelativeError(0.0, 0.0), 0.0);
}

TEST(GradCheckTest, SmallModelGradients) {
  std::vector<Example> data = GenDateDataset(20, 1);
  TrainConfig c = SmallConfig();
  ModelParams p = InitFor(c, data);
  // Larger weights make the check informative away from zero gradients.
  for (Mat& m : p.tensors()) m *= 10.0;
  GradCheckResult full = GradCheckExample(p, data[0], LossKind::kTotal, 1e-5);
  EXPECT_EQ(full.coordinates, 200);
  EXPECT_LE(full.max_relative_error, 1e-4) << full.analytic << " vs " << full.numeric;
  GradCheckResult crf = GradCheckExample(p, data[1], LossKind::kCrf, 1e-5);
  EXPECT_LE(crf.max_relative_error, 1e-5) << crf.analytic << " vs " << crf.numeric;
}

TEST(TrainTest, ExampleLossParts) {
  std::vector<Example> data = GenDateDataset(5, 2);
  TrainConfig c = SmallConfig();
  ModelParams p = InitFor(c, data);
  LossParts all = ExampleLoss(p, data[0], LossKind::kTotal, nullptr);
  EXPECT_GT(all.joint, 0);
  EXPECT_GT(all.crf, 0);
  EXPECT_EQ(ExampleLoss(p, data[0], LossKind::kJoint, nullptr).joint, all.joint);
  EXPECT_EQ(ExampleLoss(p, data[0], LossKind::kCrf, nullptr).crf, all.crf);
  Example unlabeled = data[0];
  unlabeled.states.reset();
  EXPECT_THROW(ExampleLoss(p, unlabeled, LossKind::kTotal, nullptr), DomainError);
}

TEST(TrainTest, ClipGradients) {
  std::vector<Mat> g = {Mat::Constant(1, 1, 3.0), Mat::Constant(1, 1, 4.0)};
  EXPECT_DOUBLE_EQ(ClipGradients(g, 10.0), 5.0);
  EXPECT_DOUBLE_EQ(g[1](0, 0), 4.0);
  EXPECT_DOUBLE_EQ(ClipGradients(g, 1.0), 5.0);
  EXPECT_NEAR(g[0](0, 0), 0.6, 1e-15);
  EXPECT_NEAR(g[1](0, 0), 0.8, 1e-15);
}

// Reference update for one scalar, written from the textbook recurrence.
TEST(TrainTest, AdamMatchesScalarRecurrence) {
  std::vector<Example> data = GenDateDataset(3, 2);
  TrainConfig c = SmallConfig();
  c.learning_rate = 0.01;
  ModelParams p = InitFor(c, data);
  Adam adam(p, c);
  double x = p[Tensor::kCellB](0, 0), m = 0, v = 0;
  for (int t = 1; t <= 3; ++t) {
    std::vector<Mat> g = p.ZerosLike();
    double gt = 0.5 * t - 0.7;
    g[static_cast<int>(Tensor::kCellB)](0, 0) = gt;
    adam.Step(p, g);
    m = 0.9 * m + 0.1 * gt;
    v = 0.999 * v + 0.001 * gt * gt;
    double mh = m / (1 - std::pow(0.9, t)), vh = v / (1 - std::pow(0.999, t));
    x -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
    EXPECT_NEAR(p[Tensor::kCellB](0, 0), x, 1e-15);
  }
}

TEST(TrainTest, ZeroLearningRateKeepsParams) {
  std::vector<Example> data = GenDateDataset(10, 3);
  TrainConfig c = SmallConfig();
  c.epochs = 1;
  c.learning_rate = 0.0;
  ModelParams init = InitFor(c, data);
  TrainResult r = TrainFrom(init, c, data, {});
  EXPECT_TRUE(r.params == init);
  EXPECT_EQ(r.report.epochs.size(), 1u);
}

TEST(TrainTest, DeterministicAndImproving) {
  std::vector<Example> all = GenDateDataset(240, 4);
  std::vector<Example> train(all.begin(), all.begin() + 200);
  std::vector<Example> dev(all.begin() + 200, all.end());
  TrainConfig c = SmallConfig();
  c.epochs = 3;
  TrainResult a = Train(c, train, dev);
  TrainResult b = Train(c, train, dev);
  EXPECT_EQ(SerializeCheckpoint(a.params), SerializeCheckpoint(b.params));
  EXPECT_EQ(TrainReportToJson(a.report).dump(), TrainReportToJson(b.report).dump());
  ASSERT_EQ(a.report.epochs.size(), 3u);
  EXPECT_LT(a.report.epochs[1].joint_nll, a.report.epochs[0].joint_nll);
  EXPECT_LT(a.report.epochs[1].crf_nll, a.report.epochs[0].crf_nll);
  EXPECT_GE(a.report.best_epoch, 1);
  for (const auto& e : a.report.epochs) {
    EXPECT_TRUE(std::isfinite(e.joint_nll));
    EXPECT_GE(e.dev_token_accuracy, 0.0);
    EXPECT_LE(e.dev_state_accuracy, 1.0);
  }
  c.seed = 1;
  TrainResult other = Train(c, train, dev);
  EXPECT_NE(SerializeCheckpoint(other.params), SerializeCheckpoint(a.params));
}

TEST(TrainTest, NonFiniteLossNamesBatch) {
  std::vector<Example> data = GenDateDataset(20, 5);
  TrainConfig c = SmallConfig();
  ModelParams p = InitFor(c, data);
  p[Tensor::kWordW](5, 0) = std::numeric_limits<double>::quiet_NaN();
  try {
    TrainFrom(p, c, data, {});
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("batch 0"), std::string::npos) << e.what();
  }
}

TEST(TrainTest, RejectsUnlabeledData) {
  std::vector<Example> data = GenDateDataset(4, 5);
  data[2].states.reset();
  EXPECT_THROW(Train(SmallConfig(), data, {}), DomainError);
  EXPECT_THROW(Train(SmallConfig(), {}, {}), DomainError);
}

TEST(EvaluateTest, VacuousConstraintMatchesFree) {
  std::vector<Example> data = GenDateDataset(40, 6);
  TrainConfig c = SmallConfig();
  TrainResult r = Train(c, data, {});
  DecodeOptions o;
  o.beam_width = 3;
  ConstraintDfa any = Compile(ParseRegex(".*", ControlAlphabet(10)), 10);
  EvalMetrics free = Evaluate(r.params, data, nullptr, o);
  EvalMetrics vac = Evaluate(r.params, data, &any, o);
  EXPECT_EQ(MetricsToJson(free), MetricsToJson(vac));
  EXPECT_EQ(free.count, 40);
  ASSERT_TRUE(free.state_accuracy.has_value());
  EXPECT_THROW(Evaluate(r.params, {}, nullptr, o), DomainError);
}

TEST(EvaluateTest, SoundUnderFormatConstraint) {
  std::vector<Example> data = GenDateDataset(30, 7);
  TrainResult r = Train(SmallConfig(), data, {});
  DecodeOptions o;
  o.beam_width = 2;
  for (int f : {0, 5}) {
    ConstraintDfa dfa =
        Compile(ParseRegex(FormatConstraint(f), ControlAlphabet(10)), 10);
    EvalMetrics m = Evaluate(r.params, data, &dfa, o);
    EXPECT_EQ(m.constraint_satisfaction_rate, 1.0);
    EXPECT_EQ(m.infeasible, 0);
  }
}

// A model whose words are fully determined: one word, so every decode is the
// reference once the length is right.
TEST(EvaluateTest, PerfectOutputScoresOne) {
  std::vector<Example> data;
  for (int i = 0; i < 4; ++i) {
    data.push_back({DataTable(std::vector<DataTable::Entry>{{"k", "v"}}), {"w", "w"},
                    ControlStateSeq({0, 0})});
  }
  TrainConfig c = SmallConfig();
  c.model.num_states = 2;
  ModelParams p = InitFor(c, data);
  ConstraintDfa two = Compile(ParseRegex("AA", ControlAlphabet(2)), 2);
  // Only <unk> and "w" are emittable; bias the word head towards "w".
  p[Tensor::kWordB](p.words().Lookup("w"), 0) = 10.0;
  EvalMetrics m = Evaluate(p, data, &two, DecodeOptions{});
  EXPECT_EQ(m.exact_match, 1.0);
  EXPECT_EQ(m.token_accuracy, 1.0);
}

}  // namespace
}  // namespace ctrlgen

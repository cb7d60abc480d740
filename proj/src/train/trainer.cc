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

#include "ctrlgen/train/trainer.h"

#include <cmath>
#include <numeric>
#include <set>

#include "ctrlgen/autodiff/tape.h"
#include "ctrlgen/core/errors.h"
#include "ctrlgen/core/random.h"
#include "ctrlgen/infer/inference_network.h"
#include "ctrlgen/model/gru.h"
#include "ctrlgen/model/joint_model.h"

namespace ctrlgen {
namespace {

const ControlStateSeq& GoldStates(const Example& e) {
  if (!e.states) throw DomainError("training example lacks gold states");
  return *e.states;
}

template <typename T>
void Read(const Json& j, const char* key, T* out) {
  if (j.contains(key)) *out = j.at(key).get<T>();
}

}  // namespace

void TrainConfig::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw DomainError(std::string("invalid train config: ") + what);
  };
  require(epochs >= 1, "epochs must be >= 1");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(learning_rate >= 0 && std::isfinite(learning_rate),
          "learning_rate must be finite and >= 0");
  require(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1,
          "moment decays must be in [0, 1)");
  require(adam_epsilon > 0, "adam_epsilon must be > 0");
  require(clip_norm > 0, "clip_norm must be > 0");
  require(min_count >= 1, "min_count must be >= 1");
  require(model.embed_dim >= 1 && model.hidden_dim >= 1 &&
              model.crf_embed_dim >= 1 && model.crf_hidden_dim >= 1,
          "dimensions must be >= 1");
  require(model.num_states >= 1 && model.num_states <= 26,
          "num_states must be in 1..26");
}

Json TrainConfigToJson(const TrainConfig& c) {
  return Json{{"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"learning_rate", c.learning_rate},
              {"beta1", c.beta1},
              {"beta2", c.beta2},
              {"adam_epsilon", c.adam_epsilon},
              {"clip_norm", c.clip_norm},
              {"seed", c.seed},
              {"min_count", c.min_count},
              {"embed_dim", c.model.embed_dim},
              {"hidden_dim", c.model.hidden_dim},
              {"num_states", c.model.num_states},
              {"crf_embed_dim", c.model.crf_embed_dim},
              {"crf_hidden_dim", c.model.crf_hidden_dim},
              {"copy", c.model.copy}};
}

TrainConfig TrainConfigFromJson(const Json& j) {
  if (!j.is_object()) throw SchemaError("train config must be a JSON object");
  static const std::set<std::string> kKeys = {
      "epochs",    "batch_size", "learning_rate", "beta1",      "beta2",
      "adam_epsilon", "clip_norm", "seed",        "min_count",  "embed_dim",
      "hidden_dim", "num_states", "crf_embed_dim", "crf_hidden_dim", "copy"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw SchemaError("unknown train config key '" + key + "'");
  }
  TrainConfig c;
  try {
    Read(j, "epochs", &c.epochs);
    Read(j, "batch_size", &c.batch_size);
    Read(j, "learning_rate", &c.learning_rate);
    Read(j, "beta1", &c.beta1);
    Read(j, "beta2", &c.beta2);
    Read(j, "adam_epsilon", &c.adam_epsilon);
    Read(j, "clip_norm", &c.clip_norm);
    Read(j, "seed", &c.seed);
    Read(j, "min_count", &c.min_count);
    Read(j, "embed_dim", &c.model.embed_dim);
    Read(j, "hidden_dim", &c.model.hidden_dim);
    Read(j, "num_states", &c.model.num_states);
    Read(j, "crf_embed_dim", &c.model.crf_embed_dim);
    Read(j, "crf_hidden_dim", &c.model.crf_hidden_dim);
    Read(j, "copy", &c.model.copy);
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("bad train config value: ") + e.what());
  }
  c.Validate();
  return c;
}

Json TrainReportToJson(const TrainReport& r) {
  Json epochs = Json::array();
  for (const EpochReport& e : r.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"joint_nll", e.joint_nll},
                      {"crf_nll", e.crf_nll},
                      {"dev_token_accuracy", e.dev_token_accuracy},
                      {"dev_state_accuracy", e.dev_state_accuracy}});
  }
  return Json{{"epochs", epochs}, {"best_epoch", r.best_epoch}};
}

LossParts ExampleLoss(const ModelParams& params, const Example& example,
                      LossKind kind, std::vector<Mat>* grads) {
  const ControlStateSeq& states = GoldStates(example);
  ad::Tape tape;
  ParamBinding bind(params, grads);
  LossParts parts;
  ad::Var joint, crf;
  if (kind != LossKind::kCrf) {
    joint = JointNegLogLikelihood(tape, bind, example.table,
                                  params.words().Encode(example.tokens), states.ids());
    parts.joint = tape.scalar(joint);
  }
  if (kind != LossKind::kJoint) {
    crf = CrfNegLogLikelihood(tape, bind, example.table, example.tokens, states);
    parts.crf = tape.scalar(crf);
  }
  if (grads != nullptr) {
    ad::Var root = kind == LossKind::kJoint  ? joint
                   : kind == LossKind::kCrf ? crf
                                            : tape.Add(joint, crf);
    tape.Backward(root);
  }
  return parts;
}

double ClipGradients(std::vector<Mat>& grads, double max_norm) {
  double sq = 0.0;
  for (const Mat& g : grads) sq += g.squaredNorm();
  double norm = std::sqrt(sq);
  if (norm > max_norm) {
    double scale = max_norm / norm;
    for (Mat& g : grads) g *= scale;
  }
  return norm;
}

Adam::Adam(const ModelParams& params, const TrainConfig& config)
    : lr_(config.learning_rate),
      beta1_(config.beta1),
      beta2_(config.beta2),
      eps_(config.adam_epsilon),
      m_(params.ZerosLike()),
      v_(params.ZerosLike()) {}

void Adam::Step(ModelParams& params, const std::vector<Mat>& grads) {
  ++step_;
  const double c1 = 1.0 - std::pow(beta1_, step_);
  const double c2 = 1.0 - std::pow(beta2_, step_);
  for (std::size_t i = 0; i < grads.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i].cwiseProduct(grads[i]);
    params.tensors()[i].array() -=
        lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
  }
}

TeacherForcedMetrics EvaluateTeacherForced(const ModelParams& params,
                                           const std::vector<Example>& dev) {
  long tokens = 0, word_hits = 0, state_hits = 0;
  for (const Example& e : dev) {
    const ControlStateSeq& gold = GoldStates(e);
    std::vector<TokenId> ids = params.words().Encode(e.tokens);
    EncodedInput in = EncodeTable(params, e.table);
    DecoderState s = InitialState(params, in);
    for (std::size_t t = 0; t < ids.size(); ++t) {
      StepView v = Observe(params, s);
      Vec lp = WordLogProbs(params, s, v, gold[t]);
      Eigen::Index best = 0;
      lp.maxCoeff(&best);
      word_hits += best == ids[t];
      s = Advance(params, s, v, gold[t], ids[t]);
    }
    ControlStateSeq inferred = InferStates(params, e.table, e.tokens);
    for (std::size_t t = 0; t < ids.size(); ++t) state_hits += inferred[t] == gold[t];
    tokens += static_cast<long>(ids.size());
  }
  TeacherForcedMetrics m;
  if (tokens > 0) {
    m.token_accuracy = static_cast<double>(word_hits) / static_cast<double>(tokens);
    m.state_accuracy = static_cast<double>(state_hits) / static_cast<double>(tokens);
  }
  return m;
}

TrainResult Train(const TrainConfig& config, const std::vector<Example>& train,
                  const std::vector<Example>& dev, const EpochCallback& on_epoch) {
  config.Validate();
  if (train.empty()) throw DomainError("training set is empty");
  ModelParams init = ModelParams::Initialize(
      config.model, BuildVocab(train, config.min_count), BuildFieldTable(train),
      BuildValueVocab(train), config.seed);
  return TrainFrom(std::move(init), config, train, dev, on_epoch);
}

TrainResult TrainFrom(ModelParams params, const TrainConfig& config,
                      const std::vector<Example>& train,
                      const std::vector<Example>& dev,
                      const EpochCallback& on_epoch) {
  config.Validate();
  if (train.empty()) throw DomainError("training set is empty");
  for (const Example& e : train) {
    GoldStates(e);
    e.Validate();
  }
  TrainResult result;
  auto dev_score = [&](const ModelParams& p, TeacherForcedMetrics* m) {
    *m = EvaluateTeacherForced(p, dev);
    return m->token_accuracy + m->state_accuracy;
  };
  TeacherForcedMetrics metrics;
  double best_score = dev.empty() ? -1.0 : dev_score(params, &metrics);
  ModelParams best = params;

  Adam adam(params, config);
  Rng shuffle(config.seed ^ 0x5eedf00dULL);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  int batch_index = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle.Shuffle(order);
    EpochReport report;
    report.epoch = epoch;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size), ++batch_index) {
      std::size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<Mat> grads = params.ZerosLike();
      LossParts batch;
      try {
        for (std::size_t i = start; i < end; ++i) {
          LossParts l = ExampleLoss(params, train[order[i]], LossKind::kTotal, &grads);
          batch.joint += l.joint;
          batch.crf += l.crf;
        }
      } catch (const NumericalError& e) {
        throw NumericalError("batch " + std::to_string(batch_index) + " (epoch " +
                             std::to_string(epoch) + "): " + e.what());
      }
      if (!std::isfinite(batch.total())) {
        throw NumericalError("non-finite loss in batch " + std::to_string(batch_index) +
                             " (epoch " + std::to_string(epoch) + ")");
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (Mat& g : grads) g *= inv;
      ClipGradients(grads, config.clip_norm);
      adam.Step(params, grads);
      if (!params.AllFinite()) {
        throw NumericalError("non-finite parameters after batch " +
                             std::to_string(batch_index));
      }
      report.joint_nll += batch.joint;
      report.crf_nll += batch.crf;
    }
    report.joint_nll /= static_cast<double>(train.size());
    report.crf_nll /= static_cast<double>(train.size());
    double score = 2.0;
    if (!dev.empty()) {
      score = dev_score(params, &metrics);
      report.dev_token_accuracy = metrics.token_accuracy;
      report.dev_state_accuracy = metrics.state_accuracy;
    }
    // Without a dev set the last epoch wins.
    if (dev.empty() || score > best_score) {
      best_score = score;
      best = params;
      result.report.best_epoch = epoch;
    }
    result.report.epochs.push_back(report);
    if (on_epoch) on_epoch(report);
  }
  best.RoundToFloat();
  result.params = std::move(best);
  return result;
}

}  // namespace ctrlgen

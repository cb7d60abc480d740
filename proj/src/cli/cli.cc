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

#include "ctrlgen/cli/cli.h"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

#include "ctrlgen/constraint/regex.h"
#include "ctrlgen/core/errors.h"
#include "ctrlgen/core/tokenize.h"
#include "ctrlgen/data/dates.h"
#include "ctrlgen/data/table_dataset.h"
#include "ctrlgen/decode/beam_search.h"
#include "ctrlgen/export/bundle.h"
#include "ctrlgen/forecast/forecast.h"
#include "ctrlgen/infer/inference_network.h"
#include "ctrlgen/model/checkpoint.h"
#include "ctrlgen/server/server.h"
#include "ctrlgen/train/evaluate.h"
#include "ctrlgen/train/trainer.h"

namespace ctrlgen {
namespace {

struct DecodeArgs {
  int beam = 5;
  int max_len = 40;
  int threads = 0;

  void Add(CLI::App* cmd, bool with_threads) {
    cmd->add_option("--beam", beam, "Beam width")->check(CLI::Range(1, 1024));
    cmd->add_option("--max-len", max_len, "Maximum output length, EOS included")
        ->check(CLI::Range(1, 10000));
    if (with_threads) cmd->add_option("--threads", threads, "Decode threads, 0 = all cores");
  }
  DecodeOptions Options() const {
    DecodeOptions d;
    d.beam_width = beam;
    d.max_len = max_len;
    return d;
  }
  ForecastOptions Forecast() const {
    ForecastOptions o;
    o.decode = Options();
    o.threads = threads;
    return o;
  }
};

std::optional<ConstraintDfa> CompileArg(const std::string& regex, int num_states) {
  if (regex.empty()) return std::nullopt;
  return Compile(ParseRegex(regex, ControlAlphabet(num_states)), num_states);
}

std::vector<Example> LoadWithWarnings(const std::string& path, std::ostream& err) {
  std::vector<std::string> warnings;
  std::vector<Example> examples = LoadExamples(path, &warnings);
  for (const std::string& w : warnings) err << "warning: " << w << "\n";
  return examples;
}

void PrintTuple(const ForecastTuple& t, std::ostream& out) {
  if (t.feasible()) {
    out << t.result->states.ToLetters() << "\t" << Detokenize(t.result->tokens) << "\n";
  } else {
    out << "-\tinfeasible: " << FormatMeaningRepresentation(t.table) << "\n";
  }
}

void PrintGeneration(const GenerationResult& r, std::ostream& out) {
  out << Detokenize(r.tokens) << "\n" << r.states.ToLetters() << "\n";
}

void PrintMetrics(const EvalMetrics& m, std::ostream& out) {
  out << "count " << m.count << "\n"
      << "exact_match " << m.exact_match << "\n"
      << "token_accuracy " << m.token_accuracy << "\n";
  if (m.state_accuracy) out << "state_accuracy " << *m.state_accuracy << "\n";
  out << "constraint_satisfaction_rate " << m.constraint_satisfaction_rate << "\n"
      << "infeasible " << m.infeasible << "\n";
}

void PrintAlignment(const AlignmentSummary& s, std::ostream& out) {
  for (std::size_t z = 0; z < s.states.size(); ++z) {
    const StateAlignment& a = s.states[z];
    if (a.total == 0) continue;
    out << static_cast<char>('A' + z) << "  tokens " << a.total << "  fields";
    for (const auto& [field, n] : a.field_counts) {
      if (n > 0) out << " " << field << ":" << n;
    }
    out << "  top";
    for (const auto& [tok, n] : a.top_tokens) out << " " << tok << ":" << n;
    out << "\n";
  }
}

}  // namespace

DataTable ReadTableArg(const std::string& arg) {
  std::string text = arg;
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) text = ReadFileBytes(arg);
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw FormatError("empty table argument");
  if (text[first] == '{') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::exception& e) {
      throw FormatError(std::string("table is not valid JSON: ") + e.what());
    }
    return TableFromJson(j);
  }
  return ParseMeaningRepresentation(text);
}

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Controllable table-to-text generation with control-state constraints"};
  app.require_subcommand(1);
  bool json = false;
  app.add_flag("--json", json, "Machine-readable output");

  // gen-data
  int gen_n = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-data", "Generate the synthetic date dataset");
  gen->add_option("--n", gen_n, "Number of examples")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_option("--out", gen_out, "Output JSON-lines file")->required();

  // train
  std::string train_config, train_path, dev_path, train_out, report_path;
  auto* train = app.add_subcommand("train", "Train a model");
  train->add_option("--config", train_config, "Training config JSON");
  train->add_option("--train", train_path, "Training examples (.jsonl or .csv)")->required();
  train->add_option("--dev", dev_path, "Development examples for model selection");
  train->add_option("--out", train_out, "Checkpoint to write")->required();
  train->add_option("--report", report_path, "Write the training report JSON here");

  // generate
  std::string model_path, table_arg, constraint;
  DecodeArgs gen_dec;
  int tree_keep = -1;
  auto* generate = app.add_subcommand("generate", "Decode one table");
  generate->add_option("--model", model_path, "Checkpoint")->required();
  generate->add_option("--table", table_arg, "Table: JSON file, inline JSON or MR string")
      ->required();
  generate->add_option("--constraint", constraint, "Control-state regex");
  generate->add_option("--tree", tree_keep, "Capture the beam tree, keeping N children per node");
  gen_dec.Add(generate, false);

  // infer
  std::string text;
  auto* infer = app.add_subcommand("infer", "Infer control states for a text");
  infer->add_option("--model", model_path, "Checkpoint")->required();
  infer->add_option("--table", table_arg, "Table: JSON file, inline JSON or MR string")->required();
  infer->add_option("--text", text, "Whitespace-tokenized text")->required();

  // forecast
  std::string data_path, range_spec;
  int global_n = 0;
  std::uint64_t forecast_seed = 0;
  DecodeArgs fc_dec;
  auto* forecast = app.add_subcommand("forecast", "Apply a constraint across many inputs");
  forecast->add_option("--model", model_path, "Checkpoint")->required();
  forecast->add_option("--constraint", constraint, "Control-state regex");
  auto* global_opt = forecast->add_option("--global", global_n, "Sample N test tables")
                         ->check(CLI::PositiveNumber);
  forecast->add_option("--seed", forecast_seed, "Sampling seed for --global");
  forecast->add_option("--data", data_path, "Test examples for --global");
  auto* range_opt =
      forecast->add_option("--range", range_spec, "Value ranges, e.g. day=1..28;month=9|10");
  forecast->add_option("--table", table_arg, "Base table for --range");
  global_opt->excludes(range_opt);
  fc_dec.Add(forecast, true);

  // align
  int align_n = 100;
  auto* align = app.add_subcommand("align", "Summarize which table fields each state verbalizes");
  align->add_option("--model", model_path, "Checkpoint")->required();
  align->add_option("--data", data_path, "Examples")->required();
  align->add_option("--n", align_n, "Use the first N examples")->check(CLI::PositiveNumber);

  // evaluate
  DecodeArgs ev_dec;
  auto* evaluate = app.add_subcommand("evaluate", "Decode a dataset and score it");
  evaluate->add_option("--model", model_path, "Checkpoint")->required();
  evaluate->add_option("--data", data_path, "Examples")->required();
  evaluate->add_option("--constraint", constraint, "Control-state regex");
  ev_dec.Add(evaluate, false);

  // export
  std::string out_path;
  auto* exp = app.add_subcommand("export", "Package a model and a constraint as a bundle");
  exp->add_option("--model", model_path, "Checkpoint")->required();
  exp->add_option("--constraint", constraint, "Control-state regex")->required();
  exp->add_option("--out", out_path, "Bundle file (.zip)")->required();

  // run-export
  std::string bundle_path, input_path;
  DecodeArgs run_dec;
  auto* run = app.add_subcommand("run-export", "Run a bundle over a table or a dataset");
  run->add_option("--bundle", bundle_path, "Bundle file")->required();
  run->add_option("--input", input_path, "table.json, MR string or dataset.jsonl")->required();
  run_dec.Add(run, true);

  // serve
  ServerConfig server;
  auto* serve = app.add_subcommand("serve", "Start the HTTP service");
  serve->add_option("--model", server.checkpoint_path, "Checkpoint")->required();
  serve->add_option("--data", server.dataset_path, "Test examples")->required();
  serve->add_option("--port", server.port, "Port, 0 for any free port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", server.host, "Bind address");
  serve->add_option("--export-dir", server.export_dir, "Directory for bundles and history");
  serve->add_option("--cors-origin", server.cors_origin, "Allowed CORS origin");
  serve->add_option("--threads", server.decode_threads, "Forecast decode threads");

  for (CLI::App* sub : app.get_subcommands({})) {
    sub->add_flag("--json", json, "Machine-readable output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto fail = [&](const std::string& code, const std::string& detail, int exit_code) {
    err << Json{{"error", code}, {"detail", detail}}.dump() << "\n";
    return exit_code;
  };

  try {
    if (*gen) {
      WriteExamplesJsonl(gen_out, GenDateDataset(gen_n, gen_seed));
      if (json) out << Json{{"out", gen_out}, {"n", gen_n}}.dump() << "\n";
    } else if (*train) {
      TrainConfig config;
      if (!train_config.empty()) config = TrainConfigFromJson(Json::parse(ReadFileBytes(train_config)));
      config.Validate();
      std::vector<Example> tr = LoadWithWarnings(train_path, err);
      std::vector<Example> dev;
      if (!dev_path.empty()) dev = LoadWithWarnings(dev_path, err);
      AddWeakStates(tr, config.model.num_states);
      AddWeakStates(dev, config.model.num_states);
      TrainResult r = Train(config, tr, dev, [&](const EpochReport& e) {
        err << "epoch " << e.epoch << " joint_nll " << e.joint_nll << " crf_nll " << e.crf_nll
            << " dev_token_acc " << e.dev_token_accuracy << " dev_state_acc "
            << e.dev_state_accuracy << "\n";
      });
      SaveCheckpoint(r.params, train_out);
      Json report = TrainReportToJson(r.report);
      if (!report_path.empty()) WriteFileBytes(report_path, report.dump(2) + "\n");
      if (json) {
        out << report.dump() << "\n";
      } else {
        out << "best epoch " << r.report.best_epoch << ", checkpoint " << train_out << "\n";
      }
    } else if (*generate) {
      ModelParams p = LoadCheckpoint(model_path);
      DataTable table = ReadTableArg(table_arg);
      DecodeOptions d = gen_dec.Options();
      d.capture_tree = tree_keep >= 0;
      std::optional<ConstraintDfa> dfa = CompileArg(constraint, p.num_states());
      GenerationResult r = dfa ? ConstrainedGenerate(p, table, *dfa, d) : FreeGenerate(p, table, d);
      if (r.tree && tree_keep > 0) TrimBeamTree(*r.tree, static_cast<std::size_t>(tree_keep));
      if (json) {
        out << GenerationToJson(r).dump() << "\n";
      } else {
        PrintGeneration(r, out);
      }
    } else if (*infer) {
      ModelParams p = LoadCheckpoint(model_path);
      std::vector<std::string> tokens = Tokenize(text);
      if (tokens.empty()) throw DomainError("--text has no tokens");
      ControlStateSeq states = InferStates(p, ReadTableArg(table_arg), tokens);
      if (json) {
        out << Json{{"tokens", tokens}, {"states", StatesToJson(states)}}.dump() << "\n";
      } else {
        out << states.ToLetters() << "\n";
      }
    } else if (*forecast) {
      ModelParams p = LoadCheckpoint(model_path);
      std::optional<ConstraintDfa> dfa = CompileArg(constraint, p.num_states());
      const ConstraintDfa* dp = dfa ? &*dfa : nullptr;
      std::vector<ForecastTuple> tuples;
      if (global_opt->count()) {
        if (data_path.empty()) throw CLI::RequiredError("--data is required with --global");
        GlobalForecast g = ForecastGlobal(p, dp, LoadWithWarnings(data_path, err), global_n,
                                          forecast_seed, fc_dec.Forecast());
        tuples = std::move(g.tuples);
      } else if (range_opt->count()) {
        if (table_arg.empty()) throw CLI::RequiredError("--table is required with --range");
        tuples = ForecastRange(p, dp, ReadTableArg(table_arg), ParseRangeSpec(range_spec),
                               fc_dec.Forecast());
      } else {
        throw CLI::RequiredError("one of --global or --range is required");
      }
      int feasible = 0;
      for (const auto& t : tuples) feasible += t.feasible();
      if (json) {
        Json arr = Json::array();
        for (const auto& t : tuples) arr.push_back(TupleToJson(t));
        out << Json{{"tuples", arr},
                    {"heatmap", HeatmapToJson(BuildHeatmap(tuples, p.num_states()))}}
                   .dump()
            << "\n";
      } else {
        for (const auto& t : tuples) PrintTuple(t, out);
        out << "feasible " << feasible << "/" << tuples.size() << "\n";
      }
    } else if (*align) {
      ModelParams p = LoadCheckpoint(model_path);
      std::vector<Example> data = LoadWithWarnings(data_path, err);
      if (static_cast<int>(data.size()) > align_n) data.resize(align_n);
      AlignmentSummary s = SummarizeAlignment(p, data);
      if (json) {
        out << AlignmentSummaryToJson(s).dump() << "\n";
      } else {
        PrintAlignment(s, out);
      }
    } else if (*evaluate) {
      ModelParams p = LoadCheckpoint(model_path);
      std::optional<ConstraintDfa> dfa = CompileArg(constraint, p.num_states());
      EvalMetrics m = Evaluate(p, LoadWithWarnings(data_path, err), dfa ? &*dfa : nullptr,
                               ev_dec.Options());
      if (json) {
        out << MetricsToJson(m).dump() << "\n";
      } else {
        PrintMetrics(m, out);
      }
    } else if (*exp) {
      ModelParams p = LoadCheckpoint(model_path);
      std::optional<ConstraintDfa> dfa = CompileArg(constraint, p.num_states());
      if (!dfa) throw DomainError("--constraint must not be empty");
      Bundle b = ExportBundle(p, *dfa, constraint, out_path);
      if (json) {
        out << Json{{"bundle_path", out_path}, {"content_hash", b.content_hash}}.dump() << "\n";
      } else {
        out << out_path << " " << b.content_hash << "\n";
      }
    } else if (*run) {
      Bundle b = LoadBundle(bundle_path);
      bool dataset = input_path.size() >= 6 &&
                     input_path.compare(input_path.size() - 6, 6, ".jsonl") == 0;
      std::vector<Example> examples;
      std::vector<DataTable> tables;
      if (dataset) {
        examples = ReadExamplesJsonl(input_path);
        for (const Example& e : examples) tables.push_back(e.table);
      } else {
        tables.push_back(ReadTableArg(input_path));
      }
      std::vector<ForecastTuple> tuples = RunBundle(b, tables, run_dec.Forecast());
      std::optional<EvalMetrics> metrics;
      if (dataset) metrics = RunBundleEval(b, examples, run_dec.Options());
      if (json) {
        Json arr = Json::array();
        for (const auto& t : tuples) arr.push_back(TupleToJson(t));
        Json j = {{"outputs", arr}};
        if (metrics) j["metrics"] = MetricsToJson(*metrics);
        out << j.dump() << "\n";
      } else {
        for (const auto& t : tuples) PrintTuple(t, out);
        if (metrics) PrintMetrics(*metrics, out);
      }
    } else if (*serve) {
      Serve(server);
    }
  } catch (const CLI::Error& e) {
    return fail("usage", e.what(), kExitUsage);
  } catch (const NumericalError& e) {
    return fail(e.code(), e.what(), kExitNumerical);
  } catch (const Error& e) {
    return fail(e.code(), e.what(), kExitData);
  } catch (const Json::exception& e) {
    return fail("format_error", e.what(), kExitData);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kExitData);
  }
  return kExitOk;
}

}  // namespace ctrlgen

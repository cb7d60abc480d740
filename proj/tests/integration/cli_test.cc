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

#include <filesystem>
#include <sstream>

#include "ctrlgen/cli/cli.h"
#include "ctrlgen/core/codec.h"
#include "ctrlgen/core/tokenize.h"
#include "ctrlgen/data/dates.h"
#include "ctrlgen/data/table_dataset.h"
#include "ctrlgen/export/bundle.h"

namespace ctrlgen {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ctrlgen");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> Lines(const std::string& s) {
  std::vector<std::string> lines;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

const char* kPhoenix =
    "name[The Phoenix], eatType[pub], food[French], area[city centre], near[Café Sicilia]";

// A restaurant model trained once through the CLI on weak states, with a
// large enough alphabet for arbitrary letter constraints.
class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(fs::temp_directory_path() /
                        ("ctrlgen_cli_test_" + std::to_string(::getpid())));
    fs::create_directories(*dir_);
    WriteFileBytes(P("config.json"),
                   R"({"epochs":6,"embed_dim":16,"hidden_dim":16,"num_states":20,)"
                   R"("crf_embed_dim":8,"crf_hidden_dim":8,"learning_rate":0.01})");
    CliRun r = Cli({"train", "--config", P("config.json"), "--train",
                 CTRLGEN_TEST_DATA_DIR "/restaurants.csv", "--out", P("model.ckpt"),
                 "--report", P("report.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::vector<Example> all = LoadExamples(CTRLGEN_TEST_DATA_DIR "/restaurants.csv");
    std::vector<Example> test(all.begin(), all.begin() + 20);
    WriteExamplesJsonl(P("test.jsonl"), test);
  }
  static void TearDownTestSuite() {
    fs::remove_all(*dir_);
    delete dir_;
  }
  static std::string P(const std::string& name) { return (*dir_ / name).string(); }

  static fs::path* dir_;
};

fs::path* CliTest::dir_ = nullptr;

TEST(CliBasicsTest, GenDataIsDeterministic) {
  fs::path dir = fs::temp_directory_path() / ("ctrlgen_cli_gen_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::string a = (dir / "a.jsonl").string(), b = (dir / "b.jsonl").string();
  ASSERT_EQ(Cli({"gen-data", "--n", "1", "--seed", "7", "--out", a}).code, 0);
  ASSERT_EQ(Cli({"gen-data", "--n", "1", "--seed", "7", "--out", b}).code, 0);
  EXPECT_EQ(ReadFileBytes(a), ReadFileBytes(b));
  std::vector<Example> ex = ReadExamplesJsonl(a);
  ASSERT_EQ(ex.size(), 1u);
  EXPECT_EQ(ex[0].tokens, GenDateDataset(1, 7)[0].tokens);
  ASSERT_EQ(Cli({"gen-data", "--n", "50", "--seed", "8", "--out", b}).code, 0);
  EXPECT_EQ(ReadExamplesJsonl(b).size(), 50u);
  fs::remove_all(dir);
}

TEST(CliBasicsTest, ExitCodes) {
  EXPECT_EQ(Cli({}).code, kExitUsage);
  EXPECT_EQ(Cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Cli({"generate", "--table", "x"}).code, kExitUsage);
  EXPECT_EQ(Cli({"gen-data", "--n", "0", "--out", "x"}).code, kExitUsage);
  EXPECT_EQ(Cli({"--help"}).code, kExitOk);

  CliRun missing = Cli({"generate", "--model", "/nonexistent.ckpt", "--table", kPhoenix});
  EXPECT_EQ(missing.code, kExitData);
  Json diag = Json::parse(missing.err);
  EXPECT_EQ(diag["error"], "io_error");
  EXPECT_TRUE(diag["detail"].is_string());
}

TEST(CliBasicsTest, DivergingTrainingIsNumerical) {
  fs::path dir = fs::temp_directory_path() / ("ctrlgen_cli_nan_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::string data = (dir / "d.jsonl").string(), cfg = (dir / "c.json").string();
  ASSERT_EQ(Cli({"gen-data", "--n", "64", "--out", data}).code, 0);
  WriteFileBytes(cfg, R"({"epochs":3,"embed_dim":4,"hidden_dim":4,"crf_embed_dim":2,)"
                      R"("crf_hidden_dim":2,"learning_rate":1e300,"clip_norm":1e300})");
  CliRun r = Cli({"train", "--config", cfg, "--train", data, "--out", (dir / "m").string()});
  EXPECT_EQ(r.code, kExitNumerical) << r.err;
  EXPECT_EQ(Json::parse(r.err)["error"], "numerical_error");
  fs::remove_all(dir);
}

TEST_F(CliTest, TrainWroteReport) {
  Json report = Json::parse(ReadFileBytes(P("report.json")));
  EXPECT_EQ(report["epochs"].size(), 6u);
}

TEST_F(CliTest, GenerateUnderLetterConstraint) {
  CliRun r = Cli({"generate", "--model", P("model.ckpt"), "--table", kPhoenix, "--constraint",
               "FFJKECT"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<std::string> lines = Lines(r.out);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(Tokenize(lines[0]).size(), 7u);
  EXPECT_EQ(lines[1], "FFJKECT");

  CliRun j = Cli({"generate", "--json", "--model", P("model.ckpt"), "--table", kPhoenix,
               "--constraint", "FFJKECT", "--tree", "2"});
  ASSERT_EQ(j.code, 0) << j.err;
  Json g = Json::parse(j.out);
  EXPECT_EQ(g["states"], "FFJKECT");
  EXPECT_TRUE(g.contains("tree"));
}

TEST_F(CliTest, GenerateErrors) {
  EXPECT_EQ(Cli({"generate", "--model", P("model.ckpt"), "--table", kPhoenix, "--constraint",
                 "A("}).code,
            kExitData);
  CliRun bad_table = Cli({"generate", "--model", P("model.ckpt"), "--table", "{not json"});
  EXPECT_EQ(bad_table.code, kExitData);
  EXPECT_EQ(Json::parse(bad_table.err)["error"], "format_error");
  // More states than words allowed.
  CliRun infeasible = Cli({"generate", "--model", P("model.ckpt"), "--table", kPhoenix,
                        "--constraint", "ABCDEFGHIJ", "--max-len", "6"});
  EXPECT_EQ(infeasible.code, kExitData);
  EXPECT_EQ(Json::parse(infeasible.err)["error"], "no_feasible_output");
}

TEST_F(CliTest, InferPrintsOneLetterPerToken) {
  CliRun r = Cli({"infer", "--model", P("model.ckpt"), "--table", kPhoenix, "--text",
               "the phoenix is a french pub ."});
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<std::string> lines = Lines(r.out);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0].size(), 7u);
  for (char c : lines[0]) EXPECT_TRUE(c >= 'A' && c <= 'T');
}

TEST_F(CliTest, ForecastModes) {
  CliRun g = Cli({"forecast", "--model", P("model.ckpt"), "--constraint", ".*", "--global", "5",
               "--seed", "2", "--data", P("test.jsonl"), "--threads", "2"});
  ASSERT_EQ(g.code, 0) << g.err;
  std::vector<std::string> lines = Lines(g.out);
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines.back(), "feasible 5/5");
  EXPECT_EQ(Cli({"forecast", "--model", P("model.ckpt"), "--constraint", ".*", "--global", "5",
                 "--seed", "2", "--data", P("test.jsonl"), "--threads", "1"})
                .out,
            g.out);

  CliRun r = Cli({"forecast", "--json", "--model", P("model.ckpt"), "--range",
               "food=french|italian|chinese", "--table", kPhoenix});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["tuples"].size(), 3u);

  EXPECT_EQ(Cli({"forecast", "--model", P("model.ckpt"), "--global", "3", "--range", "a=1",
                 "--data", P("test.jsonl")})
                .code,
            kExitUsage);
  EXPECT_EQ(Cli({"forecast", "--model", P("model.ckpt"), "--global", "3"}).code, kExitUsage);
  EXPECT_EQ(Cli({"forecast", "--model", P("model.ckpt")}).code, kExitUsage);
}

TEST_F(CliTest, AlignAndEvaluate) {
  CliRun a = Cli({"align", "--json", "--model", P("model.ckpt"), "--data", P("test.jsonl"),
               "--n", "10"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NO_THROW(Json::parse(a.out));
  CliRun e = Cli({"evaluate", "--json", "--model", P("model.ckpt"), "--data", P("test.jsonl")});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(Json::parse(e.out)["count"], 20);
}

TEST_F(CliTest, ExportAndRun) {
  CliRun x = Cli({"export", "--model", P("model.ckpt"), "--constraint", "B.*", "--out",
               P("b.zip")});
  ASSERT_EQ(x.code, 0) << x.err;
  EXPECT_EQ(LoadBundle(P("b.zip")).regex, "B.*");

  CliRun one = Cli({"run-export", "--bundle", P("b.zip"), "--input", kPhoenix});
  ASSERT_EQ(one.code, 0) << one.err;
  CliRun direct = Cli({"generate", "--model", P("model.ckpt"), "--table", kPhoenix,
                    "--constraint", "B.*"});
  std::vector<std::string> d = Lines(direct.out);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(one.out, d[1] + "\t" + d[0] + "\n");

  CliRun ds = Cli({"run-export", "--json", "--bundle", P("b.zip"), "--input", P("test.jsonl")});
  ASSERT_EQ(ds.code, 0) << ds.err;
  Json j = Json::parse(ds.out);
  EXPECT_EQ(j["outputs"].size(), 20u);
  EXPECT_EQ(j["metrics"]["constraint_satisfaction_rate"], 1.0);
  CliRun ev = Cli({"evaluate", "--json", "--model", P("model.ckpt"), "--data", P("test.jsonl"),
                "--constraint", "B.*"});
  EXPECT_EQ(Json::parse(ev.out), j["metrics"]);

  std::string bytes = ReadFileBytes(P("b.zip"));
  bytes[bytes.size() / 2] ^= 0x40;
  WriteFileBytes(P("bad.zip"), bytes);
  CliRun bad = Cli({"run-export", "--bundle", P("bad.zip"), "--input", kPhoenix});
  EXPECT_EQ(bad.code, kExitData);
  EXPECT_EQ(Cli({"export", "--model", P("model.ckpt"), "--constraint", "", "--out",
                 P("c.zip")}).code,
            kExitData);
}

}  // namespace
}  // namespace ctrlgen

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

#include "ctrlgen/server/server.h"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "ctrlgen/constraint/dfa.h"
#include "ctrlgen/constraint/graph_view.h"
#include "ctrlgen/constraint/merge.h"
#include "ctrlgen/constraint/regex.h"
#include "ctrlgen/core/errors.h"
#include "ctrlgen/core/random.h"
#include "ctrlgen/core/tokenize.h"
#include "ctrlgen/data/table_dataset.h"
#include "ctrlgen/decode/beam_search.h"
#include "ctrlgen/export/bundle.h"
#include "ctrlgen/forecast/forecast.h"
#include "ctrlgen/infer/crf.h"
#include "ctrlgen/infer/inference_network.h"
#include "ctrlgen/model/checkpoint.h"

namespace ctrlgen {
namespace {

constexpr int kMaxBeam = 64;
constexpr int kMaxLen = 200;
constexpr int kMaxForecast = 10000;

class NotFound : public Error {
 public:
  explicit NotFound(const std::string& message) : Error("not_found", message) {}
};

class MethodNotAllowed : public Error {
 public:
  explicit MethodNotAllowed(const std::string& message)
      : Error("method_not_allowed", message) {}
};

Json ErrorBody(const std::string& code, const std::string& detail) {
  return Json{{"error", code}, {"detail", detail}};
}

std::string NowIso8601() {
  auto now = std::chrono::system_clock::now();
  std::time_t secs = std::chrono::system_clock::to_time_t(now);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

Json ParseBody(const std::string& body) {
  if (body.empty()) return Json::object();
  Json j;
  try {
    j = Json::parse(body);
  } catch (const Json::exception& e) {
    throw FormatError(std::string("request body is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("request body must be a JSON object");
  return j;
}

int IntField(const Json& j, const char* key, int fallback, int lo, int hi) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  if (!j[key].is_number_integer()) {
    throw SchemaError(std::string("'") + key + "' must be an integer");
  }
  auto v = j[key].get<std::int64_t>();
  if (v < lo || v > hi) {
    throw DomainError(std::string("'") + key + "' must be in " + std::to_string(lo) +
                      ".." + std::to_string(hi));
  }
  return static_cast<int>(v);
}

std::string StringField(const Json& j, const char* key) {
  if (!j.contains(key)) throw SchemaError(std::string("missing '") + key + "'");
  if (!j[key].is_string()) throw SchemaError(std::string("'") + key + "' must be a string");
  return j[key].get<std::string>();
}

const Json& Required(const Json& j, const char* key) {
  if (!j.contains(key)) throw SchemaError(std::string("missing '") + key + "'");
  return j[key];
}

std::optional<std::string> QueryValue(const std::multimap<std::string, std::string>& q,
                                      const std::string& key) {
  auto it = q.find(key);
  if (it == q.end()) return std::nullopt;
  return it->second;
}

int QueryInt(const std::multimap<std::string, std::string>& q, const std::string& key,
             std::optional<int> fallback, int lo, int hi) {
  auto s = QueryValue(q, key);
  if (!s) {
    if (!fallback) throw SchemaError("missing query parameter '" + key + "'");
    return *fallback;
  }
  long long v = 0;
  auto [end, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
  if (ec != std::errc() || end != s->data() + s->size()) {
    throw SchemaError("query parameter '" + key + "' must be an integer");
  }
  if (v < lo || v > hi) {
    throw DomainError("query parameter '" + key + "' must be in " + std::to_string(lo) +
                      ".." + std::to_string(hi));
  }
  return static_cast<int>(v);
}

std::uint64_t SeedField(const Json& j) {
  if (!j.contains("seed") || j["seed"].is_null()) return 0;
  if (!j["seed"].is_number_unsigned()) throw SchemaError("'seed' must be a non-negative integer");
  return j["seed"].get<std::uint64_t>();
}

}  // namespace

int StatusForError(const std::string& code) {
  if (code == "not_found") return 404;
  if (code == "method_not_allowed") return 405;
  if (code == "no_feasible_output") return 422;
  if (code == "io_error" || code == "integrity_error" || code == "numerical_error" ||
      code == "internal") {
    return 500;
  }
  return 400;
}

ApiService::ApiService(ModelParams params, std::vector<Example> test_set,
                       std::string export_dir, std::string history_path,
                       int decode_threads)
    : params_(std::move(params)),
      test_set_(std::move(test_set)),
      export_dir_(std::move(export_dir)),
      history_path_(std::move(history_path)),
      decode_threads_(decode_threads) {
  if (history_path_.empty() || !std::filesystem::exists(history_path_)) return;
  std::ifstream in(history_path_);
  if (!in) throw IoError("cannot read history file '" + history_path_ + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      Json j = Json::parse(line);
      history_.push_back({StringField(j, "timestamp"), StringField(j, "regex")});
    } catch (const std::exception& e) {
      throw FormatError(history_path_ + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::vector<HistoryEntry> ApiService::History() const {
  std::lock_guard<std::mutex> lock(history_mu_);
  return history_;
}

ApiResponse ApiService::Handle(const std::string& method, const std::string& path,
                               const std::multimap<std::string, std::string>& query,
                               const std::string& body) {
  try {
    return {200, Dispatch(method, path, query, body)};
  } catch (const Error& e) {
    return {StatusForError(e.code()), ErrorBody(e.code(), e.what())};
  } catch (const std::bad_alloc&) {
    return {500, ErrorBody("internal", "out of memory")};
  } catch (const std::exception& e) {
    return {500, ErrorBody("internal", e.what())};
  }
}

Json ApiService::Dispatch(const std::string& method, const std::string& path,
                          const Query& query, const std::string& body) {
  const bool get = method == "GET";
  const bool post = method == "POST";
  auto only = [&](bool ok) {
    if (!ok) throw MethodNotAllowed(method + " not allowed on " + path);
  };
  if (path == "/api/example") return only(get), GetExample(query);
  if (path == "/api/sample") return only(get), GetSample(query);
  if (path == "/api/generate") return only(post), PostGenerate(ParseBody(body));
  if (path == "/api/infer") return only(post), PostInfer(ParseBody(body));
  if (path == "/api/constraint/parse") return only(post), PostParse(ParseBody(body));
  if (path == "/api/constraint/merge") return only(post), PostMerge(ParseBody(body));
  if (path == "/api/constraint/history") {
    only(get || post);
    return get ? GetHistory() : PostHistory(ParseBody(body));
  }
  if (path == "/api/forecast/global") return only(post), PostForecastGlobal(ParseBody(body));
  if (path == "/api/forecast/range") return only(post), PostForecastRange(ParseBody(body));
  if (path == "/api/align") return only(get), GetAlign(query);
  if (path == "/api/export") return only(post), PostExport(ParseBody(body));
  throw NotFound("no endpoint " + path);
}

namespace {

std::optional<ConstraintDfa> OptionalDfa(const Json& req, int num_states) {
  if (!req.contains("constraint") || req["constraint"].is_null()) return std::nullopt;
  if (!req["constraint"].is_string()) throw SchemaError("'constraint' must be a string");
  std::string re = req["constraint"].get<std::string>();
  return Compile(ParseRegex(re, ControlAlphabet(num_states)), num_states);
}

DecodeOptions DecodeFromRequest(const Json& req) {
  DecodeOptions d;
  d.beam_width = IntField(req, "beam", d.beam_width, 1, kMaxBeam);
  d.max_len = IntField(req, "max_len", d.max_len, 1, kMaxLen);
  if (req.contains("tree")) {
    if (!req["tree"].is_boolean()) throw SchemaError("'tree' must be a boolean");
    d.capture_tree = req["tree"].get<bool>();
  }
  return d;
}

Json ExampleWithId(const Example& e, int id) {
  Json j = ExampleToJson(e);
  Json out = {{"id", id}};
  out.update(j);
  return out;
}

}  // namespace

Json ApiService::GetExample(const Query& query) const {
  int id = QueryInt(query, "id", 0, 0, std::numeric_limits<int>::max());
  if (id >= static_cast<int>(test_set_.size())) {
    throw NotFound("example " + std::to_string(id) + " out of range (test set has " +
                   std::to_string(test_set_.size()) + ")");
  }
  return ExampleWithId(test_set_[id], id);
}

Json ApiService::GetSample(const Query& query) const {
  int size = static_cast<int>(test_set_.size());
  if (size == 0) throw NotFound("test set is empty");
  int count = QueryInt(query, "count", 1, 1, size);
  int seed = QueryInt(query, "seed", 0, 0, std::numeric_limits<int>::max());
  std::vector<int> ids(size);
  std::iota(ids.begin(), ids.end(), 0);
  Rng rng(static_cast<std::uint64_t>(seed));
  rng.Shuffle(ids);
  Json out = Json::array();
  for (int i = 0; i < count; ++i) out.push_back(ExampleWithId(test_set_[ids[i]], ids[i]));
  return Json{{"examples", out}};
}

Json ApiService::PostGenerate(const Json& req) const {
  DataTable table = TableFromJson(Required(req, "table"));
  DecodeOptions d = DecodeFromRequest(req);
  std::optional<ConstraintDfa> dfa = OptionalDfa(req, params_.num_states());
  std::vector<ForcedStep> prefix;
  if (req.contains("forced_prefix") && !req["forced_prefix"].is_null()) {
    const Json& fp = req["forced_prefix"];
    if (!fp.is_array()) throw SchemaError("'forced_prefix' must be an array");
    ControlAlphabet alphabet(params_.num_states());
    for (const Json& step : fp) {
      if (!step.is_object()) {
        throw SchemaError("forced_prefix entries are {\"state\": letter, \"word\": token}");
      }
      std::string letter = StringField(step, "state");
      std::string word = StringField(step, "word");
      auto z = letter.size() == 1 ? alphabet.StateOf(letter[0]) : std::nullopt;
      if (!z) throw DomainError("'" + letter + "' is not a control-state letter");
      if (!params_.words().Contains(word)) {
        throw DomainError("forced word '" + word + "' is not in the vocabulary");
      }
      prefix.emplace_back(*z, params_.words().Lookup(word));
    }
  }
  GenerationResult r;
  if (!prefix.empty()) {
    r = ForcedGenerate(params_, table, prefix, dfa ? &*dfa : nullptr, d);
  } else if (dfa) {
    r = ConstrainedGenerate(params_, table, *dfa, d);
  } else {
    r = FreeGenerate(params_, table, d);
  }
  if (r.tree) {
    int keep = IntField(req, "tree_keep", 0, 0, 1000);
    if (keep > 0) TrimBeamTree(*r.tree, static_cast<std::size_t>(keep));
  }
  return GenerationToJson(r);
}

Json ApiService::PostInfer(const Json& req) const {
  DataTable table = TableFromJson(Required(req, "table"));
  std::vector<std::string> tokens = Tokenize(StringField(req, "text"));
  if (tokens.empty()) throw DomainError("'text' has no tokens");
  CrfPotentials pot = ComputePotentials(params_, table, tokens);
  ControlStateSeq states = Viterbi(pot);
  Eigen::MatrixXd marg = Marginals(pot);
  Json confidences = Json::array();
  Json marginals = Json::array();
  for (int t = 0; t < pot.length(); ++t) {
    confidences.push_back(marg(t, states.ids()[t]));
    Json row = Json::array();
    for (int k = 0; k < pot.num_states(); ++k) row.push_back(marg(t, k));
    marginals.push_back(std::move(row));
  }
  return Json{{"tokens", tokens},
              {"states", StatesToJson(states)},
              {"confidences", confidences},
              {"marginals", marginals}};
}

Json ApiService::PostParse(const Json& req) const {
  int k = params_.num_states();
  ConstraintAst ast;
  if (req.contains("graph") && !req.contains("regex")) {
    ast = FromGraph(GraphFromJson(req["graph"]));
  } else {
    ast = ParseRegex(StringField(req, "regex"), ControlAlphabet(k));
  }
  ConstraintDfa dfa = Compile(ast, k);
  int accepting = static_cast<int>(
      std::count(dfa.accepting().begin(), dfa.accepting().end(), true));
  return Json{{"regex", RenderRegex(ast)},
              {"ast", AstToJson(ast)},
              {"graph", GraphToJson(ToGraph(ast))},
              {"dfa_summary",
               {{"alphabet_size", dfa.alphabet_size()},
                {"num_states", dfa.num_states()},
                {"num_accepting", accepting},
                {"language_empty", dfa.LanguageEmpty()}}}};
}

Json ApiService::PostMerge(const Json& req) const {
  const Json& list = Required(req, "state_strings");
  if (!list.is_array()) throw SchemaError("'state_strings' must be an array");
  ControlAlphabet alphabet(params_.num_states());
  std::vector<ControlStateSeq> seqs;
  for (const Json& s : list) {
    if (!s.is_string()) throw SchemaError("state_strings entries must be strings");
    seqs.push_back(ControlStateSeq::FromLetters(s.get<std::string>(), alphabet));
  }
  ConstraintAst ast = MergeExamples(seqs);
  return Json{{"regex", RenderRegex(ast)}, {"graph", GraphToJson(ToGraph(ast))}};
}

Json ApiService::GetHistory() const {
  Json out = Json::array();
  for (const HistoryEntry& h : History()) {
    out.push_back({{"timestamp", h.timestamp}, {"regex", h.regex}});
  }
  return Json{{"history", out}};
}

Json ApiService::PostHistory(const Json& req) {
  std::string regex = StringField(req, "regex");
  ParseRegex(regex, ControlAlphabet(params_.num_states()));
  std::lock_guard<std::mutex> lock(history_mu_);
  HistoryEntry entry{NowIso8601(), regex};
  if (!history_path_.empty()) {
    std::error_code ec;
    auto parent = std::filesystem::path(history_path_).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream out(history_path_, std::ios::app);
    out << Json{{"timestamp", entry.timestamp}, {"regex", entry.regex}}.dump() << "\n";
    out.flush();
    if (!out) throw IoError("cannot append to history file '" + history_path_ + "'");
  }
  history_.push_back(entry);
  return Json{{"index", history_.size() - 1},
              {"timestamp", entry.timestamp},
              {"regex", entry.regex}};
}

Json ApiService::PostForecastGlobal(const Json& req) const {
  ForecastOptions o;
  o.decode = DecodeFromRequest(req);
  o.decode.capture_tree = false;
  o.threads = decode_threads_;
  std::optional<ConstraintDfa> dfa = OptionalDfa(req, params_.num_states());
  int n = IntField(req, "n", 20, 1, kMaxForecast);
  GlobalForecast g =
      ForecastGlobal(params_, dfa ? &*dfa : nullptr, test_set_, n, SeedField(req), o);
  Json tuples = Json::array();
  int feasible = 0;
  for (const ForecastTuple& t : g.tuples) {
    tuples.push_back(TupleToJson(t));
    feasible += t.feasible();
  }
  return Json{{"tuples", tuples},
              {"feasible", feasible},
              {"infeasible", static_cast<int>(g.tuples.size()) - feasible},
              {"heatmap", HeatmapToJson(g.heatmap)}};
}

Json ApiService::PostForecastRange(const Json& req) const {
  ForecastOptions o;
  o.decode = DecodeFromRequest(req);
  o.decode.capture_tree = false;
  o.threads = decode_threads_;
  std::optional<ConstraintDfa> dfa = OptionalDfa(req, params_.num_states());
  DataTable base = TableFromJson(Required(req, "base_table"));
  const Json& spec = Required(req, "ranges");
  ValueRanges ranges;
  if (spec.is_string()) {
    ranges = ParseRangeSpec(spec.get<std::string>());
  } else if (spec.is_object()) {
    for (const auto& [field, values] : spec.items()) {
      std::vector<std::string> vs;
      if (values.is_string()) {
        ValueRanges one = ParseRangeSpec(field + "=" + values.get<std::string>());
        vs = one.at(0).second;
      } else if (values.is_array()) {
        for (const Json& v : values) {
          if (v.is_string()) {
            vs.push_back(v.get<std::string>());
          } else if (v.is_number_integer()) {
            vs.push_back(std::to_string(v.get<std::int64_t>()));
          } else {
            throw SchemaError("range values must be strings or integers");
          }
        }
      } else {
        throw SchemaError("range for '" + field + "' must be a list or a span string");
      }
      ranges.emplace_back(field, std::move(vs));
    }
  } else {
    throw SchemaError("'ranges' must be a spec string or an object");
  }
  std::vector<ForecastTuple> tuples = ForecastRange(params_, dfa ? &*dfa : nullptr, base, ranges, o);
  Json out = Json::array();
  for (const ForecastTuple& t : tuples) out.push_back(TupleToJson(t));
  return Json{{"tuples", out},
              {"heatmap", HeatmapToJson(BuildHeatmap(tuples, params_.num_states()))}};
}

Json ApiService::GetAlign(const Query& query) const {
  int size = static_cast<int>(test_set_.size());
  if (size == 0) throw NotFound("test set is empty");
  int n = QueryInt(query, "n", std::min(size, 100), 1, size);
  std::vector<Example> sample(test_set_.begin(), test_set_.begin() + n);
  return AlignmentSummaryToJson(SummarizeAlignment(params_, sample));
}

Json ApiService::PostExport(const Json& req) const {
  std::string regex = StringField(req, "constraint");
  int k = params_.num_states();
  ConstraintDfa dfa = Compile(ParseRegex(regex, ControlAlphabet(k)), k);
  std::string bytes = SerializeBundle(params_, dfa, regex);
  std::string hash = ParseBundle(bytes).content_hash;
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(export_dir_, ec);
  fs::path final_path = fs::path(export_dir_) / ("bundle-" + hash.substr(0, 16) + ".zip");
  std::ostringstream tmp_name;
  tmp_name << final_path.string() << ".tmp" << std::this_thread::get_id();
  WriteFileBytes(tmp_name.str(), bytes);
  fs::rename(tmp_name.str(), final_path, ec);
  if (ec) throw IoError("cannot write bundle '" + final_path.string() + "': " + ec.message());
  return Json{{"bundle_path", fs::absolute(final_path).string()},
              {"content_hash", hash},
              {"regex", regex}};
}

std::unique_ptr<ApiService> LoadService(const ServerConfig& config) {
  ModelParams params = LoadCheckpoint(config.checkpoint_path);
  std::vector<std::string> warnings;
  std::vector<Example> data = LoadExamples(config.dataset_path, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  std::string history = config.history_path;
  if (history.empty()) {
    history = (std::filesystem::path(config.export_dir) / "history.jsonl").string();
  }
  return std::make_unique<ApiService>(std::move(params), std::move(data), config.export_dir,
                                      history, config.decode_threads);
}

HttpServer::HttpServer(ApiService& service, std::string cors_origin)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  // httplib's default also sets SO_REUSEPORT, which would let a second
  // server silently share a busy port.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes),
               sizeof(yes));
  });
  server_->set_default_headers({{"Access-Control-Allow-Origin", cors_origin},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    std::multimap<std::string, std::string> query(req.params.begin(), req.params.end());
    ApiResponse r = service_.Handle(req.method, req.path, query, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server_->Get(R"(/api/.*)", route);
  server_->Post(R"(/api/.*)", route);
  server_->Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  server_->set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    std::string code = res.status == 404 ? "not_found" : "http_" + std::to_string(res.status);
    res.set_content(ErrorBody(code, req.method + " " + req.path).dump(), "application/json");
  });
}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Bind(const std::string& host, int port) {
  if (port == 0) {
    int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw IoError("cannot bind " + host + " to any port");
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw IoError("cannot bind " + host + ":" + std::to_string(port) +
                  " (port busy or not permitted)");
  }
  return port;
}

void HttpServer::Listen() { server_->listen_after_bind(); }

void HttpServer::Stop() {
  if (server_) server_->stop();
}

void Serve(const ServerConfig& config) {
  std::unique_ptr<ApiService> service = LoadService(config);
  HttpServer http(*service, config.cors_origin);
  int port = http.Bind(config.host, config.port);
  std::cerr << "listening on http://" << config.host << ":" << port << "\n";
  http.Listen();
}

}  // namespace ctrlgen

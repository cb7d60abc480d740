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

// REST backend for the interactive client: generation, inference,
// constraint editing, forecasting and export over one loaded model.
#ifndef CTRLGEN_SERVER_SERVER_H_
#define CTRLGEN_SERVER_SERVER_H_

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ctrlgen/core/codec.h"
#include "ctrlgen/model/params.h"

namespace httplib {
class Server;
}

namespace ctrlgen {

struct ServerConfig {
  std::string checkpoint_path;
  // JSON lines of examples, or a CSV of (mr, ref) rows.
  std::string dataset_path;
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 binds any free port
  std::string export_dir = ".";
  // Defaults to <export_dir>/history.jsonl.
  std::string history_path;
  std::string cors_origin = "*";
  // Worker threads for forecast decodes; 0 picks the hardware count.
  int decode_threads = 0;
};

struct ApiResponse {
  int status = 200;
  Json body;
};

// HTTP status for an error code: 404 not_found, 405 method_not_allowed,
// 422 no_feasible_output, 500 for io/integrity/numerical/internal failures,
// 400 for the remaining client errors.
int StatusForError(const std::string& code);

struct HistoryEntry {
  std::string timestamp;  // ISO 8601, UTC
  std::string regex;
};

// Transport-free request handling. Params and test set are immutable after
// construction; the constraint history is the only mutable state and every
// append is serialized.
class ApiService {
 public:
  ApiService(ModelParams params, std::vector<Example> test_set, std::string export_dir,
             std::string history_path, int decode_threads = 0);

  // Never throws: failures come back as {"error": code, "detail": message}
  // with a 4xx/5xx status.
  ApiResponse Handle(const std::string& method, const std::string& path,
                     const std::multimap<std::string, std::string>& query,
                     const std::string& body);

  const ModelParams& params() const { return params_; }
  std::vector<HistoryEntry> History() const;

 private:
  using Query = std::multimap<std::string, std::string>;

  Json Dispatch(const std::string& method, const std::string& path, const Query& query,
                const std::string& body);
  Json GetExample(const Query& query) const;
  Json GetSample(const Query& query) const;
  Json PostGenerate(const Json& req) const;
  Json PostInfer(const Json& req) const;
  Json PostParse(const Json& req) const;
  Json PostMerge(const Json& req) const;
  Json PostHistory(const Json& req);
  Json GetHistory() const;
  Json PostForecastGlobal(const Json& req) const;
  Json PostForecastRange(const Json& req) const;
  Json GetAlign(const Query& query) const;
  Json PostExport(const Json& req) const;

  const ModelParams params_;
  const std::vector<Example> test_set_;
  const std::string export_dir_;
  const std::string history_path_;
  const int decode_threads_;

  mutable std::mutex history_mu_;
  std::vector<HistoryEntry> history_;
};

// Loads checkpoint and dataset. IoError/FormatError/SchemaError propagate
// so callers can report a startup failure.
std::unique_ptr<ApiService> LoadService(const ServerConfig& config);

// httplib front end. Routes GET/POST/OPTIONS under /api/ to the service and
// adds CORS headers.
class HttpServer {
 public:
  HttpServer(ApiService& service, std::string cors_origin);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Returns the bound port. IoError when the address cannot be bound.
  int Bind(const std::string& host, int port);
  // Blocks until Stop().
  void Listen();
  void Stop();

 private:
  ApiService& service_;
  std::unique_ptr<httplib::Server> server_;
};

// LoadService, Bind and Listen. Blocks.
void Serve(const ServerConfig& config);

}  // namespace ctrlgen

#endif  // CTRLGEN_SERVER_SERVER_H_

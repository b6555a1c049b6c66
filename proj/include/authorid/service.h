// Copyright 2026 The Authorid Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The /v1 HTTP API. Api turns a request into a status and a JSON body with
// no sockets involved; Serve binds it to an HTTP listener.

#ifndef AUTHORID_SERVICE_H_
#define AUTHORID_SERVICE_H_

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "json.hpp"

#include "authorid/loop.h"
#include "authorid/store.h"

namespace authorid {

struct ApiRequest {
  std::string method;  // "GET" or "POST"
  std::string path;    // without the query string
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

struct ServiceConfig {
  LoopConfig loop;
  KernelSpec kernel = KernelSpec();
  std::size_t default_page_size = 50;
  std::size_t max_page_size = 500;
  std::function<std::string()> clock = UtcNow;
};

class Api {
 public:
  // Resumes from the store's serving snapshot, review items and verdict log
  // when a snapshot exists; otherwise the first POST /v1/train builds one.
  Api(Store& store, ServiceConfig config = {});

  ApiResponse Handle(const ApiRequest& request);

  std::shared_ptr<ReinforcementLoop> loop() const;

 private:
  ApiResponse PostTexts(const nlohmann::json& body);
  ApiResponse PostClassify(const nlohmann::json& body);
  ApiResponse GetQueue(const std::map<std::string, std::string>& query);
  ApiResponse PostVerdict(const std::string& item_id,
                          const nlohmann::json& body);
  ApiResponse PostTrain(const nlohmann::json& body);
  ApiResponse GetStatus();

  std::shared_ptr<ReinforcementLoop> RequireLoop() const;
  std::shared_ptr<ReinforcementLoop> MakeLoop(SnapshotBundle bundle,
                                              bool resume);
  std::vector<HeldOutText> HeldOut(const SnapshotBundle& bundle) const;
  LoopHooks Hooks();
  GroupLexicon WorkingLexicon() const;

  Store& store_;
  const ServiceConfig config_;

  mutable std::mutex lexicon_mu_;
  std::optional<GroupLexicon> lexicon_;
  std::vector<FallbackLexicon> fallbacks_;

  mutable std::mutex loop_mu_;
  std::shared_ptr<ReinforcementLoop> loop_;
  std::mutex bootstrap_mu_;
};

// HTTP binding of an Api. Bind with port 0 picks a free port.
class HttpService {
 public:
  explicit HttpService(Api& api);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  // Returns the bound port; throws StorageError when binding fails.
  int Bind(const std::string& host, int port);
  // Blocks until Stop is called from another thread.
  void Listen();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Blocks serving `api` on host:port until the process is stopped.
void Serve(Api& api, const std::string& host, int port);

}  // namespace authorid

#endif  // AUTHORID_SERVICE_H_

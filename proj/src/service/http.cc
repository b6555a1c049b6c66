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

#include <cstdio>

#include "authorid/errors.h"
#include "authorid/service.h"

#include "httplib.h"

namespace authorid {

struct HttpService::Impl {
  httplib::Server server;
};

HttpService::HttpService(Api& api) : impl_(std::make_unique<Impl>()) {
  auto handler = [&api](const httplib::Request& req, httplib::Response& res) {
    ApiRequest request{req.method, req.path, {}, req.body};
    for (const auto& [key, value] : req.params) {
      request.query.emplace(key, value);
    }
    const ApiResponse response = api.Handle(request);
    res.status = response.status;
    res.set_content(response.body.dump(), "application/json");
  };
  httplib::Server& server = impl_->server;
  server.Get(R"(/v1/.*)", handler);
  server.Post(R"(/v1/.*)", handler);
  server.set_error_handler([](const httplib::Request& req,
                              httplib::Response& res) {
    if (!res.body.empty()) return;
    const char* code = res.status == 404 ? "not_found" : "bad_request";
    res.set_content(
        nlohmann::json{{"error",
                        {{"code", code},
                         {"message", "no route for " + req.method + " " +
                                         req.path}}}}
            .dump(),
        "application/json");
  });
}

HttpService::~HttpService() = default;

int HttpService::Bind(const std::string& host, int port) {
  httplib::Server& server = impl_->server;
  const int bound =
      port == 0 ? server.bind_to_any_port(host)
                : (server.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) {
    throw StorageError("cannot listen on " + host + ":" + std::to_string(port));
  }
  return bound;
}

void HttpService::Listen() { impl_->server.listen_after_bind(); }

void HttpService::Stop() { impl_->server.stop(); }

void Serve(Api& api, const std::string& host, int port) {
  HttpService service(api);
  const int bound = service.Bind(host, port);
  std::fprintf(stderr, "authorid: serving on %s:%d\n", host.c_str(), bound);
  service.Listen();
}

}  // namespace authorid

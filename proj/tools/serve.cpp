// Copyright 2026 The tsrank Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "serve.hpp"

#include <csignal>
#include <thread>

#include <json.hpp>
#include <spdlog/spdlog.h>

namespace tsrank::serve {
namespace {

using Json = nlohmann::ordered_json;

void send_error(httplib::Response& res, int status, const std::string& code,
                const std::string& message) {
  res.status = status;
  res.set_content(Json{{"error", {{"code", code}, {"message", message}}}}.dump(),
                  "application/json");
}

}  // namespace

int http_status(tsrank_status status) noexcept {
  switch (status) {
    case TSRANK_OK: return 200;
    case TSRANK_ERR_USAGE:
    case TSRANK_ERR_DATA: return 400;
    case TSRANK_ERR_BACKEND: return 503;
    case TSRANK_ERR_INTERNAL: return 500;
  }
  return 500;
}

void register_routes(httplib::Server& server, const tsrank_engine* engine) {
  server.Get("/healthz", [engine](const httplib::Request&, httplib::Response& res) {
    char* config = nullptr;
    Json body{{"status", "ok"}, {"version", tsrank_version()}};
    if (tsrank_engine_config(engine, &config) == TSRANK_OK) {
      body["backend"] = Json::parse(config).at("backend");
      tsrank_string_free(config);
    }
    res.set_content(body.dump(), "application/json");
  });

  server.Post("/rank", [engine](const httplib::Request& req, httplib::Response& res) {
    char* out = nullptr;
    const tsrank_status status = tsrank_engine_rank(engine, req.body.c_str(), &out);
    if (status != TSRANK_OK) {
      send_error(res, http_status(status), tsrank_last_error_kind(), tsrank_last_error());
      return;
    }
    res.set_content(out, "application/json");
    tsrank_string_free(out);
  });

  server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
    spdlog::info(R"({{"method":"{}","path":"{}","status":{},"remote":"{}","bytes_in":{}}})",
                 req.method, req.path, res.status, req.remote_addr, req.body.size());
  });
}

int run(const tsrank_engine* engine, const std::string& host, int port) {
  httplib::Server server;
  register_routes(server, engine);
  if (!server.bind_to_port(host, port)) {
    spdlog::error("cannot bind {}:{}", host, port);
    return TSRANK_ERR_USAGE;
  }
  spdlog::info("listening on {}:{}", host, port);
  std::thread worker([&server] { server.listen_after_bind(); });

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  int received = 0;
  sigwait(&signals, &received);
  spdlog::info("signal {} received, shutting down", received);
  server.stop();
  worker.join();
  return TSRANK_OK;
}

}  // namespace tsrank::serve

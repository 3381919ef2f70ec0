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

#include <doctest.h>

#include <string>

#include <httplib.h>
#include <json.hpp>

#include "fake_server.hpp"
#include "serve.hpp"

using nlohmann::json;

namespace {

struct Fixture {
  tsrank_engine* engine = nullptr;
  tsrank::testing::FakeServer server;

  explicit Fixture(const char* config = nullptr) {
    REQUIRE(tsrank_engine_create(config, &engine) == TSRANK_OK);
    tsrank::serve::register_routes(server.server(), engine);
    server.start();
  }
  ~Fixture() {
    server.stop();
    tsrank_engine_destroy(engine);
  }

  httplib::Client client() const { return httplib::Client(server.url()); }
};

const char* kList = R"({"query_id":"q1","context":"fever and cough",
  "candidates":[{"id":"a","text":"Chest X-ray"},{"id":"b","text":"Blood culture"}]})";

}  // namespace

TEST_CASE("status mapping") {
  using tsrank::serve::http_status;
  CHECK(http_status(TSRANK_OK) == 200);
  CHECK(http_status(TSRANK_ERR_USAGE) == 400);
  CHECK(http_status(TSRANK_ERR_DATA) == 400);
  CHECK(http_status(TSRANK_ERR_BACKEND) == 503);
  CHECK(http_status(TSRANK_ERR_INTERNAL) == 500);
}

TEST_CASE("healthz reports version and backend") {
  Fixture f;
  auto res = f.client().Get("/healthz");
  REQUIRE(res);
  CHECK(res->status == 200);
  const auto body = json::parse(res->body);
  CHECK(body["version"] == tsrank_version());
  CHECK(body["backend"] == "mock");
}

TEST_CASE("rank returns an outcome") {
  Fixture f;
  auto res = f.client().Post("/rank", kList, "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  const auto body = json::parse(res->body);
  CHECK(body["query_id"] == "q1");
  CHECK(body["final_order"].size() == 2);
  CHECK(body.contains("provenance"));
}

TEST_CASE("malformed bodies are client errors") {
  Fixture f;
  auto client = f.client();
  for (const char* bad : {"{", "[]", R"({"query_id":"q","context":"c","candidates":[]})"}) {
    auto res = client.Post("/rank", bad, "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    const auto body = json::parse(res->body);
    CHECK(body["error"]["code"].is_string());
    CHECK_FALSE(body["error"]["message"].get<std::string>().empty());
  }
  auto missing = client.Get("/nowhere");
  REQUIRE(missing);
  CHECK(missing->status == 404);
}

TEST_CASE("backend outages map to 503") {
  Fixture f(R"({"backend":"remote","remote":{"base_url":"http://127.0.0.1:9","deadline_ms":300}})");
  auto res = f.client().Post("/rank", kList, "application/json");
  REQUIRE(res);
  CHECK(res->status == 503);
  CHECK(json::parse(res->body)["error"]["code"] == "backend_unavailable");
}

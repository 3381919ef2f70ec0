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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include <tsrank/tsrank.h>

using nlohmann::json;

namespace {

const std::string kFixtures = TSRANK_FIXTURE_DIR;
const std::string kCorpus = kFixtures + "/mock_corpus_200.jsonl";

struct Engine {
  tsrank_engine* handle = nullptr;
  explicit Engine(const char* config = nullptr) {
    REQUIRE(tsrank_engine_create(config, &handle) == TSRANK_OK);
  }
  ~Engine() { tsrank_engine_destroy(handle); }
};

struct Artifacts {
  tsrank_artifacts* handle = nullptr;
  ~Artifacts() { tsrank_artifacts_destroy(handle); }
  std::string get(const char* name) const {
    const char* text = tsrank_artifacts_get(handle, name);
    REQUIRE(text != nullptr);
    return text;
  }
};

std::string take(char* s) {
  std::string out = s;
  tsrank_string_free(s);
  return out;
}

const char* kList = R"({"query_id":"q1","context":"chest pain, troponin pending",
  "candidates":[{"id":"a","text":"ECG"},{"id":"b","text":"Troponin"},{"id":"c","text":"CT head"}],
  "relevant_id":"b"})";

}  // namespace

TEST_CASE("version and error slot") {
  CHECK(std::string(tsrank_version()).size() > 0);
  tsrank_engine* engine = nullptr;
  CHECK(tsrank_engine_create(R"({"batch":0})", &engine) == TSRANK_ERR_USAGE);
  CHECK(engine == nullptr);
  CHECK(std::string(tsrank_last_error_kind()) == "invalid_argument");
  CHECK(std::string(tsrank_last_error()).find("batch") != std::string::npos);

  CHECK(tsrank_engine_create(nullptr, &engine) == TSRANK_OK);
  CHECK(std::string(tsrank_last_error()).empty());
  tsrank_engine_destroy(engine);
  tsrank_engine_destroy(nullptr);

  CHECK(tsrank_engine_create(nullptr, nullptr) == TSRANK_ERR_USAGE);
}

TEST_CASE("the error slot is per thread") {
  tsrank_engine* engine = nullptr;
  CHECK(tsrank_engine_create("{bad", &engine) == TSRANK_ERR_USAGE);
  std::string other;
  std::thread([&] { other = tsrank_last_error(); }).join();
  CHECK(other.empty());
  CHECK_FALSE(std::string(tsrank_last_error()).empty());
}

TEST_CASE("rank one list") {
  Engine engine;
  char* out = nullptr;
  REQUIRE(tsrank_engine_rank(engine.handle, kList, &out) == TSRANK_OK);
  const auto outcome = json::parse(take(out));
  CHECK(outcome["query_id"] == "q1");
  CHECK(outcome["final_order"].size() == 3);
  CHECK(outcome["provenance"].is_string());

  CHECK(tsrank_engine_rank(engine.handle, "{", &out) == TSRANK_ERR_DATA);
  CHECK(tsrank_engine_rank(engine.handle, R"({"query_id":"q"})", &out) == TSRANK_ERR_DATA);
  CHECK(std::string(tsrank_last_error_kind()) == "data");
  CHECK(tsrank_engine_rank(nullptr, kList, &out) == TSRANK_ERR_USAGE);

  char* config = nullptr;
  REQUIRE(tsrank_engine_config(engine.handle, &config) == TSRANK_OK);
  CHECK(json::parse(take(config))["backend"] == "mock");
  CHECK(tsrank_engine_probe(engine.handle) == TSRANK_OK);
}

TEST_CASE("concurrent callers share one engine") {
  Engine engine(R"({"batch":4})");
  char* reference = nullptr;
  REQUIRE(tsrank_engine_rank(engine.handle, kList, &reference) == TSRANK_OK);
  const auto expected = json::parse(take(reference))["final_order"];
  std::vector<std::thread> threads;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 20; ++i) {
        char* out = nullptr;
        if (tsrank_engine_rank(engine.handle, kList, &out) != TSRANK_OK ||
            json::parse(take(out))["final_order"] != expected) {
          ++mismatches;
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  CHECK(mismatches.load() == 0);
}

TEST_CASE("evaluate produces the report artifacts") {
  Engine engine;
  Artifacts a;
  REQUIRE(tsrank_engine_evaluate(engine.handle, kCorpus.c_str(), &a.handle) == TSRANK_OK);
  CHECK(tsrank_artifacts_count(a.handle) == 3);
  const auto report = json::parse(a.get("report.json"));
  CHECK(report["report"]["query_count"] == 200);
  CHECK(report["threshold"] == 0.9);
  CHECK(report["config"]["batch"] == 1);

  const auto lines = a.get("outcomes.jsonl");
  CHECK(std::count(lines.begin(), lines.end(), '\n') == 200);
  CHECK(a.get("table.txt").find("Two-speed (T=0.90)") != std::string::npos);
  CHECK(tsrank_artifacts_get(a.handle, "missing") == nullptr);
  CHECK(tsrank_artifacts_name(a.handle, 99) == nullptr);
  CHECK(tsrank_artifacts_size(a.handle, 0) == std::string(tsrank_artifacts_text(a.handle, 0)).size());

  Artifacts missing;
  CHECK(tsrank_engine_evaluate(engine.handle, "/nonexistent.jsonl", &missing.handle) ==
        TSRANK_ERR_DATA);
  CHECK(missing.handle == nullptr);
}

TEST_CASE("evaluate is deterministic") {
  Engine first(R"({"workers":4,"batch":5})");
  Engine second(R"({"workers":4,"batch":5})");
  Artifacts a, b;
  REQUIRE(tsrank_engine_evaluate(first.handle, kCorpus.c_str(), &a.handle) == TSRANK_OK);
  REQUIRE(tsrank_engine_evaluate(second.handle, kCorpus.c_str(), &b.handle) == TSRANK_OK);
  CHECK(a.get("report.json") == b.get("report.json"));
  CHECK(a.get("outcomes.jsonl") == b.get("outcomes.jsonl"));
}

TEST_CASE("sweep") {
  Engine engine;
  const double ts[] = {0.0, 0.5, 1.0};
  Artifacts a;
  REQUIRE(tsrank_engine_sweep(engine.handle, kCorpus.c_str(), ts, 3, &a.handle) == TSRANK_OK);
  const auto sweep = json::parse(a.get("sweep.json"))["sweep"];
  REQUIRE(sweep.size() == 3);
  CHECK(sweep[0]["report"]["gate_trigger_rate_pct_avg"] == 100.0);
  CHECK(sweep[2]["report"]["gate_trigger_rate_pct_avg"] == 0.0);
  CHECK_FALSE(a.get("sweep.txt").empty());

  const double bad[] = {1.2};
  Artifacts none;
  CHECK(tsrank_engine_sweep(engine.handle, kCorpus.c_str(), bad, 1, &none.handle) ==
        TSRANK_ERR_USAGE);
  CHECK(tsrank_engine_sweep(engine.handle, kCorpus.c_str(), ts, 0, &none.handle) ==
        TSRANK_ERR_USAGE);
}

TEST_CASE("validate dataset") {
  Artifacts a;
  REQUIRE(tsrank_validate_dataset(kCorpus.c_str(), &a.handle) == TSRANK_OK);
  CHECK(json::parse(a.get("validation.json")).is_object());
}

TEST_CASE("curriculum from shares") {
  const auto shares = kFixtures + "/bucket_shares_5_epochs.json";
  Artifacts a;
  REQUIRE(tsrank_simulate_curriculum(shares.c_str(), nullptr, nullptr, nullptr, &a.handle) ==
          TSRANK_OK);
  const auto acc = json::parse(a.get("accounting.json"))["accounting"];
  CHECK(acc["epochs"][0]["rollouts_per_prompt"].get<double>() == doctest::Approx(3.52));
  CHECK(acc["epochs"][4]["tokens_per_prompt"].get<double>() == doctest::Approx(636.0));
  CHECK(acc["baselines"][1]["saving_pct"].get<double>() == doctest::Approx(64.6667).epsilon(1e-4));
  CHECK(a.get("accounting.txt").find("8.6%") != std::string::npos);

  Artifacts custom;
  REQUIRE(tsrank_simulate_curriculum(shares.c_str(), nullptr, nullptr,
                                     R"({"baselines":[{"n_rollouts":4,"rationale_budget_tokens":100}]})",
                                     &custom.handle) == TSRANK_OK);
  const auto b = json::parse(custom.get("accounting.json"))["accounting"]["baselines"];
  REQUIRE(b.size() == 1);
  CHECK(b[0]["tokens_per_prompt"] == 400.0);

  Artifacts none;
  CHECK(tsrank_simulate_curriculum(nullptr, nullptr, nullptr, nullptr, &none.handle) ==
        TSRANK_ERR_USAGE);
  CHECK(tsrank_simulate_curriculum(shares.c_str(), nullptr, nullptr, R"({"colour":1})",
                                   &none.handle) == TSRANK_ERR_USAGE);
  CHECK(tsrank_simulate_curriculum(shares.c_str(), nullptr, nullptr, R"({"trend":"median"})",
                                   &none.handle) == TSRANK_ERR_USAGE);
}

TEST_CASE("curriculum from a trace with q values") {
  const auto dir = std::filesystem::temp_directory_path() / ("tsrank_capi_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto trace = (dir / "trace.jsonl").string();
  const auto qs = (dir / "q.jsonl").string();
  {
    std::ofstream t(trace), q(qs);
    for (int i = 0; i < 10; ++i) {
      for (int e = 0; e < 2; ++e) {
        const double d = e == 1 && i < 3 ? -3.0 : 3.0;
        const double composite = 3.0 * d;
        t << json{{"prompt_id", "p" + std::to_string(i)}, {"epoch", e}, {"completion", "x"},
                  {"scores", {{"decision", d}, {"clinical", 0}, {"specificity", 0},
                              {"safety", 0}, {"format", 0}}},
                  {"composite", composite}}.dump()
          << "\n";
      }
      q << json{{"prompt_id", "p" + std::to_string(i)}, {"epoch", 0}, {"q", i / 10.0}}.dump() << "\n";
    }
  }
  Artifacts a;
  REQUIRE(tsrank_simulate_curriculum(nullptr, trace.c_str(), qs.c_str(), nullptr, &a.handle) ==
          TSRANK_OK);
  const auto report = json::parse(a.get("accounting.json"));
  CHECK(report["input"]["thresholds"]["q_hard"].get<double>() == doctest::Approx(0.8));
  CHECK(report["accounting"]["epochs"].size() == 2);
  CHECK(report["input"]["trend"] == "decision");

  {
    std::ofstream t(trace, std::ios::app);
    t << "not json\n";
  }
  Artifacts bad;
  CHECK(tsrank_simulate_curriculum(nullptr, trace.c_str(), nullptr, nullptr, &bad.handle) ==
        TSRANK_ERR_DATA);
  CHECK(std::string(tsrank_last_error()).find(":21:") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("pure math") {
  double s = 0, q = 0;
  REQUIRE(tsrank_fast_score(0.0, &s, &q) == TSRANK_OK);
  CHECK(s == 0.5);
  CHECK(q == 1.0);
  CHECK(tsrank_fast_score(std::nan(""), &s, &q) != TSRANK_OK);

  const double z[] = {1.0, 1.0, 1.0, 1.0};
  double u = 0;
  REQUIRE(tsrank_normalized_entropy_of_log_odds(z, 4, &u) == TSRANK_OK);
  CHECK(u == doctest::Approx(1.0));
  REQUIRE(tsrank_normalized_entropy_of_log_odds(z, 1, &u) == TSRANK_OK);
  CHECK(u == 0.0);
  CHECK(tsrank_normalized_entropy_of_log_odds(z, 0, &u) != TSRANK_OK);

  CHECK(tsrank_expected_slow_overhead(0.45, 3800) == doctest::Approx(1710));
  CHECK(tsrank_fast_query_time(70, 20, 4) == doctest::Approx(350));
  CHECK(std::isnan(tsrank_fast_query_time(70, 20, 0)));
  CHECK(tsrank_two_speed_query_time(350, 0.45, 3800) == doctest::Approx(2060));
}

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

#include <filesystem>
#include <sstream>
#include <string>

#include "test_support.hpp"
#include "tsrank/config.hpp"
#include "tsrank/error.hpp"
#include "tsrank/json_io.hpp"

using namespace tsrank;
using tsrank::testing::make_list;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::contract;
}

}  // namespace

TEST_CASE("config merge overlays only present keys") {
  const RunConfig base;
  const auto merged = merge_run_config(
      base, R"({"threshold":0.7,"batch":4,"mock":{"slow_accuracy":0.5},"seed":9,
               "remote":{"deadline_ms":250},"recall_cutoffs":[1,3]})");
  CHECK(merged.threshold == 0.7);
  CHECK(merged.batch == 4);
  CHECK(merged.mock.slow_accuracy == 0.5);
  CHECK(merged.mock.sharpness == base.mock.sharpness);
  CHECK(merged.seed == 9);
  CHECK(merged.remote.deadline.count() == 250);
  CHECK(merged.remote.base_url == base.remote.base_url);
  CHECK(merged.recall_cutoffs == std::vector<std::size_t>{1, 3});
  CHECK(merge_run_config(base, "  \n").threshold == base.threshold);
}

TEST_CASE("config rejects unknown keys, bad types and invalid values") {
  const RunConfig base;
  for (const char* text :
       {R"({"threshhold":0.5})", R"({"mock":{"sharp":1}})", R"({"remote":{"url":"x"}})",
        R"({"variants":{"yes_ids":[1],"no_ids":[2],"maybe":[3]}})", R"({"threshold":"high"})",
        R"({"threshold":1.5})", R"({"batch":0})", R"({"batch":-1})", R"({"backend":"gpu"})",
        R"({"recall_cutoffs":[0]})", R"({"mock":{"malform_rate":2}})",
        R"({"variants":{"yes_ids":[1],"no_ids":[1]}})", "[1]", "{bad"}) {
    CAPTURE(text);
    CHECK(code_of([&] { merge_run_config(base, text); }) == ErrorCode::invalid_argument);
  }
}

TEST_CASE("config round-trips through its JSON form") {
  RunConfig c;
  c.backend = BackendKind::remote;
  c.threshold = 0.35;
  c.workers = 3;
  c.mock.noise = 0.25;
  c.remote.base_url = "http://example.invalid:9000";
  c.variants = {{1, 2}, {3}};
  c.seed = 42;
  const auto text = run_config_to_json(c);
  CHECK(run_config_to_json(merge_run_config(RunConfig{}, text)) == text);
}

TEST_CASE("backend and pipeline factories") {
  RunConfig c;
  c.seed = 5;
  c.batch = 6;
  CHECK(make_backend(c)->descriptor().kind == BackendKind::mock);
  CHECK(make_pipeline_config(c).batch == 6);
  c.backend = BackendKind::remote;
  CHECK(make_backend(c)->descriptor().kind == BackendKind::remote);
  c.template_dir = "/nonexistent/templates";
  CHECK_THROWS_AS(make_pipeline_config(c), Error);
}

TEST_CASE("candidate lists round-trip and reject malformed input") {
  auto list = make_list(4, "q7", 2);
  list.oracle_inserted = true;
  const auto back = candidate_list_from_json(Json::parse(dump_line(to_json(list))));
  CHECK(back.query_id == "q7");
  CHECK(back.ids() == list.ids());
  CHECK(back.relevant_id == list.relevant_id);
  CHECK(back.patient == list.patient);
  CHECK(back.oracle_inserted);

  const auto good = to_json(list);
  auto no_context = good;
  no_context.erase("context");
  auto numeric_id = good;
  numeric_id["candidates"][0]["id"] = 3;
  auto duplicate = good;
  duplicate["candidates"][1]["id"] = "c0";
  auto stray_relevant = good;
  stray_relevant["relevant_id"] = "zzz";
  auto empty = good;
  empty["candidates"] = Json::array();
  for (const auto& j : {no_context, numeric_id, duplicate, stray_relevant, empty, Json(5)}) {
    CHECK(code_of([&] { candidate_list_from_json(j); }) == ErrorCode::data);
  }
}

TEST_CASE("dataset errors name the source line") {
  std::stringstream in;
  in << dump_line(to_json(make_list(3, "a"))) << "\n\n"
     << dump_line(to_json(make_list(3, "b"))) << "\n"
     << "{\"query_id\": \n";
  try {
    parse_dataset(in, "mem.jsonl");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::data);
    CHECK(std::string(e.what()).rfind("mem.jsonl:4:", 0) == 0);
  }
  std::stringstream ok;
  ok << dump_line(to_json(make_list(3, "a"))) << "\n\n";
  CHECK(parse_dataset(ok, "x").size() == 1);
  CHECK(code_of([] { load_dataset("/nonexistent.jsonl"); }) == ErrorCode::data);

  const auto fixture = load_dataset(std::filesystem::path(TSRANK_FIXTURE_DIR) / "mock_corpus_200.jsonl");
  CHECK(fixture.size() == 200);
}

TEST_CASE("outcome JSON carries every field") {
  RankOutcome o;
  o.query_id = "q";
  o.final_order = {"b", "a"};
  o.fast_order = {"a", "b"};
  o.provenance = Provenance::slow_json;
  o.gated = true;
  o.z_values = {0.1, 0.2};
  const auto j = to_json(o);
  for (const char* key : {"query_id", "final_order", "fast_order", "provenance", "gated", "u",
                          "threshold", "z", "fast_ms_per_candidate", "fast_query_ms",
                          "slow_decode_ms", "slow_failure", "slow_error", "relevant_id"}) {
    CAPTURE(key);
    CHECK(j.contains(key));
  }
  CHECK(j["provenance"] == "slow_json");
  CHECK(j["slow_failure"].is_null());
  // Invalid UTF-8 is replaced, not thrown.
  o.query_id = "\xff";
  CHECK_NOTHROW(dump_line(to_json(o)));
}

TEST_CASE("trace records and shares") {
  RolloutTraceRecord r;
  r.prompt_id = "p";
  r.epoch = 3;
  r.completion = "text";
  r.axis_scores = {1, -1, 0.5, 3, -3};
  r.composite = composite_reward(r.axis_scores, RubricWeights::defaults().axis);
  const auto back = trace_record_from_json(Json::parse(dump_line(to_json(r))));
  CHECK(back.prompt_id == r.prompt_id);
  CHECK(back.epoch == 3);
  CHECK(back.axis_scores == r.axis_scores);
  CHECK(back.composite == r.composite);

  auto j = to_json(r);
  j["scores"]["safety"] = 3.5;
  CHECK(code_of([&] { trace_record_from_json(j); }) == ErrorCode::data);
  j = to_json(r);
  j["scores"].erase("format");
  CHECK(code_of([&] { trace_record_from_json(j); }) == ErrorCode::data);
  j = to_json(r);
  j["epoch"] = -1;
  CHECK(code_of([&] { trace_record_from_json(j); }) == ErrorCode::data);

  const auto shares = shares_from_json(Json::parse(
      R"({"epochs":[{"epoch":0,"easy":34,"medium":56,"hard":10},{"epoch":1,"easy":40,"medium":50,"hard":10}]})"));
  REQUIRE(shares.size() == 2);
  CHECK(shares[1].shares.easy == 40.0);
  CHECK(code_of([] {
          shares_from_json(Json::parse(
              R"({"epochs":[{"epoch":1,"easy":34,"medium":56,"hard":10},{"epoch":1,"easy":34,"medium":56,"hard":10}]})"));
        }) == ErrorCode::data);
  CHECK(code_of([] { shares_from_json(Json::parse(R"({"epochs":[]})")); }) == ErrorCode::data);
}

TEST_CASE("report dumps end with a newline") {
  const auto text = dump_pretty(Json{{"a", 1}});
  CHECK(text.back() == '\n');
  CHECK(dump_line(Json{{"a", 1}}) == "{\"a\":1}");
}

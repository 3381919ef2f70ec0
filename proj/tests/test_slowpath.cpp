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

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "tsrank/error.hpp"
#include "tsrank/slowpath.hpp"

using namespace tsrank;
using tsrank::testing::below;
using tsrank::testing::rng;

namespace {

std::vector<Candidate> cands(std::initializer_list<const char*> ids) {
  std::vector<Candidate> out;
  for (const char* id : ids) out.push_back({id, std::string("text of ") + id});
  return out;
}

std::vector<std::string> order(std::initializer_list<const char*> ids) {
  return {ids.begin(), ids.end()};
}

bool is_permutation_of(const std::vector<std::string>& got, const std::vector<std::string>& ids) {
  return std::is_permutation(got.begin(), got.end(), ids.begin(), ids.end());
}

}  // namespace

TEST_CASE("valid payload yields the stated order") {
  const auto ab = cands({"a", "b"});
  const auto r = parse_slow_output(
      R"({"ranking":[{"id":"a","rank":1},{"id":"b","rank":2}],"rationale":"x"})", ab);
  CHECK(r.valid);
  CHECK_FALSE(r.failure_reason.has_value());
  CHECK(r.rationale == "x");
  const auto f = final_ranking(r, order({"b", "a"}));
  CHECK(f.order == order({"a", "b"}));
  CHECK(f.provenance == Provenance::slow_json);
}

TEST_CASE("documented failure examples") {
  const auto abc = cands({"a", "b", "c"});
  const auto r = parse_slow_output(
      R"({"ranking":[{"id":"a","rank":1},{"id":"b","rank":2}],"rationale":"x"})", abc);
  CHECK_FALSE(r.valid);
  CHECK(r.failure_reason == FailureReason::incomplete_coverage);

  const auto dup = parse_slow_output(R"({"ranking":[{"id":"a","rank":1},{"id":"a","rank":2}]})",
                                     cands({"a", "b"}));
  CHECK(dup.failure_reason == FailureReason::duplicate_id);
}

TEST_CASE("every failure reason is reachable") {
  const auto ab = cands({"a", "b"});
  auto reason = [&](std::string_view raw) { return parse_slow_output(raw, ab).failure_reason; };
  CHECK(reason("") == FailureReason::empty_output);
  CHECK(reason(" \n\t ") == FailureReason::empty_output);
  CHECK(reason("no json here") == FailureReason::parse_error);
  CHECK(reason(R"({"ranking":[{"id":"a","rank":1},)") == FailureReason::parse_error);
  CHECK(reason(R"({"ranking":"a,b"})") == FailureReason::parse_error);
  CHECK(reason(R"({"order":[]})") == FailureReason::parse_error);
  CHECK(reason(R"({"ranking":[{"id":"a"},{"id":"b","rank":2}]})") == FailureReason::parse_error);
  CHECK(reason(R"({"ranking":[{"id":"a","rank":1},{"id":"z","rank":2}]})") ==
        FailureReason::unknown_id);
  CHECK(reason(R"({"ranking":[{"id":"a","rank":1},{"id":"a","rank":2}]})") ==
        FailureReason::duplicate_id);
  CHECK(reason(R"({"ranking":[{"id":"a","rank":1}]})") == FailureReason::incomplete_coverage);
  CHECK(reason(R"({"ranking":[{"id":"a","rank":1},{"id":"b","rank":1}]})") ==
        FailureReason::non_permutation_ranks);
  CHECK(reason(R"({"ranking":[{"id":"a","rank":0},{"id":"b","rank":1}]})") ==
        FailureReason::non_permutation_ranks);
  CHECK(reason(R"({"ranking":[{"id":"a","rank":1},{"id":"b","rank":3}]})") ==
        FailureReason::non_permutation_ranks);
  CHECK(reason(R"({"ranking":[{"id":"a","rank":1.5},{"id":"b","rank":2}]})") ==
        FailureReason::non_permutation_ranks);
}

TEST_CASE("extraction takes the first balanced object and ignores braces in strings") {
  CHECK(extract_first_json_object("prefix {\"a\":\"}{\"} trailing {\"b\":1}") == "{\"a\":\"}{\"}");
  CHECK(extract_first_json_object(R"(x {"a":"\"}"} y)") == R"({"a":"\"}"})");
  CHECK(extract_first_json_object("{\"a\":{\"b\":{}}}") == "{\"a\":{\"b\":{}}}");
  CHECK_FALSE(extract_first_json_object("{\"a\":1").has_value());
  CHECK_FALSE(extract_first_json_object("nothing").has_value());

  const auto ab = cands({"a", "b"});
  const auto prose = parse_slow_output(
      "Sure! Here you go:\n```json\n{\"ranking\":[{\"id\":\"b\",\"rank\":1},{\"id\":\"a\",\"rank\":2}],"
      "\"rationale\":\"b first\"}\n```\nAnything else?",
      ab);
  CHECK(prose.valid);
  CHECK(final_ranking(prose, order({"a", "b"})).order == order({"b", "a"}));

  // No repair: trailing commas stay invalid.
  CHECK(parse_slow_output(R"({"ranking":[{"id":"a","rank":1},{"id":"b","rank":2},]})", ab)
            .failure_reason == FailureReason::parse_error);
}

TEST_CASE("text-keyed entries resolve by exact candidate text") {
  const auto ab = cands({"a", "b"});
  const auto r = parse_slow_output(
      R"({"ranking":[{"text":"text of b","rank":1},{"text":"text of a","rank":2}]})", ab);
  REQUIRE(r.valid);
  CHECK(final_ranking(r, order({"a", "b"})).order == order({"b", "a"}));

  CHECK(parse_slow_output(R"({"ranking":[{"text":"TEXT OF B","rank":1},{"id":"a","rank":2}]})", ab)
            .failure_reason == FailureReason::unknown_id);

  std::vector<Candidate> twins{{"a", "same"}, {"b", "same"}};
  CHECK(parse_slow_output(R"({"ranking":[{"text":"same","rank":1},{"text":"same","rank":2}]})",
                          twins)
            .failure_reason == FailureReason::unknown_id);
}

TEST_CASE("rationale is captured when present") {
  const auto ab = cands({"a", "b"});
  CHECK(parse_slow_output(R"({"ranking":[{"id":"a","rank":2},{"id":"b","rank":1}]})", ab)
            .rationale.empty());
  CHECK(parse_slow_output(
            R"({"rationale":["x",1],"ranking":[{"id":"a","rank":2},{"id":"b","rank":1}]})", ab)
            .rationale == R"(["x",1])");
}

TEST_CASE("final ranking fallbacks and contract") {
  SlowResult invalid;
  const auto f = final_ranking(invalid, order({"a", "b", "c"}));
  CHECK(f.order == order({"a", "b", "c"}));
  CHECK(f.provenance == Provenance::fast_fallback);

  const auto abc = cands({"a", "b", "c"});
  const auto same = parse_slow_output(
      R"({"ranking":[{"id":"a","rank":1},{"id":"b","rank":2},{"id":"c","rank":3}]})", abc);
  const auto g = final_ranking(same, order({"a", "b", "c"}));
  CHECK(g.order == order({"a", "b", "c"}));
  CHECK(g.provenance == Provenance::slow_json);

  CHECK_THROWS_AS(final_ranking(invalid, order({"a", "a"})), Error);
  CHECK_THROWS_AS(final_ranking(same, order({"a", "b", "d"})), Error);
}

TEST_CASE("parsing is deterministic") {
  const auto ab = cands({"a", "b"});
  const std::string raw = R"(ok {"ranking":[{"id":"b","rank":1},{"id":"a","rank":2}]})";
  const auto x = parse_slow_output(raw, ab);
  const auto y = parse_slow_output(raw, ab);
  CHECK(x.valid == y.valid);
  CHECK(x.ranking.size() == y.ranking.size());
  for (std::size_t i = 0; i < x.ranking.size(); ++i) {
    CHECK(x.ranking[i].id == y.ranking[i].id);
    CHECK(x.ranking[i].rank == y.ranking[i].rank);
  }
}

TEST_CASE("fuzz: output is always a permutation of the expected ids") {
  const auto list = tsrank::testing::make_list(6);
  const auto ids = list.ids();
  const std::string alphabet = "{}[]\":,0123456789 rankingidtextc-.\\\n";
  for (int trial = 0; trial < 20000; ++trial) {
    std::string raw;
    const std::size_t len = below(120);
    for (std::size_t i = 0; i < len; ++i) {
      raw.push_back(trial % 2 == 0 ? static_cast<char>(below(256))
                                   : alphabet[below(alphabet.size())]);
    }
    auto fast = ids;
    std::shuffle(fast.begin(), fast.end(), rng());
    const auto slow = parse_slow_output(raw, list.candidates);
    CHECK(slow.valid != slow.failure_reason.has_value());
    const auto f = final_ranking(slow, fast);
    CHECK(is_permutation_of(f.order, ids));
  }

  // Structured mutations of a valid payload.
  for (int trial = 0; trial < 5000; ++trial) {
    std::string raw = "{\"ranking\":[";
    const std::size_t n = below(9);
    for (std::size_t i = 0; i < n; ++i) {
      if (i) raw += ",";
      raw += "{\"id\":\"c" + std::to_string(below(8)) + "\",\"rank\":" +
             std::to_string(static_cast<long>(below(9)) - 1) + "}";
    }
    raw += "]}";
    const auto slow = parse_slow_output(raw, list.candidates);
    const auto f = final_ranking(slow, ids);
    CHECK(is_permutation_of(f.order, ids));
    if (slow.valid) {
      std::set<std::int64_t> ranks;
      for (const auto& e : slow.ranking) ranks.insert(e.rank);
      CHECK(ranks.size() == ids.size());
    }
  }
}

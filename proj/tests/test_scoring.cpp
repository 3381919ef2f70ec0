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
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "test_support.hpp"
#include "tsrank/error.hpp"
#include "tsrank/scoring.hpp"

using namespace tsrank;
using tsrank::testing::rng;
using tsrank::testing::uniform;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

FirstStepReadout readout(std::initializer_list<std::pair<TokenId, double>> probs) {
  FirstStepReadout r;
  for (auto [id, p] : probs) r.log_probs[id] = std::log(p);
  return r;
}

// Exponentiates, sums and re-logs in 50-digit arithmetic.
double oracle_pool(const FirstStepReadout& r, const std::vector<TokenId>& ids) {
  Big sum = 0;
  for (TokenId id : ids) sum += boost::multiprecision::exp(Big(r.log_probs.at(id)));
  return static_cast<double>(boost::multiprecision::log(sum));
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::contract;
}

}  // namespace

TEST_CASE("pooling examples") {
  const auto r = readout({{1, 0.8}, {2, 0.25}, {3, 0.25}});
  const std::vector<TokenId> single{1}, pair{2, 3};
  CHECK(pool_log_prob(r, single) == doctest::Approx(std::log(0.8)).epsilon(1e-15));
  CHECK(pool_log_prob(r, pair) == doctest::Approx(std::log(0.5)).epsilon(1e-15));

  FirstStepReadout tiny;
  tiny.log_probs[7] = std::log(1e-300);
  tiny.log_probs[8] = std::log(1e-300);
  const std::vector<TokenId> both{7, 8};
  const double pooled = pool_log_prob(tiny, both);
  CHECK(std::isfinite(pooled));
  CHECK(std::abs(pooled - oracle_pool(tiny, both)) <= 1e-10 * std::abs(pooled));

  // Masses below the smallest subnormal still pool finitely in log space.
  FirstStepReadout deep;
  deep.log_probs[1] = -2000.0;
  deep.log_probs[2] = -2000.0;
  const std::vector<TokenId> deep_ids{1, 2};
  CHECK(pool_log_prob(deep, deep_ids) == doctest::Approx(-2000.0 + std::log(2.0)));
}

TEST_CASE("pooling errors") {
  const auto r = readout({{1, 0.5}});
  const std::vector<TokenId> absent{1, 99};
  CHECK(code_of([&] { pool_log_prob(r, absent); }) == ErrorCode::readout_incomplete);
  CHECK_THROWS_AS(pool_log_prob(r, std::vector<TokenId>{}), Error);

  FirstStepReadout zero;
  zero.log_probs[1] = -std::numeric_limits<double>::infinity();
  zero.log_probs[2] = std::log(0.3);
  const VariantSets v{{1}, {2}};
  CHECK(code_of([&] { first_step_log_odds(zero, v); }) == ErrorCode::degenerate_readout);
  CHECK(pool_log_prob(zero, std::vector<TokenId>{1}) == -std::numeric_limits<double>::infinity());

  FirstStepReadout positive;
  positive.log_probs[1] = 0.1;
  CHECK_THROWS_AS(validate(positive), Error);
}

TEST_CASE("log-odds examples") {
  CHECK(first_step_log_odds(readout({{1, 0.8}, {2, 0.2}}), {{1}, {2}}) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(first_step_log_odds(readout({{1, 0.3}, {2, 0.3}}), {{1}, {2}}) == 0.0);
  CHECK(first_step_log_odds(readout({{10, 0.2}, {11, 0.1}, {20, 0.1}}), {{10, 11}, {20}}) ==
        doctest::Approx(std::log(3.0)).epsilon(1e-14));
}

TEST_CASE("fast score examples") {
  auto a = fast_score(0.0);
  CHECK(a.s == 0.5);
  CHECK(a.q == 1.0);
  auto b = fast_score(std::log(4.0));
  CHECK(b.s == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(b.q == doctest::Approx(0.64).epsilon(1e-14));
  auto c = fast_score(std::log(3.0));
  CHECK(c.s == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(c.q == doctest::Approx(0.75).epsilon(1e-14));

  CHECK_THROWS_AS(fast_score(std::numeric_limits<double>::infinity()), Error);
  CHECK_THROWS_AS(fast_score(std::numeric_limits<double>::quiet_NaN()), Error);
  CHECK(fast_score(800.0).s == 1.0);
  CHECK(fast_score(-800.0).s == 0.0);
}

TEST_CASE("property: pooling matches a high-precision oracle") {
  for (int trial = 0; trial < 2000; ++trial) {
    FirstStepReadout r;
    const std::size_t n = 1 + tsrank::testing::below(8);
    std::vector<TokenId> ids;
    for (std::size_t i = 0; i < n; ++i) {
      ids.push_back(static_cast<TokenId>(i * 13 + 1));
      // Spread over many orders of magnitude, including near-underflow.
      r.log_probs[ids.back()] = uniform(-740.0, 0.0) * (trial % 3 == 0 ? 1.0 : 0.02);
    }
    const double got = pool_log_prob(r, ids);
    const double want = std::min(0.0, oracle_pool(r, ids));
    CAPTURE(trial);
    CHECK(std::abs(got - want) <= 1e-10 * std::max(1.0, std::abs(want)));

    std::shuffle(ids.begin(), ids.end(), rng());
    CHECK(pool_log_prob(r, ids) == doctest::Approx(got).epsilon(1e-15));
  }
}

TEST_CASE("property: s recovers the normalized yes mass") {
  for (int trial = 0; trial < 1000; ++trial) {
    const double yes = uniform(1e-6, 1.0 - 1e-6);
    FirstStepReadout r;
    r.log_probs[1] = std::log(yes * 0.5);
    r.log_probs[2] = std::log(yes * 0.5);
    r.log_probs[3] = std::log1p(-yes);
    const double z = first_step_log_odds(r, {{1, 2}, {3}});
    CHECK(std::abs(fast_score(z).s - yes) <= 1e-12);
  }
}

TEST_CASE("property: monotone s and symmetric q") {
  for (int trial = 0; trial < 5000; ++trial) {
    // Strict where doubles can resolve the gap; s saturates beyond |z| ~ 37.
    const double z1 = uniform(-20.0, 20.0);
    const double z2 = z1 - uniform(1e-3, 5.0);
    CHECK(fast_score(z1).s > fast_score(z2).s);
    const double w1 = uniform(-800.0, 800.0);
    CHECK(fast_score(w1).s >= fast_score(w1 - uniform(0.0, 50.0)).s);
    CHECK(fast_score(z1).q == doctest::Approx(fast_score(-z1).q).epsilon(1e-12));
    const auto f = fast_score(z1);
    CHECK(f.q >= 0.0);
    CHECK(f.q <= 1.0);
  }
}

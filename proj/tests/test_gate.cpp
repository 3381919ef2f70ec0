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
#include <vector>

#include "test_support.hpp"
#include "tsrank/error.hpp"
#include "tsrank/gate.hpp"

using namespace tsrank;
using tsrank::testing::uniform;

namespace {

// Independent long-double softmax entropy, normalized by log m.
long double oracle_u(const std::vector<double>& z) {
  if (z.size() == 1) return 0.0L;
  long double peak = z[0];
  for (double v : z) peak = std::max<long double>(peak, v);
  long double total = 0.0L;
  for (double v : z) total += std::exp(static_cast<long double>(v) - peak);
  long double h = 0.0L;
  for (double v : z) {
    const long double p = std::exp(static_cast<long double>(v) - peak) / total;
    if (p > 0.0L) h -= p * std::log(p);
  }
  return h / std::log(static_cast<long double>(z.size()));
}

double u_of(const std::vector<double>& z) { return normalized_entropy(listwise_distribution(z)); }

}  // namespace

TEST_CASE("softmax examples") {
  const auto a = listwise_distribution(std::vector<double>{0, 0, 0, 0});
  for (double p : a) CHECK(p == 0.25);
  const auto b = listwise_distribution(std::vector<double>{1, 1});
  CHECK(b[0] == 0.5);
  CHECK(b[1] == 0.5);
  const auto c = listwise_distribution(std::vector<double>{std::log(2.0), 0});
  CHECK(c[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(c[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(listwise_distribution(std::vector<double>{}), Error);

  const auto big = listwise_distribution(std::vector<double>{1000, 999});
  CHECK(big[0] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
}

TEST_CASE("entropy examples") {
  std::vector<double> uniform20(20, 1.0 / 20);
  CHECK(normalized_entropy(uniform20) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(normalized_entropy(std::vector<double>{0, 1, 0, 0}) == 0.0);
  CHECK(normalized_entropy(std::vector<double>{0.5, 0.5, 0, 0}) ==
        doctest::Approx(std::log(2.0) / std::log(4.0)).epsilon(1e-15));
  CHECK(normalized_entropy(std::vector<double>{1.0}) == 0.0);

  CHECK_THROWS_AS(normalized_entropy(std::vector<double>{0.5, 0.6}), Error);
  CHECK_THROWS_AS(normalized_entropy(std::vector<double>{1.5, -0.5}), Error);
  CHECK_THROWS_AS(normalized_entropy(std::vector<double>{}), Error);
}

TEST_CASE("uniform z gives U = 1 and a dominant candidate gives U near 0") {
  for (std::size_t m = 2; m <= 64; ++m) {
    CHECK(u_of(std::vector<double>(m, 0.37)) == doctest::Approx(1.0).epsilon(1e-12));
    // One candidate holding 0.999 of the mass.
    std::vector<double> z(m, 0.0);
    z[0] = std::log(0.999 * static_cast<double>(m - 1) / 0.001);
    if (m == 2) {
      // Two candidates at 0.999 / 0.001 sit just above 0.01.
      const double h = -(0.999 * std::log(0.999) + 0.001 * std::log(0.001));
      CHECK(u_of(z) == doctest::Approx(h / std::log(2.0)).epsilon(1e-9));
      CHECK(u_of(z) > 0.01);
    } else {
      CHECK(u_of(z) <= 0.01);
    }
  }
}

TEST_CASE("gate boundary is inclusive on the fast side") {
  CHECK(gate_decision(0.89, 0.9).route == Route::fast);
  CHECK(gate_decision(0.9, 0.9).route == Route::fast);
  CHECK(gate_decision(0.95, 0.9).route == Route::slow);
  CHECK(gate_decision(1.0, 1.0).route == Route::fast);
  CHECK(gate_decision(1e-9, 0.0).route == Route::slow);
  CHECK(gate_decision(0.0, 0.0).route == Route::fast);
  const auto d = gate_decision(0.5, 0.3);
  CHECK(d.u == 0.5);
  CHECK(d.threshold == 0.3);
  CHECK(to_string(Route::slow) == "slow");
}

TEST_CASE("property: U matches a long-double oracle") {
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t m = 1 + tsrank::testing::below(64);
    std::vector<double> z(m);
    const double scale = uniform(0.0, 12.0);
    for (double& v : z) v = uniform(-scale, scale);
    CHECK(std::abs(u_of(z) - static_cast<double>(oracle_u(z))) <= 1e-12);
  }
}

TEST_CASE("property: softmax temperature monotonicity") {
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t m = 2 + tsrank::testing::below(30);
    std::vector<double> z(m);
    for (double& v : z) v = uniform(-6.0, 6.0);
    const long double base = oracle_u(z);
    const double beta_low = uniform(0.0, 1.0);
    const double beta_high = uniform(1.0, 5.0);
    auto scaled = [&](double beta) {
      std::vector<double> out = z;
      for (double& v : out) v *= beta;
      return out;
    };
    CHECK(u_of(scaled(beta_low)) >= static_cast<double>(base) - 1e-12);
    CHECK(u_of(scaled(beta_high)) <= static_cast<double>(base) + 1e-12);
  }
}

TEST_CASE("property: T = 1 never gates and T = 0 gates any spread") {
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 2 + tsrank::testing::below(40);
    std::vector<double> z(m);
    for (double& v : z) v = uniform(-10.0, 10.0);
    const double u = u_of(z);
    CHECK(u >= 0.0);
    CHECK(u <= 1.0);
    CHECK(gate_decision(u, 1.0).route == Route::fast);
    if (u > 0.0) CHECK(gate_decision(u, 0.0).route == Route::slow);
  }
}

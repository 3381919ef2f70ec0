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

#include "tsrank/gate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tsrank/error.hpp"

namespace tsrank {

std::string_view to_string(Route route) noexcept {
  return route == Route::fast ? "fast" : "slow";
}

std::vector<double> listwise_distribution(std::span<const double> z) {
  if (z.empty()) throw Error(ErrorCode::invalid_argument, "softmax of an empty vector");
  for (double v : z) {
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "log-odds must be finite");
  }
  const double peak = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  std::transform(z.begin(), z.end(), p.begin(), [peak](double v) { return std::exp(v - peak); });
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= total;
  return p;
}

double normalized_entropy(std::span<const double> p) {
  if (p.empty()) throw Error(ErrorCode::invalid_argument, "entropy of an empty distribution");
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::invalid_argument, "probabilities must be finite and >= 0");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw Error(ErrorCode::invalid_argument, "probabilities must sum to 1");
  }
  if (p.size() == 1) return 0.0;
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return std::clamp(h / std::log(static_cast<double>(p.size())), 0.0, 1.0);
}

GateDecision gate_decision(double u, double t) noexcept {
  return {u, t, u > t ? Route::slow : Route::fast};
}

}  // namespace tsrank

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

#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace tsrank {

inline constexpr double kDefaultUncertaintyCap = 0.9;

enum class Route { fast, slow };

std::string_view to_string(Route route) noexcept;

struct GateDecision {
  double u = 0.0;
  double threshold = kDefaultUncertaintyCap;
  Route route = Route::fast;
};

/// Softmax over the candidates' log-odds.
std::vector<double> listwise_distribution(std::span<const double> z);

/// -sum p log p / log m, in [0, 1]. A singleton list returns 0.
double normalized_entropy(std::span<const double> p);

/// Slow iff u > t; the boundary u == t stays on the fast path.
GateDecision gate_decision(double u, double t) noexcept;

}  // namespace tsrank

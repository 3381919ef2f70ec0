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

// Judge rubric scaling and the GRPO quantities derived from it.
//
// A judge verdict is five boolean vectors (decision d1..d10, clinical
// c1..c10, specificity s1..s8, safety f1..f6, format m1..m5). Each axis maps
// to S in [-3, 3] through the weighted success ratio and the affine map
// 6r - 3; a failed designated veto check pins S to -3. The composite reward
// is the axis-weighted sum of the S values.

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tsrank {

enum class Axis : std::size_t { decision = 0, clinical, specificity, safety, format };

inline constexpr std::size_t kAxisCount = 5;
inline constexpr std::array<Axis, kAxisCount> kAxes = {
    Axis::decision, Axis::clinical, Axis::specificity, Axis::safety, Axis::format};
inline constexpr std::array<std::size_t, kAxisCount> kAxisLengths = {10, 10, 8, 6, 5};
inline constexpr std::array<char, kAxisCount> kAxisQuestionPrefix = {'d', 'c', 's', 'f', 'm'};
inline constexpr double kScoreLowerBound = -3.0;
inline constexpr double kScoreUpperBound = 3.0;

std::string_view to_string(Axis axis) noexcept;
std::optional<Axis> axis_from_string(std::string_view name) noexcept;

constexpr std::size_t index(Axis axis) noexcept { return static_cast<std::size_t>(axis); }

template <typename T>
using PerAxis = std::array<T, kAxisCount>;

struct RubricVerdict {
  PerAxis<std::vector<bool>> answers;
  PerAxis<bool> veto{};
};

/// Throws Error(contract) when an answer vector has the wrong length.
void validate(const RubricVerdict& verdict);

struct RubricWeights {
  PerAxis<std::vector<double>> question;  // defaults: all ones
  PerAxis<double> axis = {3.0, 1.5, 1.5, 2.0, 1.5};

  static RubricWeights defaults();
};

/// Which question, when answered false, counts as a failed veto check on
/// each axis. Defaults: safety f4 and format m1.
struct VetoPolicy {
  PerAxis<std::optional<std::size_t>> designated;

  static VetoPolicy defaults();
};

struct ScaledScores {
  PerAxis<double> axis{};
  double composite = 0.0;
};

/// <w, b> / max(1, ||w||_1). Throws Error(contract) on length mismatch and
/// Error(invalid_argument) on a negative weight.
double weighted_success_ratio(const std::vector<bool>& answers, std::span<const double> weights);

/// 6r - 3. Throws Error(invalid_argument) unless r in [0, 1].
double affine_rubric_score(double r);

ScaledScores scale_verdict(const RubricVerdict& verdict,
                           const RubricWeights& weights = RubricWeights::defaults());

/// sum_m w_m S_m.
double composite_reward(const PerAxis<double>& axis_scores, const PerAxis<double>& axis_weights);

/// Parses the judge's five-object JSON with strict key validation and
/// derives veto flags from `policy`. Throws Error(data) on any deviation.
RubricVerdict parse_verdict_json(std::string_view json,
                                 const VetoPolicy& policy = VetoPolicy::defaults());

/// A_i = R_i - mean(R). Throws Error(invalid_argument) on empty input.
std::vector<double> group_advantages(std::span<const double> rewards);

/// sum_t (policy_t - ref_t). A sampled log-ratio sum, so it can be negative.
double kl_penalty(std::span<const double> policy_logprobs, std::span<const double> ref_logprobs);

/// -A * sum_t policy_t + beta * kl_penalty. Throws Error(invalid_argument)
/// unless beta > 0.
double grpo_rollout_loss(double advantage, std::span<const double> policy_logprobs,
                         std::span<const double> ref_logprobs, double beta);

}  // namespace tsrank

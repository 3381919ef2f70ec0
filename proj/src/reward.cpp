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

#include "tsrank/reward.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <json.hpp>

#include "tsrank/error.hpp"

namespace tsrank {

std::string_view to_string(Axis axis) noexcept {
  switch (axis) {
    case Axis::decision: return "decision";
    case Axis::clinical: return "clinical";
    case Axis::specificity: return "specificity";
    case Axis::safety: return "safety";
    case Axis::format: return "format";
  }
  return "unknown";
}

std::optional<Axis> axis_from_string(std::string_view name) noexcept {
  for (Axis axis : kAxes) {
    if (to_string(axis) == name) return axis;
  }
  return std::nullopt;
}

void validate(const RubricVerdict& verdict) {
  for (Axis axis : kAxes) {
    if (verdict.answers[index(axis)].size() != kAxisLengths[index(axis)]) {
      throw Error(ErrorCode::contract, "axis '" + std::string(to_string(axis)) + "' expects " +
                                           std::to_string(kAxisLengths[index(axis)]) + " answers");
    }
  }
}

RubricWeights RubricWeights::defaults() {
  RubricWeights w;
  for (Axis axis : kAxes) w.question[index(axis)].assign(kAxisLengths[index(axis)], 1.0);
  return w;
}

VetoPolicy VetoPolicy::defaults() {
  VetoPolicy policy;
  policy.designated[index(Axis::safety)] = 3;  // f4: catastrophic safety
  policy.designated[index(Axis::format)] = 0;  // m1: malformed first token
  return policy;
}

double weighted_success_ratio(const std::vector<bool>& answers, std::span<const double> weights) {
  if (answers.size() != weights.size()) {
    throw Error(ErrorCode::contract, "answer and weight vectors differ in length");
  }
  double hit = 0.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw Error(ErrorCode::invalid_argument, "weights must be >= 0");
    norm += weights[i];
    if (answers[i]) hit += weights[i];
  }
  return hit / std::max(1.0, norm);
}

double affine_rubric_score(double r) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "success ratio must be in [0, 1]");
  }
  return 6.0 * r - 3.0;
}

double composite_reward(const PerAxis<double>& axis_scores, const PerAxis<double>& axis_weights) {
  double total = 0.0;
  for (std::size_t m = 0; m < kAxisCount; ++m) total += axis_weights[m] * axis_scores[m];
  return total;
}

ScaledScores scale_verdict(const RubricVerdict& verdict, const RubricWeights& weights) {
  validate(verdict);
  ScaledScores out;
  for (Axis axis : kAxes) {
    const std::size_t m = index(axis);
    if (weights.question[m].size() != kAxisLengths[m]) {
      throw Error(ErrorCode::contract,
                  "question weights for '" + std::string(to_string(axis)) + "' have wrong length");
    }
    out.axis[m] = verdict.veto[m]
                      ? kScoreLowerBound
                      : affine_rubric_score(
                            weighted_success_ratio(verdict.answers[m], weights.question[m]));
  }
  out.composite = composite_reward(out.axis, weights.axis);
  return out;
}

RubricVerdict parse_verdict_json(std::string_view json_text, const VetoPolicy& policy) {
  const auto json = nlohmann::json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (json.is_discarded() || !json.is_object()) {
    throw Error(ErrorCode::data, "verdict is not a JSON object");
  }
  if (json.size() != kAxisCount) {
    throw Error(ErrorCode::data, "verdict must contain exactly the five rubric objects");
  }
  RubricVerdict verdict;
  for (Axis axis : kAxes) {
    const std::size_t m = index(axis);
    const std::string name(to_string(axis));
    const auto section = json.find(name);
    if (section == json.end() || !section->is_object()) {
      throw Error(ErrorCode::data, "verdict lacks object '" + name + "'");
    }
    if (section->size() != kAxisLengths[m]) {
      throw Error(ErrorCode::data, "'" + name + "' must have exactly " +
                                       std::to_string(kAxisLengths[m]) + " answers");
    }
    auto& answers = verdict.answers[m];
    answers.resize(kAxisLengths[m]);
    for (std::size_t q = 0; q < kAxisLengths[m]; ++q) {
      const std::string key = kAxisQuestionPrefix[m] + std::to_string(q + 1);
      const auto value = section->find(key);
      if (value == section->end() || !value->is_boolean()) {
        throw Error(ErrorCode::data, "'" + name + "." + key + "' must be a boolean");
      }
      answers[q] = value->get<bool>();
    }
    if (const auto veto = policy.designated[m]) {
      if (*veto >= kAxisLengths[m]) throw Error(ErrorCode::contract, "veto index out of range");
      verdict.veto[m] = !answers[*veto];
    }
  }
  return verdict;
}

std::vector<double> group_advantages(std::span<const double> rewards) {
  if (rewards.empty()) throw Error(ErrorCode::invalid_argument, "empty rollout group");
  const double mean =
      std::accumulate(rewards.begin(), rewards.end(), 0.0) / static_cast<double>(rewards.size());
  std::vector<double> out(rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = rewards[i] - mean;
  return out;
}

double kl_penalty(std::span<const double> policy_logprobs, std::span<const double> ref_logprobs) {
  if (policy_logprobs.size() != ref_logprobs.size()) {
    throw Error(ErrorCode::contract, "policy and reference log-probs differ in length");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < policy_logprobs.size(); ++t) {
    total += policy_logprobs[t] - ref_logprobs[t];
  }
  return total;
}

double grpo_rollout_loss(double advantage, std::span<const double> policy_logprobs,
                         std::span<const double> ref_logprobs, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorCode::invalid_argument, "beta must be > 0");
  const double kl = kl_penalty(policy_logprobs, ref_logprobs);
  const double log_likelihood =
      std::accumulate(policy_logprobs.begin(), policy_logprobs.end(), 0.0);
  return -advantage * log_likelihood + beta * kl;
}

}  // namespace tsrank

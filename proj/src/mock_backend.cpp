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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsrank/backend.hpp"
#include "tsrank/error.hpp"

namespace tsrank {
namespace {

constexpr double kFillerMass = 1e-6;
constexpr int kFillerTokens = 8;

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t hash = 0xcbf29ce484222325ull) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

// Deterministic draws keyed by (seed, domain tag, payload). mt19937_64's
// output sequence is fixed by the standard; the conversions below avoid the
// implementation-defined std distributions so streams match across
// toolchains.
class Stream {
 public:
  Stream(std::uint64_t seed, std::string_view tag, std::string_view payload)
      : engine_(fnv1a(payload, fnv1a(tag, fnv1a(std::to_string(seed))))) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * n); }

 private:
  std::mt19937_64 engine_;
};

double log_sigmoid(double z) {
  return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

void spread(std::map<TokenId, double>& out, std::span<const TokenId> ids, double log_mass,
            Stream& stream) {
  std::vector<double> weights(ids.size());
  for (double& w : weights) w = 0.5 + stream.uniform();
  double total = 0.0;
  for (double w : weights) total += w;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out[ids[i]] = log_mass + std::log(weights[i] / total);
  }
}

bool is_relevant(const CandidateList& list, std::size_t index) {
  return list.relevant_id && index < list.candidates.size() &&
         list.candidates[index].id == *list.relevant_id;
}

}  // namespace

std::string_view to_string(BackendKind kind) noexcept {
  return kind == BackendKind::mock ? "mock" : "remote";
}

VariantSets default_variant_sets() { return {{9891, 9642, 7566}, {2201, 2822, 5673}}; }

void validate(const MockSpec& spec) {
  const auto probability = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::invalid_argument, std::string("mock ") + name + " must be in [0, 1]");
    }
  };
  probability(spec.slow_accuracy, "slow_accuracy");
  probability(spec.malform_rate, "malform_rate");
  probability(spec.ambiguous_fraction, "ambiguous_fraction");
  if (!(spec.sharpness > 0.0) || !std::isfinite(spec.sharpness)) {
    throw Error(ErrorCode::invalid_argument, "mock sharpness must be positive and finite");
  }
  if (!(spec.noise >= 0.0) || !(spec.ambiguous_noise >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "mock noise scales must be >= 0");
  }
  if (!(spec.fast_ms_per_candidate >= 0.0) || !(spec.slow_ms_per_token >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "mock latencies must be >= 0");
  }
}

MockBackend::MockBackend(MockSpec spec, VariantSets variants, std::size_t max_slow_tokens)
    : spec_(spec), descriptor_{"mock", BackendKind::mock, std::move(variants), max_slow_tokens} {
  validate(spec_);
  validate(descriptor_.variants);
  if (max_slow_tokens == 0) throw Error(ErrorCode::invalid_argument, "max_slow_tokens must be >= 1");
}

bool MockBackend::is_ambiguous(std::string_view query_id) const {
  return Stream(spec_.seed, "ambiguous", query_id).uniform() < spec_.ambiguous_fraction;
}

double MockBackend::planned_log_odds(const ScoreRequest& request) const {
  Stream stream(spec_.seed, "score", request.prompt);
  const double draw = stream.normal();
  if (request.list == nullptr) return spec_.noise * draw;
  if (is_ambiguous(request.list->query_id)) return spec_.ambiguous_noise * draw;
  return spec_.noise * draw +
         (is_relevant(*request.list, request.target_index) ? spec_.sharpness : 0.0);
}

TimedReadout MockBackend::score_first_step(const ScoreRequest& request) const {
  if (request.prompt.empty()) throw Error(ErrorCode::invalid_argument, "empty prompt");
  const double z = planned_log_odds(request);

  TimedReadout out;
  out.readout.complete_over = ReadoutCoverage::full_vocab;
  Stream split(spec_.seed, "split", request.prompt);
  const double decision_mass = std::log1p(-kFillerMass);
  spread(out.readout.log_probs, descriptor_.variants.yes_ids, decision_mass + log_sigmoid(z), split);
  spread(out.readout.log_probs, descriptor_.variants.no_ids, decision_mass + log_sigmoid(-z), split);

  int placed = 0;
  for (TokenId id = 0; placed < kFillerTokens; ++id) {
    if (out.readout.log_probs.contains(id)) continue;
    out.readout.log_probs[id] = std::log(kFillerMass / kFillerTokens);
    ++placed;
  }
  out.elapsed_ms = spec_.fast_ms_per_candidate;
  return out;
}

TimedText MockBackend::generate_listwise(const GenerateRequest& request) const {
  if (request.prompt.empty()) throw Error(ErrorCode::invalid_argument, "empty prompt");
  Stream stream(spec_.seed, "generate", request.prompt);
  const bool malformed = stream.uniform() < spec_.malform_rate;
  const bool accurate = stream.uniform() < spec_.slow_accuracy;

  std::vector<std::size_t> order;
  if (request.list != nullptr) {
    order.resize(request.list->candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[stream.below(i)]);
    const auto relevant = std::find_if(order.begin(), order.end(), [&](std::size_t i) {
      return is_relevant(*request.list, i);
    });
    if (relevant != order.end()) {
      if (accurate) {
        std::rotate(order.begin(), relevant, relevant + 1);
      } else if (relevant == order.begin() && order.size() > 1) {
        std::swap(order[0], order[1 + stream.below(order.size() - 1)]);
      }
    }
  }

  nlohmann::ordered_json ranking = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < order.size(); ++r) {
    ranking.push_back({{"id", request.list->candidates[order[r]].id},
                       {"rank", static_cast<std::int64_t>(r + 1)}});
  }
  std::string rationale = "No candidates supplied.";
  if (!order.empty()) {
    rationale = "Best initial order: " + request.list->candidates[order.front()].text + ".";
  }
  std::string text =
      nlohmann::ordered_json{{"ranking", ranking}, {"rationale", rationale}}.dump(
          -1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
  if (malformed) text = "Here is my ranking:\n" + text.substr(0, text.size() / 2);

  const std::size_t budget = request.max_tokens * kMockBytesPerToken;
  if (text.size() > budget) text.resize(budget);
  const std::size_t tokens = (text.size() + kMockBytesPerToken - 1) / kMockBytesPerToken;
  return {std::move(text), spec_.slow_ms_per_token * static_cast<double>(tokens)};
}

}  // namespace tsrank

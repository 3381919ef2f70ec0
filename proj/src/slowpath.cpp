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

#include "tsrank/slowpath.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "tsrank/error.hpp"

namespace tsrank {

std::string_view to_string(FailureReason reason) noexcept {
  switch (reason) {
    case FailureReason::parse_error: return "parse_error";
    case FailureReason::unknown_id: return "unknown_id";
    case FailureReason::duplicate_id: return "duplicate_id";
    case FailureReason::incomplete_coverage: return "incomplete_coverage";
    case FailureReason::non_permutation_ranks: return "non_permutation_ranks";
    case FailureReason::empty_output: return "empty_output";
  }
  return "unknown";
}

std::string_view to_string(Provenance provenance) noexcept {
  switch (provenance) {
    case Provenance::fast_only: return "fast_only";
    case Provenance::slow_json: return "slow_json";
    case Provenance::fast_fallback: return "fast_fallback";
  }
  return "unknown";
}

std::optional<std::string_view> extract_first_json_object(std::string_view raw) {
  const std::size_t start = raw.find('{');
  if (start == std::string_view::npos) return std::nullopt;
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < raw.size(); ++i) {
    const char c = raw[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return raw.substr(start, i - start + 1);
    }
  }
  return std::nullopt;
}

namespace {

SlowResult fail(SlowResult result, FailureReason reason) {
  result.valid = false;
  result.failure_reason = reason;
  return result;
}

// Integral rank value, or nullopt for fractional / out-of-range numbers.
std::optional<std::int64_t> integral_rank(const nlohmann::json& value) {
  if (value.is_number_integer()) return value.get<std::int64_t>();
  if (value.is_number_unsigned()) {
    const auto u = value.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX)) return std::nullopt;
    return static_cast<std::int64_t>(u);
  }
  const double d = value.get<double>();
  if (!std::isfinite(d) || std::floor(d) != d || std::abs(d) > 9.0e15) return std::nullopt;
  return static_cast<std::int64_t>(d);
}

}  // namespace

SlowResult parse_slow_output(std::string_view raw, std::span<const Candidate> expected) {
  SlowResult result;
  if (std::all_of(raw.begin(), raw.end(), [](unsigned char c) { return std::isspace(c) != 0; })) {
    return fail(std::move(result), FailureReason::empty_output);
  }
  const auto object = extract_first_json_object(raw);
  if (!object) return fail(std::move(result), FailureReason::parse_error);
  const auto json = nlohmann::json::parse(*object, nullptr, /*allow_exceptions=*/false);
  if (json.is_discarded() || !json.is_object()) {
    return fail(std::move(result), FailureReason::parse_error);
  }
  const auto ranking = json.find("ranking");
  if (ranking == json.end() || !ranking->is_array()) {
    return fail(std::move(result), FailureReason::parse_error);
  }
  if (const auto rationale = json.find("rationale"); rationale != json.end()) {
    result.rationale = rationale->is_string() ? rationale->get<std::string>() : rationale->dump();
  }

  std::unordered_set<std::string_view> expected_ids;
  std::unordered_map<std::string_view, std::vector<std::string_view>> ids_by_text;
  for (const auto& c : expected) {
    expected_ids.insert(c.id);
    ids_by_text[c.text].push_back(c.id);
  }

  bool unknown = false;
  bool fractional_rank = false;
  for (const auto& entry : *ranking) {
    if (!entry.is_object()) return fail(std::move(result), FailureReason::parse_error);
    const auto rank = entry.find("rank");
    if (rank == entry.end() || !rank->is_number()) {
      return fail(std::move(result), FailureReason::parse_error);
    }
    RankEntry parsed;
    if (const auto r = integral_rank(*rank)) {
      parsed.rank = *r;
    } else {
      fractional_rank = true;
    }

    if (const auto id = entry.find("id"); id != entry.end()) {
      if (!id->is_string()) return fail(std::move(result), FailureReason::parse_error);
      parsed.id = id->get<std::string>();
      if (!expected_ids.contains(parsed.id)) unknown = true;
    } else if (const auto text = entry.find("text"); text != entry.end()) {
      if (!text->is_string()) return fail(std::move(result), FailureReason::parse_error);
      const auto match = ids_by_text.find(text->get_ref<const std::string&>());
      if (match == ids_by_text.end() || match->second.size() != 1) {
        unknown = true;
      } else {
        parsed.id = std::string(match->second.front());
      }
    } else {
      return fail(std::move(result), FailureReason::parse_error);
    }
    result.ranking.push_back(std::move(parsed));
  }

  if (unknown) return fail(std::move(result), FailureReason::unknown_id);
  std::unordered_set<std::string_view> seen;
  for (const auto& e : result.ranking) {
    if (!seen.insert(e.id).second) return fail(std::move(result), FailureReason::duplicate_id);
  }
  if (seen.size() != expected_ids.size()) {
    return fail(std::move(result), FailureReason::incomplete_coverage);
  }
  const auto m = static_cast<std::int64_t>(result.ranking.size());
  std::vector<bool> used(result.ranking.size(), false);
  for (const auto& e : result.ranking) {
    if (fractional_rank || e.rank < 1 || e.rank > m || used[e.rank - 1]) {
      return fail(std::move(result), FailureReason::non_permutation_ranks);
    }
    used[e.rank - 1] = true;
  }
  result.valid = true;
  result.failure_reason.reset();
  return result;
}

FinalRanking final_ranking(const SlowResult& slow, std::span<const std::string> fast_order) {
  const std::unordered_set<std::string_view> fast_ids(fast_order.begin(), fast_order.end());
  if (fast_ids.size() != fast_order.size()) {
    throw Error(ErrorCode::contract, "fast order repeats an id");
  }
  if (!slow.valid) return {{fast_order.begin(), fast_order.end()}, Provenance::fast_fallback};

  if (slow.ranking.size() != fast_order.size() ||
      !std::all_of(slow.ranking.begin(), slow.ranking.end(),
                   [&fast_ids](const RankEntry& e) { return fast_ids.contains(e.id); })) {
    throw Error(ErrorCode::contract, "slow ranking covers a different id set than the fast order");
  }
  std::vector<RankEntry> sorted = slow.ranking;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const RankEntry& a, const RankEntry& b) { return a.rank < b.rank; });
  FinalRanking out{{}, Provenance::slow_json};
  out.order.reserve(sorted.size());
  for (auto& e : sorted) out.order.push_back(std::move(e.id));
  return out;
}

}  // namespace tsrank

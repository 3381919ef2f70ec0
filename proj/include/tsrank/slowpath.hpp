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

// Validation of the slow path's listwise JSON and the fallback contract.
//
// Wire schema produced by the generation backend:
//
//   {"ranking": [{"id": "<ID>", "rank": 1}, ...], "rationale": "..."}
//
// Entries may carry "text" instead of "id"; the text must then match exactly
// one candidate's text. A result is valid only when the ranking is a total
// order: every expected candidate appears once and the ranks are exactly
// {1..m}. Array order carries no meaning.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsrank/core.hpp"

namespace tsrank {

enum class FailureReason {
  parse_error,
  unknown_id,
  duplicate_id,
  incomplete_coverage,
  non_permutation_ranks,
  empty_output,
};

std::string_view to_string(FailureReason reason) noexcept;

struct RankEntry {
  std::string id;
  std::int64_t rank = 0;
};

struct SlowResult {
  std::vector<RankEntry> ranking;
  std::string rationale;
  bool valid = false;
  std::optional<FailureReason> failure_reason;
};

/// Returns the first brace-balanced `{...}` span in `raw`, honoring JSON
/// string literals and escapes. No repair is attempted.
std::optional<std::string_view> extract_first_json_object(std::string_view raw);

/// Never throws; every failure is encoded in the result.
SlowResult parse_slow_output(std::string_view raw,
                             std::span<const Candidate> expected);

enum class Provenance { fast_only, slow_json, fast_fallback };

std::string_view to_string(Provenance provenance) noexcept;

struct FinalRanking {
  std::vector<std::string> order;
  Provenance provenance = Provenance::fast_fallback;
};

/// The slow order by ascending rank when `slow` is valid, otherwise
/// `fast_order` unchanged. Throws Error(contract) if `fast_order` repeats an
/// id or a valid slow result names a different id set.
FinalRanking final_ranking(const SlowResult& slow,
                           std::span<const std::string> fast_order);

}  // namespace tsrank

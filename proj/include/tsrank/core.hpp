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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tsrank {

inline constexpr std::size_t kMaxCandidates = 64;

/// One rankable item. `id` is caller-supplied and opaque; the engine never
/// derives ids from text.
struct Candidate {
  std::string id;
  std::string text;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// An encounter-scoped query and its retrieved candidates, the unit of
/// ranking. `relevant_id` names the signed order in evaluation fixtures and
/// is absent at serving time.
struct CandidateList {
  std::string query_id;
  std::string context;
  std::optional<std::string> patient;
  std::vector<Candidate> candidates;
  std::optional<std::string> relevant_id;
  // Set by fixture construction when the signed order was appended to a
  // top-19 retrieval; carried through for audit only.
  bool oracle_inserted = false;

  std::size_t size() const noexcept { return candidates.size(); }
  std::vector<std::string> ids() const;
};

/// Throws Error(data) unless: 1 <= m <= 64, ids unique and non-empty, texts
/// non-blank, and relevant_id (when present) names exactly one candidate.
void validate(const CandidateList& list);

enum class Label { positive, negative };

struct PointwiseInstance {
  std::string parent;
  std::size_t target_index = 0;
  Label label = Label::negative;
  std::string rendered_prompt;
};

using TokenId = std::int32_t;

/// Token ids whose first-step probabilities are pooled into "yes" and "no".
struct VariantSets {
  std::vector<TokenId> yes_ids;
  std::vector<TokenId> no_ids;
};

/// Throws Error(invalid_argument) if either set is empty or they intersect.
void validate(const VariantSets& variants);

}  // namespace tsrank

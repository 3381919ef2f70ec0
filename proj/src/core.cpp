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

#include "tsrank/core.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <unordered_set>

#include "tsrank/error.hpp"

namespace tsrank {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::contract: return "contract";
    case ErrorCode::template_error: return "template_error";
    case ErrorCode::readout_incomplete: return "readout_incomplete";
    case ErrorCode::degenerate_readout: return "degenerate_readout";
    case ErrorCode::backend_unavailable: return "backend_unavailable";
    case ErrorCode::protocol: return "protocol";
    case ErrorCode::data: return "data";
  }
  return "unknown";
}

namespace {

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

std::vector<std::string> CandidateList::ids() const {
  std::vector<std::string> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) out.push_back(c.id);
  return out;
}

void validate(const CandidateList& list) {
  const auto where = [&list] { return "candidate list '" + list.query_id + "': "; };
  if (list.candidates.empty()) throw Error(ErrorCode::data, where() + "no candidates");
  if (list.candidates.size() > kMaxCandidates) {
    throw Error(ErrorCode::data, where() + std::to_string(list.candidates.size()) +
                                     " candidates exceeds the limit of " +
                                     std::to_string(kMaxCandidates));
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& c : list.candidates) {
    if (c.id.empty()) throw Error(ErrorCode::data, where() + "empty candidate id");
    if (!seen.insert(c.id).second) {
      throw Error(ErrorCode::data, where() + "duplicate candidate id '" + c.id + "'");
    }
    if (is_blank(c.text)) {
      throw Error(ErrorCode::data, where() + "candidate '" + c.id + "' has blank text");
    }
  }
  if (list.relevant_id && !seen.contains(*list.relevant_id)) {
    throw Error(ErrorCode::data,
                where() + "relevant_id '" + *list.relevant_id + "' matches no candidate");
  }
}

void validate(const VariantSets& variants) {
  if (variants.yes_ids.empty() || variants.no_ids.empty()) {
    throw Error(ErrorCode::invalid_argument, "variant sets must both be non-empty");
  }
  for (TokenId id : variants.yes_ids) {
    if (std::find(variants.no_ids.begin(), variants.no_ids.end(), id) != variants.no_ids.end()) {
      throw Error(ErrorCode::invalid_argument,
                  "token id " + std::to_string(id) + " is in both variant sets");
    }
  }
}

}  // namespace tsrank

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

// Prompt rendering.
//
// A template is a system prompt plus a body containing `{{SLOT}}` markers.
// Rendering substitutes the slots in one left-to-right pass (substituted
// values are never rescanned) and emits
//
//   <system>\n\n<body>
//
// with a single newline inserted after the system text when it lacks one.
// Every output is a pure function of (list, target, template, options).

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tsrank/core.hpp"

namespace tsrank {

inline constexpr std::string_view kEmptyPatientMarker = "(none)";
inline constexpr std::size_t kDefaultOtherCandidatesBudget = 4000;

struct PromptTemplate {
  std::string system;
  std::string body;
};

/// The four shipped templates. Defaults are compiled in from templates/ and
/// carry the system prompts byte-for-byte.
struct TemplateSet {
  PromptTemplate pointwise;  // fast path, one candidate highlighted
  PromptTemplate listwise;   // slow path, all candidates by id
  PromptTemplate training;   // rollout policy prompt
  PromptTemplate judge;      // strict rubric judge

  static TemplateSet defaults();
  /// Reads `<dir>/{fast,slow,train,judge}_{system,user}.txt`; files that are
  /// missing fall back to the compiled-in default.
  static TemplateSet load(const std::filesystem::path& dir);
};

struct RenderOptions {
  // Byte budget for the OtherCandidates enumeration.
  std::size_t other_candidates_budget = kDefaultOtherCandidatesBudget;
};

/// Joins the non-target candidate texts with "; " and drops whole entries
/// from the tail until the enumeration plus its "; ...(+N more)" marker fits
/// the budget.
std::string render_other_candidates(const CandidateList& list,
                                    std::size_t target_index,
                                    std::size_t budget);

/// Requires slots CONTEXT, PATIENT, CandidateOrder, OtherCandidates.
std::string render_pointwise_prompt(const CandidateList& list,
                                    std::size_t target_index,
                                    const PromptTemplate& tmpl,
                                    const RenderOptions& options = {});

/// Requires slots CONTEXT, PATIENT, CANDIDATES. Candidates render as one
/// `id: text` line each, in list order.
std::string render_listwise_prompt(const CandidateList& list,
                                   const PromptTemplate& tmpl);

struct JudgeInput {
  std::string context;
  std::optional<std::string> patient;
  std::string candidate_order;
  bool reference_positive = false;
  std::string completion;
};

/// Requires slots CONTEXT, PATIENT, CANDIDATE_ORDER, REFERENCE_LABEL,
/// COMPLETION.
std::string render_judge_prompt(const JudgeInput& input,
                                const PromptTemplate& tmpl);

/// One instance per candidate, in list order; exactly one positive when the
/// list carries a relevant_id.
std::vector<PointwiseInstance> build_pointwise_instances(
    const CandidateList& list, const PromptTemplate& tmpl,
    const RenderOptions& options = {});

}  // namespace tsrank

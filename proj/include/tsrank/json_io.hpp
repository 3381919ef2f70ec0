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

// JSON / JSONL encodings of the engine's records.
//
// Dataset line:  {"query_id","context","patient"?,"candidates":[{"id","text"}],
//                 "relevant_id"?,"oracle_inserted"?}
// Trace line:    {"prompt_id","epoch","completion",
//                 "scores":{"decision","clinical","specificity","safety","format"},
//                 "composite"}
// Shares file:   {"epochs":[{"epoch":0,"easy":34,"medium":56,"hard":10},...]}

#pragma once

#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tsrank/core.hpp"
#include "tsrank/curriculum.hpp"
#include "tsrank/metrics.hpp"
#include "tsrank/pipeline.hpp"

namespace tsrank {

using Json = nlohmann::ordered_json;

/// Throws Error(data) on missing or mistyped fields or an invalid list.
CandidateList candidate_list_from_json(const Json& json);
Json to_json(const CandidateList& list);

/// Parses a JSONL stream; blank lines are ignored. Errors name the source
/// and 1-based line number.
std::vector<CandidateList> parse_dataset(std::istream& in, std::string_view source_name);
std::vector<CandidateList> load_dataset(const std::filesystem::path& path);

Json to_json(const RankOutcome& outcome);
Json to_json(const QualityMetrics& metrics);
Json to_json(const AggregateReport& report);
Json to_json(std::span<const SweepRow> rows);

Json to_json(const RolloutTraceRecord& record);
RolloutTraceRecord trace_record_from_json(const Json& json);

Json to_json(const BucketShares& shares);
std::vector<EpochShares> shares_from_json(const Json& json);
Json to_json(const AccountingReport& report);
Json to_json(std::span<const PlanEntry> plan);

/// Compact single-line dump used for JSONL.
std::string dump_line(const Json& json);
/// Pretty dump with a trailing newline, used for report files.
std::string dump_pretty(const Json& json);

}  // namespace tsrank

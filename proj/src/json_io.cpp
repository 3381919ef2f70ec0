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

#include "tsrank/json_io.hpp"

#include <fstream>

#include "tsrank/error.hpp"

namespace tsrank {
namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::data, what); }

const Json& field(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) bad(std::string("missing field '") + key + "'");
  return *it;
}

std::string string_field(const Json& obj, const char* key) {
  const Json& v = field(obj, key);
  if (!v.is_string()) bad(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

Json optional_string(const std::optional<std::string>& value) {
  return value ? Json(*value) : Json(nullptr);
}

}  // namespace

CandidateList candidate_list_from_json(const Json& json) {
  if (!json.is_object()) bad("candidate list must be a JSON object");
  CandidateList list;
  list.query_id = string_field(json, "query_id");
  list.context = string_field(json, "context");
  if (const auto it = json.find("patient"); it != json.end() && !it->is_null()) {
    if (!it->is_string()) bad("field 'patient' must be a string or null");
    list.patient = it->get<std::string>();
  }
  const Json& candidates = field(json, "candidates");
  if (!candidates.is_array()) bad("field 'candidates' must be an array");
  for (const auto& c : candidates) {
    if (!c.is_object()) bad("each candidate must be an object");
    list.candidates.push_back({string_field(c, "id"), string_field(c, "text")});
  }
  if (const auto it = json.find("relevant_id"); it != json.end() && !it->is_null()) {
    if (!it->is_string()) bad("field 'relevant_id' must be a string or null");
    list.relevant_id = it->get<std::string>();
  }
  if (const auto it = json.find("oracle_inserted"); it != json.end()) {
    if (!it->is_boolean()) bad("field 'oracle_inserted' must be a boolean");
    list.oracle_inserted = it->get<bool>();
  }
  validate(list);
  return list;
}

Json to_json(const CandidateList& list) {
  Json out;
  out["query_id"] = list.query_id;
  out["context"] = list.context;
  if (list.patient) out["patient"] = *list.patient;
  Json candidates = Json::array();
  for (const auto& c : list.candidates) candidates.push_back({{"id", c.id}, {"text", c.text}});
  out["candidates"] = std::move(candidates);
  if (list.relevant_id) out["relevant_id"] = *list.relevant_id;
  if (list.oracle_inserted) out["oracle_inserted"] = true;
  return out;
}

std::vector<CandidateList> parse_dataset(std::istream& in, std::string_view source_name) {
  std::vector<CandidateList> out;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(number) + ": ";
    const auto json = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (json.is_discarded()) bad(where + "invalid JSON");
    try {
      out.push_back(candidate_list_from_json(json));
    } catch (const Error& e) {
      bad(where + e.what());
    }
  }
  return out;
}

std::vector<CandidateList> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open dataset '" + path.string() + "'");
  return parse_dataset(in, path.string());
}

Json to_json(const RankOutcome& o) {
  Json out;
  out["query_id"] = o.query_id;
  out["final_order"] = o.final_order;
  out["fast_order"] = o.fast_order;
  out["provenance"] = std::string(to_string(o.provenance));
  out["gated"] = o.gated;
  out["u"] = o.u;
  out["threshold"] = o.threshold;
  out["z"] = o.z_values;
  out["fast_ms_per_candidate"] = o.fast_ms_per_candidate;
  out["fast_query_ms"] = o.fast_query_ms;
  out["slow_decode_ms"] = o.slow_decode_ms;
  out["slow_failure"] =
      o.slow_failure ? Json(std::string(to_string(*o.slow_failure))) : Json(nullptr);
  out["slow_error"] = optional_string(o.slow_error);
  out["relevant_id"] = optional_string(o.relevant_id);
  return out;
}

Json to_json(const QualityMetrics& m) {
  Json recall = Json::object();
  for (const auto& [k, v] : m.recall_at) recall[std::to_string(k)] = v;
  return {{"recall_at", std::move(recall)},
          {"mrr", m.mrr},
          {"map_at_20", m.map_at_20},
          {"ndcg_at_20", m.ndcg_at_20}};
}

Json to_json(const AggregateReport& r) {
  Json out;
  out["empty"] = r.empty;
  out["query_count"] = r.query_count;
  out["evaluated_count"] = r.evaluated_count;
  out["skipped_count"] = r.skipped_count;
  out["gated_count"] = r.gated_count;
  out["fast"] = to_json(r.fast);
  out["two_speed"] = to_json(r.two_speed);
  out["gate_trigger_rate_pct_avg"] = r.gate_trigger_rate_pct_avg;
  out["fast_ms_per_candidate_avg"] = r.fast_ms_per_candidate_avg;
  out["fast_query_ms_avg"] = r.fast_query_ms_avg;
  out["slow_decode_ms_per_query_avg"] = r.slow_decode_ms_per_query_avg;
  out["two_speed_query_ms_avg"] = r.two_speed_query_ms_avg;
  return out;
}

Json to_json(std::span<const SweepRow> rows) {
  Json out = Json::array();
  for (const auto& row : rows) {
    out.push_back({{"threshold", row.threshold}, {"report", to_json(row.report)}});
  }
  return out;
}

Json to_json(const RolloutTraceRecord& record) {
  Json scores;
  for (Axis a : kAxes) scores[std::string(to_string(a))] = record.axis_scores[index(a)];
  Json out;
  out["prompt_id"] = record.prompt_id;
  out["epoch"] = record.epoch;
  out["completion"] = record.completion;
  out["scores"] = std::move(scores);
  out["composite"] = record.composite;
  return out;
}

RolloutTraceRecord trace_record_from_json(const Json& json) {
  if (!json.is_object()) bad("trace record must be a JSON object");
  RolloutTraceRecord record;
  record.prompt_id = string_field(json, "prompt_id");
  const Json& epoch = field(json, "epoch");
  if (!epoch.is_number_integer() || epoch.get<long long>() < 0) {
    bad("field 'epoch' must be a non-negative integer");
  }
  record.epoch = epoch.get<int>();
  record.completion = string_field(json, "completion");
  const Json& scores = field(json, "scores");
  if (!scores.is_object() || scores.size() != kAxisCount) {
    bad("field 'scores' must hold exactly the five axis scores");
  }
  for (Axis a : kAxes) {
    const Json& v = field(scores, std::string(to_string(a)).c_str());
    if (!v.is_number()) bad("axis score '" + std::string(to_string(a)) + "' must be a number");
    const double s = v.get<double>();
    if (s < kScoreLowerBound || s > kScoreUpperBound) {
      bad("axis score '" + std::string(to_string(a)) + "' outside [-3, 3]");
    }
    record.axis_scores[index(a)] = s;
  }
  const Json& composite = field(json, "composite");
  if (!composite.is_number()) bad("field 'composite' must be a number");
  record.composite = composite.get<double>();
  return record;
}

Json to_json(const BucketShares& shares) {
  return {{"easy", shares.easy}, {"medium", shares.medium}, {"hard", shares.hard}};
}

std::vector<EpochShares> shares_from_json(const Json& json) {
  if (!json.is_object()) bad("shares file must be a JSON object");
  const Json& epochs = field(json, "epochs");
  if (!epochs.is_array() || epochs.empty()) bad("field 'epochs' must be a non-empty array");
  std::vector<EpochShares> out;
  for (const auto& e : epochs) {
    if (!e.is_object()) bad("each epoch entry must be an object");
    EpochShares row;
    const Json& epoch = field(e, "epoch");
    if (!epoch.is_number_integer()) bad("field 'epoch' must be an integer");
    row.epoch = epoch.get<int>();
    const auto share = [&](const char* key) {
      const Json& v = field(e, key);
      if (!v.is_number()) bad(std::string("share '") + key + "' must be a number");
      return v.get<double>();
    };
    row.shares = {share("easy"), share("medium"), share("hard")};
    if (!out.empty() && row.epoch <= out.back().epoch) bad("epochs must be strictly increasing");
    out.push_back(row);
  }
  return out;
}

Json to_json(const AccountingReport& report) {
  Json epochs = Json::array();
  for (const auto& e : report.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"shares", to_json(e.shares)},
                      {"rollouts_per_prompt", e.rollouts_per_prompt},
                      {"tokens_per_prompt", e.tokens_per_prompt}});
  }
  Json baselines = Json::array();
  for (const auto& b : report.baselines) {
    baselines.push_back({{"n_rollouts", b.baseline.n_rollouts},
                         {"rationale_budget_tokens", b.baseline.rationale_budget_tokens},
                         {"tokens_per_prompt", b.tokens_per_prompt},
                         {"saving_pct", b.saving_pct}});
  }
  Json out;
  out["epochs"] = std::move(epochs);
  out["rollout_reduction_pct"] = report.rollout_reduction_pct;
  out["token_reduction_pct"] = report.token_reduction_pct;
  out["baselines"] = std::move(baselines);
  out["derivations"] = report.derivations;
  return out;
}

Json to_json(std::span<const PlanEntry> plan) {
  Json out = Json::array();
  for (const auto& p : plan) {
    out.push_back({{"prompt_id", p.prompt_id},
                   {"q", p.q},
                   {"r_bar", p.r_bar ? Json(*p.r_bar) : Json(nullptr)},
                   {"bucket", std::string(to_string(p.bucket))},
                   {"n_rollouts", p.config.n_rollouts},
                   {"temperature", p.config.temperature},
                   {"nucleus_p", p.config.nucleus_p},
                   {"rationale_budget_tokens", p.config.rationale_budget_tokens}});
  }
  return out;
}

std::string dump_line(const Json& json) {
  return json.dump(-1, ' ', false, Json::error_handler_t::replace);
}

std::string dump_pretty(const Json& json) {
  return json.dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
}

}  // namespace tsrank

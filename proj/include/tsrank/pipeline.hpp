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

// Two-speed ranking of one candidate list:
//
//   1. render and score m pointwise prompts (up to `batch` in flight)
//   2. z -> softmax -> normalized entropy U
//   3. U <= T: return candidates by descending z (ties: original index)
//   4. U >  T: render the listwise prompt, generate, validate the JSON and
//      take its order, or fall back to the fast order
//
// Scoring failures propagate. Generation failures after gating degrade to
// the fast order.

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsrank/backend.hpp"
#include "tsrank/core.hpp"
#include "tsrank/gate.hpp"
#include "tsrank/metrics.hpp"
#include "tsrank/prompts.hpp"
#include "tsrank/slowpath.hpp"

namespace tsrank {

struct PipelineConfig {
  double threshold = kDefaultUncertaintyCap;
  std::size_t batch = 1;
  std::size_t workers = 1;  // queries ranked concurrently by evaluate_corpus
  std::vector<std::size_t> recall_cutoffs = kDefaultRecallCutoffs;
  RenderOptions render;
  TemplateSet templates = TemplateSet::defaults();
};

struct RankOutcome {
  std::string query_id;
  std::vector<std::string> final_order;
  std::vector<std::string> fast_order;
  Provenance provenance = Provenance::fast_only;
  double u = 0.0;
  double threshold = kDefaultUncertaintyCap;
  std::vector<double> z_values;
  double fast_ms_per_candidate = 0.0;
  double fast_query_ms = 0.0;
  double slow_decode_ms = 0.0;
  bool gated = false;
  std::optional<FailureReason> slow_failure;  // set when the slow JSON was rejected
  std::optional<std::string> slow_error;      // set when generation itself failed
  std::optional<std::string> relevant_id;
};

/// Output of the scoring half; lets a threshold sweep reuse one scoring pass.
struct FastPhase {
  std::vector<double> z_values;
  std::vector<std::string> fast_order;
  double u = 0.0;
  double fast_ms_per_candidate = 0.0;
  double fast_query_ms = 0.0;
};

FastPhase score_fast_phase(const CandidateList& list, const Backend& backend,
                           const PipelineConfig& config);

/// Descending z, ties broken by ascending original index.
std::vector<std::string> order_by_log_odds(const CandidateList& list,
                                           std::span<const double> z);

/// Runs the slow path for an already-gated list. Never throws for backend
/// failures; those surface as fast_fallback.
RankOutcome complete_with_slow_path(const CandidateList& list, const FastPhase& fast,
                                    double threshold, const Backend& backend,
                                    const PipelineConfig& config);

RankOutcome rank_query(const CandidateList& list, double threshold,
                       const Backend& backend, const PipelineConfig& config);

QueryObservation to_observation(const RankOutcome& outcome);

struct EvaluationSummary {
  AggregateReport report;
  std::size_t warnings = 0;
};

/// Ranks every list and hands outcomes to `sink` in input order. Lists
/// without a relevant_id are ranked (latency telemetry) but excluded from
/// quality metrics and counted as skipped.
EvaluationSummary evaluate_corpus(std::span<const CandidateList> corpus, double threshold,
                                  const Backend& backend, const PipelineConfig& config,
                                  const std::function<void(const RankOutcome&)>& sink = {});

struct SweepRow {
  double threshold = 0.0;
  AggregateReport report;
};

/// Evaluates each threshold over one shared scoring pass; each gated list
/// is generated at most once and the result reused across thresholds.
std::vector<SweepRow> sweep_thresholds(std::span<const CandidateList> corpus,
                                       std::span<const double> thresholds,
                                       const Backend& backend, const PipelineConfig& config);

std::string format_sweep_table(std::span<const SweepRow> rows);

}  // namespace tsrank

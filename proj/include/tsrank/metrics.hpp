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

// IR quality metrics for single-relevant, binary-gain lists, plus the
// latency / budget algebra used to plan two-speed serving.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tsrank {

/// 1-based position of `relevant` in `order`; throws Error(contract) when
/// absent.
std::size_t rank_of(std::span<const std::string> order, std::string_view relevant);

// All cutoffs require k >= 1. A cutoff beyond the list length covers the
// whole list.
int recall_at_k(std::span<const std::string> order, std::string_view relevant,
                std::size_t k);
double ndcg_at_k(std::span<const std::string> order, std::string_view relevant,
                 std::size_t k);
double mrr(std::span<const std::string> order, std::string_view relevant);
double average_precision_at_k(std::span<const std::string> order,
                              std::string_view relevant, std::size_t k);

/// gate_fraction * slow_ms_per_gated_query.
double expected_slow_overhead(double gate_fraction, double slow_ms_per_gated_query);
/// (m / batch) * per_candidate_ms.
double fast_query_time(double per_candidate_ms, std::size_t m, std::size_t batch);
double two_speed_query_time(double fast_query_ms, double gate_fraction,
                            double slow_ms_per_gated_query);

struct QualityMetrics {
  std::map<std::size_t, double> recall_at;
  double mrr = 0.0;
  double map_at_20 = 0.0;
  double ndcg_at_20 = 0.0;
};

/// Per-query inputs to aggregation; pipeline outcomes map onto this.
struct QueryObservation {
  std::vector<std::string> fast_order;
  std::vector<std::string> final_order;
  std::optional<std::string> relevant_id;
  bool gated = false;
  double fast_ms_per_candidate = 0.0;
  double fast_query_ms = 0.0;
  double slow_decode_ms = 0.0;
};

struct AggregateReport {
  bool empty = true;
  std::size_t query_count = 0;      // every ranked query
  std::size_t evaluated_count = 0;  // queries with ground truth
  std::size_t skipped_count = 0;    // queries without ground truth
  std::size_t gated_count = 0;
  QualityMetrics fast;       // metrics of the fast ordering
  QualityMetrics two_speed;  // metrics of the final ordering
  double gate_trigger_rate_pct_avg = 0.0;
  double fast_ms_per_candidate_avg = 0.0;
  double fast_query_ms_avg = 0.0;
  double slow_decode_ms_per_query_avg = 0.0;  // over gated queries only
  double two_speed_query_ms_avg = 0.0;
};

inline const std::vector<std::size_t> kDefaultRecallCutoffs = {1, 5, 10, 20};

/// Quality metrics average over queries with ground truth; gate rate and
/// latency average over every query. Means are plain per-query means.
AggregateReport aggregate(std::span<const QueryObservation> queries,
                          std::span<const std::size_t> recall_cutoffs = kDefaultRecallCutoffs);

/// Aligned text table: R@1 and nDCG@20 for fast and two-speed, gate %, slow
/// ms per gated query.
std::string format_report_table(std::string_view label, const AggregateReport& report);

}  // namespace tsrank

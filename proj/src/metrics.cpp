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

#include "tsrank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "tsrank/error.hpp"

namespace tsrank {
namespace {

void require_cutoff(std::size_t k) {
  if (k == 0) throw Error(ErrorCode::contract, "metric cutoff must be >= 1");
}

void add_metrics(QualityMetrics& sum, std::span<const std::string> order,
                 const std::string& relevant, std::span<const std::size_t> cutoffs) {
  for (std::size_t k : cutoffs) sum.recall_at[k] += recall_at_k(order, relevant, k);
  sum.mrr += mrr(order, relevant);
  sum.map_at_20 += average_precision_at_k(order, relevant, 20);
  sum.ndcg_at_20 += ndcg_at_k(order, relevant, 20);
}

void divide(QualityMetrics& m, double n) {
  for (auto& [k, v] : m.recall_at) v /= n;
  m.mrr /= n;
  m.map_at_20 /= n;
  m.ndcg_at_20 /= n;
}

}  // namespace

std::size_t rank_of(std::span<const std::string> order, std::string_view relevant) {
  const auto it = std::find(order.begin(), order.end(), relevant);
  if (it == order.end()) {
    throw Error(ErrorCode::contract, "relevant id '" + std::string(relevant) + "' not in order");
  }
  return static_cast<std::size_t>(it - order.begin()) + 1;
}

int recall_at_k(std::span<const std::string> order, std::string_view relevant, std::size_t k) {
  require_cutoff(k);
  return rank_of(order, relevant) <= k ? 1 : 0;
}

double ndcg_at_k(std::span<const std::string> order, std::string_view relevant, std::size_t k) {
  require_cutoff(k);
  const std::size_t rank = rank_of(order, relevant);
  // Ideal DCG is 1: the single relevant item at rank 1.
  return rank <= k ? 1.0 / std::log2(static_cast<double>(rank) + 1.0) : 0.0;
}

double mrr(std::span<const std::string> order, std::string_view relevant) {
  return 1.0 / static_cast<double>(rank_of(order, relevant));
}

double average_precision_at_k(std::span<const std::string> order, std::string_view relevant,
                              std::size_t k) {
  require_cutoff(k);
  const std::size_t rank = rank_of(order, relevant);
  return rank <= k ? 1.0 / static_cast<double>(rank) : 0.0;
}

double expected_slow_overhead(double gate_fraction, double slow_ms_per_gated_query) {
  return gate_fraction * slow_ms_per_gated_query;
}

double fast_query_time(double per_candidate_ms, std::size_t m, std::size_t batch) {
  if (batch == 0 || m == 0) throw Error(ErrorCode::invalid_argument, "m and batch must be >= 1");
  return static_cast<double>(m) / static_cast<double>(batch) * per_candidate_ms;
}

double two_speed_query_time(double fast_query_ms, double gate_fraction,
                            double slow_ms_per_gated_query) {
  return fast_query_ms + expected_slow_overhead(gate_fraction, slow_ms_per_gated_query);
}

AggregateReport aggregate(std::span<const QueryObservation> queries,
                          std::span<const std::size_t> recall_cutoffs) {
  AggregateReport report;
  for (std::size_t k : recall_cutoffs) {
    require_cutoff(k);
    report.fast.recall_at[k] = 0.0;
    report.two_speed.recall_at[k] = 0.0;
  }
  report.query_count = queries.size();
  report.empty = queries.empty();
  if (queries.empty()) return report;

  double slow_total = 0.0;
  for (const auto& q : queries) {
    report.fast_ms_per_candidate_avg += q.fast_ms_per_candidate;
    report.fast_query_ms_avg += q.fast_query_ms;
    if (q.gated) {
      ++report.gated_count;
      slow_total += q.slow_decode_ms;
    }
    if (!q.relevant_id) {
      ++report.skipped_count;
      continue;
    }
    ++report.evaluated_count;
    add_metrics(report.fast, q.fast_order, *q.relevant_id, recall_cutoffs);
    add_metrics(report.two_speed, q.final_order, *q.relevant_id, recall_cutoffs);
  }
  const auto n = static_cast<double>(queries.size());
  report.fast_ms_per_candidate_avg /= n;
  report.fast_query_ms_avg /= n;
  report.gate_trigger_rate_pct_avg = 100.0 * static_cast<double>(report.gated_count) / n;
  if (report.gated_count > 0) {
    report.slow_decode_ms_per_query_avg = slow_total / static_cast<double>(report.gated_count);
  }
  report.two_speed_query_ms_avg =
      two_speed_query_time(report.fast_query_ms_avg, report.gate_trigger_rate_pct_avg / 100.0,
                           report.slow_decode_ms_per_query_avg);
  if (report.evaluated_count > 0) {
    divide(report.fast, static_cast<double>(report.evaluated_count));
    divide(report.two_speed, static_cast<double>(report.evaluated_count));
  }
  return report;
}

std::string format_report_table(std::string_view label, const AggregateReport& report) {
  const auto r1 = [](const QualityMetrics& m) {
    const auto it = m.recall_at.find(1);
    return it == m.recall_at.end() ? 0.0 : it->second;
  };
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %8s %9s %8s %9s %16s\n", "Model", "Fast", "", "Two-Speed",
                "", "Gate / Slow");
  out += line;
  std::snprintf(line, sizeof line, "%-24s %8s %9s %8s %9s %16s\n", "", "R@1", "nDCG@20", "R@1",
                "nDCG@20", "% / ms/query");
  out += line;
  out += std::string(80, '-') + "\n";
  if (report.empty) {
    std::snprintf(line, sizeof line, "%-24s (no queries)\n", std::string(label).c_str());
    return out + line;
  }
  char gate[48];
  std::snprintf(gate, sizeof gate, "%.0f / %.0f", report.gate_trigger_rate_pct_avg,
                report.slow_decode_ms_per_query_avg);
  std::snprintf(line, sizeof line, "%-24s %8.2f %9.3f %8.2f %9.3f %16s\n",
                std::string(label).c_str(), r1(report.fast), report.fast.ndcg_at_20,
                r1(report.two_speed), report.two_speed.ndcg_at_20, gate);
  out += line;
  std::snprintf(line, sizeof line,
                "queries %zu (evaluated %zu, skipped %zu), gated %zu, fast %.2f ms/candidate\n",
                report.query_count, report.evaluated_count, report.skipped_count,
                report.gated_count, report.fast_ms_per_candidate_avg);
  out += line;
  return out;
}

}  // namespace tsrank

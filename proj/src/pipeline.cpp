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

#include "tsrank/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include <spdlog/spdlog.h>

#include "tsrank/error.hpp"
#include "tsrank/scoring.hpp"

namespace tsrank {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Runs fn(i) for i in [0, n) on up to `limit` threads. The first exception
// thrown by any task is rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t limit, Fn&& fn) {
  const std::size_t threads = std::min(std::max<std::size_t>(limit, 1), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void require_threshold(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "uncertainty cap must be in [0, 1]");
  }
}

RankOutcome fast_only_outcome(const CandidateList& list, const FastPhase& fast, double threshold) {
  RankOutcome out;
  out.query_id = list.query_id;
  out.final_order = fast.fast_order;
  out.fast_order = fast.fast_order;
  out.provenance = Provenance::fast_only;
  out.u = fast.u;
  out.threshold = threshold;
  out.z_values = fast.z_values;
  out.fast_ms_per_candidate = fast.fast_ms_per_candidate;
  out.fast_query_ms = fast.fast_query_ms;
  out.relevant_id = list.relevant_id;
  return out;
}

}  // namespace

std::vector<std::string> order_by_log_odds(const CandidateList& list, std::span<const double> z) {
  if (z.size() != list.candidates.size()) {
    throw Error(ErrorCode::contract, "one log-odds value per candidate is required");
  }
  std::vector<std::size_t> index(z.size());
  std::iota(index.begin(), index.end(), std::size_t{0});
  std::stable_sort(index.begin(), index.end(),
                   [&z](std::size_t a, std::size_t b) { return z[a] > z[b]; });
  std::vector<std::string> order;
  order.reserve(index.size());
  for (std::size_t i : index) order.push_back(list.candidates[i].id);
  return order;
}

FastPhase score_fast_phase(const CandidateList& list, const Backend& backend,
                           const PipelineConfig& config) {
  validate(list);
  if (config.batch == 0) throw Error(ErrorCode::invalid_argument, "batch must be >= 1");
  const std::size_t m = list.candidates.size();
  const auto& variants = backend.descriptor().variants;

  std::vector<double> z(m);
  std::vector<double> call_ms(m);
  const auto start = Clock::now();
  parallel_for(m, config.batch, [&](std::size_t j) {
    const std::string prompt =
        render_pointwise_prompt(list, j, config.templates.pointwise, config.render);
    const TimedReadout scored = backend.score_first_step({prompt, &list, j});
    validate(scored.readout);
    z[j] = fast_score(first_step_log_odds(scored.readout, variants)).z;
    call_ms[j] = scored.elapsed_ms;
  });

  FastPhase fast;
  fast.fast_query_ms = ms_since(start);
  if (backend.simulated_timing()) {
    // Modeled wall time: waves of `batch` calls, each as slow as its slowest.
    fast.fast_query_ms = 0.0;
    for (std::size_t begin = 0; begin < m; begin += config.batch) {
      const auto end = call_ms.begin() + static_cast<std::ptrdiff_t>(std::min(m, begin + config.batch));
      fast.fast_query_ms += *std::max_element(call_ms.begin() + static_cast<std::ptrdiff_t>(begin), end);
    }
  }
  fast.fast_ms_per_candidate =
      std::accumulate(call_ms.begin(), call_ms.end(), 0.0) / static_cast<double>(m);
  fast.u = normalized_entropy(listwise_distribution(z));
  fast.fast_order = order_by_log_odds(list, z);
  fast.z_values = std::move(z);
  return fast;
}

RankOutcome complete_with_slow_path(const CandidateList& list, const FastPhase& fast,
                                    double threshold, const Backend& backend,
                                    const PipelineConfig& config) {
  RankOutcome out = fast_only_outcome(list, fast, threshold);
  out.gated = true;

  SlowResult slow;
  const auto start = Clock::now();
  try {
    const std::string prompt = render_listwise_prompt(list, config.templates.listwise);
    TimedText generated =
        backend.generate_listwise({prompt, backend.descriptor().max_slow_tokens, &list});
    out.slow_decode_ms = generated.elapsed_ms;
    slow = parse_slow_output(generated.text, list.candidates);
    out.slow_failure = slow.failure_reason;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::backend_unavailable && e.code() != ErrorCode::protocol) throw;
    out.slow_error = e.what();
    out.slow_decode_ms = backend.simulated_timing() ? 0.0 : ms_since(start);
    spdlog::warn("query '{}': slow path failed, using fast order: {}", list.query_id, e.what());
  }
  FinalRanking final = final_ranking(slow, fast.fast_order);
  out.final_order = std::move(final.order);
  out.provenance = final.provenance;
  return out;
}

RankOutcome rank_query(const CandidateList& list, double threshold, const Backend& backend,
                       const PipelineConfig& config) {
  require_threshold(threshold);
  const FastPhase fast = score_fast_phase(list, backend, config);
  if (gate_decision(fast.u, threshold).route == Route::fast) {
    return fast_only_outcome(list, fast, threshold);
  }
  return complete_with_slow_path(list, fast, threshold, backend, config);
}

QueryObservation to_observation(const RankOutcome& outcome) {
  return {outcome.fast_order,         outcome.final_order,   outcome.relevant_id,
          outcome.gated,              outcome.fast_ms_per_candidate, outcome.fast_query_ms,
          outcome.slow_decode_ms};
}

EvaluationSummary evaluate_corpus(std::span<const CandidateList> corpus, double threshold,
                                  const Backend& backend, const PipelineConfig& config,
                                  const std::function<void(const RankOutcome&)>& sink) {
  require_threshold(threshold);
  std::vector<RankOutcome> outcomes(corpus.size());
  parallel_for(corpus.size(), config.workers, [&](std::size_t i) {
    outcomes[i] = rank_query(corpus[i], threshold, backend, config);
  });

  EvaluationSummary summary;
  std::vector<QueryObservation> observations;
  observations.reserve(outcomes.size());
  for (const auto& outcome : outcomes) {
    if (!outcome.relevant_id) {
      ++summary.warnings;
      spdlog::warn("query '{}' has no relevant_id; excluded from quality metrics",
                   outcome.query_id);
    }
    if (sink) sink(outcome);
    observations.push_back(to_observation(outcome));
  }
  summary.report = aggregate(observations, config.recall_cutoffs);
  return summary;
}

std::vector<SweepRow> sweep_thresholds(std::span<const CandidateList> corpus,
                                       std::span<const double> thresholds,
                                       const Backend& backend, const PipelineConfig& config) {
  if (thresholds.empty()) throw Error(ErrorCode::invalid_argument, "no thresholds to sweep");
  for (double t : thresholds) require_threshold(t);
  const double lowest = *std::min_element(thresholds.begin(), thresholds.end());

  std::vector<FastPhase> fast(corpus.size());
  std::vector<std::optional<RankOutcome>> slow(corpus.size());
  parallel_for(corpus.size(), config.workers, [&](std::size_t i) {
    fast[i] = score_fast_phase(corpus[i], backend, config);
    if (gate_decision(fast[i].u, lowest).route == Route::slow) {
      slow[i] = complete_with_slow_path(corpus[i], fast[i], lowest, backend, config);
    }
  });

  std::vector<SweepRow> rows;
  for (double t : thresholds) {
    std::vector<QueryObservation> observations;
    observations.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const bool gated = gate_decision(fast[i].u, t).route == Route::slow;
      observations.push_back(to_observation(gated ? *slow[i] : fast_only_outcome(corpus[i], fast[i], t)));
    }
    rows.push_back({t, aggregate(observations, config.recall_cutoffs)});
  }
  return rows;
}

std::string format_sweep_table(std::span<const SweepRow> rows) {
  const auto r1 = [](const QualityMetrics& m) {
    const auto it = m.recall_at.find(1);
    return it == m.recall_at.end() ? 0.0 : it->second;
  };
  std::string out;
  char line[200];
  std::snprintf(line, sizeof line, "%6s %8s %9s %9s %9s %9s %12s\n", "T", "gate %", "R@1 fast",
                "R@1 2spd", "nDCG fast", "nDCG 2spd", "slow ms/q");
  out += line;
  out += std::string(68, '-') + "\n";
  for (const auto& row : rows) {
    std::snprintf(line, sizeof line, "%6.2f %8.1f %9.3f %9.3f %9.3f %9.3f %12.1f\n", row.threshold,
                  row.report.gate_trigger_rate_pct_avg, r1(row.report.fast), r1(row.report.two_speed),
                  row.report.fast.ndcg_at_20, row.report.two_speed.ndcg_at_20,
                  row.report.slow_decode_ms_per_query_avg);
    out += line;
  }
  return out;
}

}  // namespace tsrank

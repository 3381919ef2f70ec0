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

#include "tsrank/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_map>

#include "tsrank/error.hpp"
#include "tsrank/json_io.hpp"

namespace tsrank {
namespace {

double statistic(const RolloutTraceRecord& record, TrendStatistic rho) {
  return rho == TrendStatistic::decision_axis ? record.axis_scores[index(Axis::decision)]
                                              : record.composite;
}

std::string format(const char* fmt, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

}  // namespace

std::string_view to_string(Bucket bucket) noexcept {
  switch (bucket) {
    case Bucket::easy: return "easy";
    case Bucket::medium: return "medium";
    case Bucket::hard: return "hard";
  }
  return "unknown";
}

BucketConfigs default_bucket_configs() {
  return {{{Bucket::easy, 2, 0.2, 0.80, 100},
           {Bucket::medium, 4, 0.4, 0.92, 200},
           {Bucket::hard, 6, 0.7, 0.97, 300}}};
}

void validate(const BucketConfigs& configs) {
  for (Bucket b : kBuckets) {
    const auto& c = configs[static_cast<std::size_t>(b)];
    if (c.bucket != b) throw Error(ErrorCode::invalid_argument, "bucket configs out of order");
    if (c.n_rollouts < 1 || c.rationale_budget_tokens < 1 || !(c.nucleus_p > 0.0 && c.nucleus_p <= 1.0)) {
      throw Error(ErrorCode::invalid_argument,
                  "invalid config for bucket '" + std::string(to_string(b)) + "'");
    }
  }
}

void validate(const CurriculumThresholds& t) {
  // Equal cutoffs are allowed: quantiles of a constant population coincide.
  if (!(0.0 <= t.q_med && t.q_med <= t.q_hard && t.q_hard <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "require 0 <= q_med <= q_hard <= 1");
  }
  if (!(t.r_hard < t.r_med && t.r_med < t.r_easy)) {
    throw Error(ErrorCode::invalid_argument, "require r_hard < r_med < r_easy");
  }
}

double epoch_trend(std::span<const RolloutTraceRecord> trace, std::string_view prompt_id,
                   int epoch, TrendStatistic rho) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& record : trace) {
    if (record.epoch == epoch && record.prompt_id == prompt_id) {
      total += statistic(record, rho);
      ++count;
    }
  }
  if (count == 0) {
    throw Error(ErrorCode::data, "no trace records for prompt '" + std::string(prompt_id) +
                                     "' in epoch " + std::to_string(epoch));
  }
  return total / static_cast<double>(count);
}

std::pair<double, double> quantile_cutoffs(std::span<const double> q_values, double med_quantile,
                                           double hard_quantile) {
  if (q_values.empty()) throw Error(ErrorCode::invalid_argument, "no uncertainty values");
  if (!(0.0 < med_quantile && med_quantile < hard_quantile && hard_quantile < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "require 0 < med_quantile < hard_quantile < 1");
  }
  std::vector<double> sorted(q_values.begin(), q_values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  const auto nearest_rank = [&](double quantile) {
    // The epsilon keeps q*n landing exactly on an integer from rounding up
    // (0.9 * 10 is 9.000000000000002 in binary).
    const double rank = std::ceil(quantile * n - 1e-9);
    const auto i = static_cast<std::size_t>(std::clamp(rank, 1.0, n)) - 1;
    return sorted[i];
  };
  return {nearest_rank(med_quantile), nearest_rank(hard_quantile)};
}

Bucket assign_bucket(double q, std::optional<double> r_bar,
                     const CurriculumThresholds& t) noexcept {
  if (q >= t.q_hard || (r_bar && *r_bar < t.r_hard)) return Bucket::hard;
  if ((q >= t.q_med && q < t.q_hard) || (r_bar && *r_bar >= t.r_hard && *r_bar < t.r_med)) {
    return Bucket::medium;
  }
  return Bucket::easy;
}

double BucketShares::of(Bucket bucket) const noexcept {
  switch (bucket) {
    case Bucket::easy: return easy;
    case Bucket::medium: return medium;
    case Bucket::hard: return hard;
  }
  return 0.0;
}

BucketShares bucket_shares(const std::map<std::string, Bucket>& assignments) {
  if (assignments.empty()) throw Error(ErrorCode::invalid_argument, "no bucket assignments");
  std::array<std::size_t, 3> counts{};
  for (const auto& [prompt, bucket] : assignments) ++counts[static_cast<std::size_t>(bucket)];
  const auto pct = [&](Bucket b) {
    const double raw = 100.0 * static_cast<double>(counts[static_cast<std::size_t>(b)]) /
                       static_cast<double>(assignments.size());
    return std::round(raw * 10.0) / 10.0;
  };
  return {pct(Bucket::easy), pct(Bucket::medium), pct(Bucket::hard)};
}

AccountingReport compute_accounting(std::span<const EpochShares> epochs,
                                    const BucketConfigs& configs,
                                    std::span<const FixedBaseline> baselines) {
  if (epochs.empty()) throw Error(ErrorCode::invalid_argument, "no epochs to account");
  validate(configs);
  AccountingReport report;
  for (const auto& e : epochs) {
    const double sum = e.shares.easy + e.shares.medium + e.shares.hard;
    if (std::abs(sum - 100.0) > 0.5 || e.shares.easy < 0 || e.shares.medium < 0 || e.shares.hard < 0) {
      throw Error(ErrorCode::invalid_argument,
                  "epoch " + std::to_string(e.epoch) + " shares do not form a simplex");
    }
    EpochBudget budget{e.epoch, e.shares, 0.0, 0.0};
    for (Bucket b : kBuckets) {
      const auto& c = configs[static_cast<std::size_t>(b)];
      const double share = e.shares.of(b) / 100.0;
      budget.rollouts_per_prompt += share * c.n_rollouts;
      budget.tokens_per_prompt += share * c.n_rollouts * c.rationale_budget_tokens;
    }
    report.epochs.push_back(budget);
  }

  const auto& first = report.epochs.front();
  const auto& last = report.epochs.back();
  report.rollout_reduction_pct =
      100.0 * (first.rollouts_per_prompt - last.rollouts_per_prompt) / first.rollouts_per_prompt;
  report.token_reduction_pct =
      100.0 * (first.tokens_per_prompt - last.tokens_per_prompt) / first.tokens_per_prompt;

  const auto& cfg = configs;
  report.derivations.push_back(format(
      "rollouts/prompt = sum_b share_b * n_b with n = (%d, %d, %d)", cfg[0].n_rollouts,
      cfg[1].n_rollouts, cfg[2].n_rollouts));
  report.derivations.push_back(format(
      "tokens/prompt = sum_b share_b * n_b * L_b with L = (%d, %d, %d)",
      cfg[0].rationale_budget_tokens, cfg[1].rationale_budget_tokens,
      cfg[2].rationale_budget_tokens));
  report.derivations.push_back(format("rollout reduction e=%d -> e=%d: 1 - %.4f / %.4f = %.4f%%",
                                      first.epoch, last.epoch, last.rollouts_per_prompt,
                                      first.rollouts_per_prompt, report.rollout_reduction_pct));
  report.derivations.push_back(format("token reduction e=%d -> e=%d: 1 - %.4f / %.4f = %.4f%%",
                                      first.epoch, last.epoch, last.tokens_per_prompt,
                                      first.tokens_per_prompt, report.token_reduction_pct));
  for (const auto& b : baselines) {
    if (b.n_rollouts < 1 || b.rationale_budget_tokens < 1) {
      throw Error(ErrorCode::invalid_argument, "baseline rollouts and budget must be >= 1");
    }
    BaselineSaving saving{b, static_cast<double>(b.n_rollouts) * b.rationale_budget_tokens, 0.0};
    saving.saving_pct = 100.0 * (1.0 - last.tokens_per_prompt / saving.tokens_per_prompt);
    report.derivations.push_back(format("saving vs fixed %d x %d: 1 - %.4f / %.0f = %.4f%%",
                                        b.n_rollouts, b.rationale_budget_tokens,
                                        last.tokens_per_prompt, saving.tokens_per_prompt,
                                        saving.saving_pct));
    report.baselines.push_back(saving);
  }
  return report;
}

std::string format_accounting_table(const AccountingReport& report) {
  std::string out = format("%-8s %8s %8s %8s %16s %14s\n", "Epoch", "Easy", "Medium", "Hard",
                           "Rollouts/prompt", "Tokens/prompt");
  out += std::string(67, '-') + "\n";
  for (const auto& e : report.epochs) {
    out += format("e=%-6d %7.1f%% %7.1f%% %7.1f%% %16.2f %14.1f\n", e.epoch, e.shares.easy,
                  e.shares.medium, e.shares.hard, e.rollouts_per_prompt, e.tokens_per_prompt);
  }
  out += "\n";
  const auto& first = report.epochs.front();
  const auto& last = report.epochs.back();
  out += format("Rollouts/prompt %.2f -> %.2f: %.1f%% reduction\n", first.rollouts_per_prompt,
                last.rollouts_per_prompt, report.rollout_reduction_pct);
  out += format("Tokens/prompt   %.0f -> %.0f: %.1f%% reduction\n", first.tokens_per_prompt,
                last.tokens_per_prompt, report.token_reduction_pct);
  for (const auto& b : report.baselines) {
    out += format("vs fixed %d rollouts x %d tokens (%.0f/prompt): %.1f%% saving\n",
                  b.baseline.n_rollouts, b.baseline.rationale_budget_tokens, b.tokens_per_prompt,
                  b.saving_pct);
  }
  return out;
}

std::vector<PlanEntry> schedule_epoch(std::span<const PromptUncertainty> prompts,
                                      std::span<const RolloutTraceRecord> prior_trace,
                                      std::optional<int> prior_epoch,
                                      const CurriculumThresholds& thresholds,
                                      const BucketConfigs& configs, TrendStatistic rho) {
  validate(thresholds);
  validate(configs);
  std::unordered_map<std::string_view, std::pair<double, std::size_t>> sums;
  if (prior_epoch) {
    for (const auto& record : prior_trace) {
      if (record.epoch != *prior_epoch) continue;
      auto& [total, count] = sums[record.prompt_id];
      total += statistic(record, rho);
      ++count;
    }
  }
  std::vector<PlanEntry> plan;
  plan.reserve(prompts.size());
  for (const auto& p : prompts) {
    PlanEntry entry{p.prompt_id, p.q, std::nullopt, Bucket::easy, {}};
    if (const auto it = sums.find(p.prompt_id); it != sums.end()) {
      entry.r_bar = it->second.first / static_cast<double>(it->second.second);
    }
    entry.bucket = assign_bucket(p.q, entry.r_bar, thresholds);
    entry.config = configs[static_cast<std::size_t>(entry.bucket)];
    plan.push_back(std::move(entry));
  }
  return plan;
}

std::vector<EpochShares> shares_from_trace(
    std::span<const RolloutTraceRecord> trace,
    const std::map<int, std::map<std::string, double>>& q_by_epoch,
    const CurriculumThresholds& thresholds, TrendStatistic rho) {
  std::map<int, std::set<std::string>> prompts_by_epoch;
  for (const auto& record : trace) prompts_by_epoch[record.epoch].insert(record.prompt_id);
  for (const auto& [epoch, qs] : q_by_epoch) {
    for (const auto& [prompt, q] : qs) prompts_by_epoch[epoch].insert(prompt);
  }
  if (prompts_by_epoch.empty()) throw Error(ErrorCode::data, "trace is empty");

  std::vector<EpochShares> out;
  for (const auto& [epoch, prompts] : prompts_by_epoch) {
    const auto qs = q_by_epoch.find(epoch);
    std::vector<PromptUncertainty> inputs;
    for (const auto& prompt : prompts) {
      double q = 0.0;
      if (qs != q_by_epoch.end()) {
        if (const auto it = qs->second.find(prompt); it != qs->second.end()) q = it->second;
      }
      inputs.push_back({prompt, q});
    }
    const auto prior = prompts_by_epoch.contains(epoch - 1) ? std::optional<int>(epoch - 1)
                                                            : std::nullopt;
    std::map<std::string, Bucket> assignments;
    for (const auto& entry : schedule_epoch(inputs, trace, prior, thresholds,
                                            default_bucket_configs(), rho)) {
      assignments[entry.prompt_id] = entry.bucket;
    }
    out.push_back({epoch, bucket_shares(assignments)});
  }
  return out;
}

TraceWriter::TraceWriter(std::filesystem::path path) : path_(std::move(path)) {}

void TraceWriter::append(const RolloutTraceRecord& record) {
  const std::string line = dump_line(to_json(record));
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::data, "cannot open trace '" + path_.string() + "'");
  out << line << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::data, "failed writing trace '" + path_.string() + "'");
}

std::vector<RolloutTraceRecord> load_trace(const std::filesystem::path& path,
                                           const PerAxis<double>& axis_weights) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::data, "cannot open trace '" + path.string() + "'");
  std::vector<RolloutTraceRecord> out;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(number) + ": ";
    const auto json = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (json.is_discarded()) throw Error(ErrorCode::data, where + "invalid JSON");
    RolloutTraceRecord record;
    try {
      record = trace_record_from_json(json);
    } catch (const Error& e) {
      throw Error(ErrorCode::data, where + e.what());
    }
    const double expected = composite_reward(record.axis_scores, axis_weights);
    if (std::abs(expected - record.composite) > 1e-9 * std::max(1.0, std::abs(expected))) {
      throw Error(ErrorCode::data, where + "composite " + std::to_string(record.composite) +
                                       " disagrees with weighted axis scores " +
                                       std::to_string(expected));
    }
    out.push_back(std::move(record));
  }
  return out;
}

}  // namespace tsrank

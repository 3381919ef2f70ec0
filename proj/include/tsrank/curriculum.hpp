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

// Trace-driven curriculum scheduling and compute accounting.
//
// Each epoch every prompt lands in one bucket from its first-step
// uncertainty q and, after the first epoch, its previous-epoch mean judged
// reward r_bar:
//
//   hard    q >= q_hard            or  r_bar <  r_hard
//   medium  q_med <= q < q_hard    or  r_hard <= r_bar < r_med
//   easy    otherwise
//
// evaluated top-down. Buckets carry fixed rollout configurations, so the
// expected per-prompt rollout and token budgets follow from bucket shares.

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsrank/reward.hpp"

namespace tsrank {

enum class Bucket : std::size_t { easy = 0, medium, hard };

inline constexpr std::array<Bucket, 3> kBuckets = {Bucket::easy, Bucket::medium, Bucket::hard};

std::string_view to_string(Bucket bucket) noexcept;

struct BucketConfig {
  Bucket bucket = Bucket::easy;
  int n_rollouts = 1;
  double temperature = 1.0;
  double nucleus_p = 1.0;
  int rationale_budget_tokens = 1;
};

using BucketConfigs = std::array<BucketConfig, 3>;  // indexed by Bucket

/// easy (2, 0.2, 0.80, 100), medium (4, 0.4, 0.92, 200), hard (6, 0.7, 0.97, 300).
BucketConfigs default_bucket_configs();
void validate(const BucketConfigs& configs);

struct CurriculumThresholds {
  double q_med = 0.5;
  double q_hard = 0.9;
  double r_hard = -1.0;
  double r_med = 0.0;
  double r_easy = 2.0;
};

/// Throws Error(invalid_argument) unless 0 <= q_med <= q_hard <= 1 and
/// r_hard < r_med < r_easy.
void validate(const CurriculumThresholds& thresholds);

struct RolloutTraceRecord {
  std::string prompt_id;
  int epoch = 0;
  std::string completion;
  PerAxis<double> axis_scores{};
  double composite = 0.0;
};

enum class TrendStatistic { decision_axis, composite };

/// Mean of the chosen statistic over the prompt's records in `epoch`.
/// Throws Error(data) when there are none.
double epoch_trend(std::span<const RolloutTraceRecord> trace, std::string_view prompt_id,
                   int epoch, TrendStatistic rho);

/// Nearest-rank quantiles (q_med, q_hard). Throws Error(invalid_argument) on
/// empty input or unless 0 < med_quantile < hard_quantile < 1.
std::pair<double, double> quantile_cutoffs(std::span<const double> q_values,
                                           double med_quantile = 0.5,
                                           double hard_quantile = 0.9);

Bucket assign_bucket(double q, std::optional<double> r_bar,
                     const CurriculumThresholds& thresholds) noexcept;

/// Percentages, rounded to 0.1.
struct BucketShares {
  double easy = 0.0;
  double medium = 0.0;
  double hard = 0.0;

  double of(Bucket bucket) const noexcept;
};

BucketShares bucket_shares(const std::map<std::string, Bucket>& assignments);

struct EpochShares {
  int epoch = 0;
  BucketShares shares;
};

struct FixedBaseline {
  int n_rollouts = 6;
  int rationale_budget_tokens = 200;
};

inline const std::vector<FixedBaseline> kDefaultBaselines = {{6, 200}, {6, 300}};

struct EpochBudget {
  int epoch = 0;
  BucketShares shares;
  double rollouts_per_prompt = 0.0;
  double tokens_per_prompt = 0.0;
};

struct BaselineSaving {
  FixedBaseline baseline;
  double tokens_per_prompt = 0.0;
  double saving_pct = 0.0;  // vs the final epoch's curriculum budget
};

struct AccountingReport {
  std::vector<EpochBudget> epochs;
  double rollout_reduction_pct = 0.0;  // first to last epoch
  double token_reduction_pct = 0.0;
  std::vector<BaselineSaving> baselines;
  std::vector<std::string> derivations;  // human-readable arithmetic
};

/// Throws Error(invalid_argument) on empty input or shares that do not sum
/// to 100 within 0.5.
AccountingReport compute_accounting(std::span<const EpochShares> epochs,
                                    const BucketConfigs& configs = default_bucket_configs(),
                                    std::span<const FixedBaseline> baselines = kDefaultBaselines);

/// Fixed-width text: one row per epoch with shares and budgets, followed
/// by the headline reductions and savings.
std::string format_accounting_table(const AccountingReport& report);

struct PromptUncertainty {
  std::string prompt_id;
  double q = 0.0;
};

struct PlanEntry {
  std::string prompt_id;
  double q = 0.0;
  std::optional<double> r_bar;
  Bucket bucket = Bucket::easy;
  BucketConfig config;
};

/// One plan entry per prompt, in input order. `prior_epoch` selects which
/// trace records feed r_bar; prompts without records there are bucketed by
/// uncertainty alone.
std::vector<PlanEntry> schedule_epoch(std::span<const PromptUncertainty> prompts,
                                      std::span<const RolloutTraceRecord> prior_trace,
                                      std::optional<int> prior_epoch,
                                      const CurriculumThresholds& thresholds,
                                      const BucketConfigs& configs = default_bucket_configs(),
                                      TrendStatistic rho = TrendStatistic::decision_axis);

/// Replays a trace: epoch e buckets use q from `q_by_epoch[e]` (0 when
/// absent) and r_bar from epoch e-1. Returns shares per epoch in the trace.
std::vector<EpochShares> shares_from_trace(
    std::span<const RolloutTraceRecord> trace,
    const std::map<int, std::map<std::string, double>>& q_by_epoch,
    const CurriculumThresholds& thresholds, TrendStatistic rho);

/// Append-only JSONL writer; appends from concurrent callers are serialized.
class TraceWriter {
 public:
  explicit TraceWriter(std::filesystem::path path);

  void append(const RolloutTraceRecord& record);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
};

/// Loads a trace and checks each composite against the axis scores under
/// `axis_weights` (tolerance 1e-9 relative). Throws Error(data) naming the
/// offending line.
std::vector<RolloutTraceRecord> load_trace(const std::filesystem::path& path,
                                           const PerAxis<double>& axis_weights =
                                               RubricWeights::defaults().axis);

}  // namespace tsrank

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

#include "tsrank/tsrank.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tsrank/config.hpp"
#include "tsrank/curriculum.hpp"
#include "tsrank/error.hpp"
#include "tsrank/gate.hpp"
#include "tsrank/json_io.hpp"
#include "tsrank/metrics.hpp"
#include "tsrank/pipeline.hpp"
#include "tsrank/scoring.hpp"

#ifndef TSRANK_VERSION_STRING
#define TSRANK_VERSION_STRING "0.0.0"
#endif

struct tsrank_engine {
  tsrank::RunConfig config;
  std::unique_ptr<tsrank::Backend> backend;
  tsrank::PipelineConfig pipeline;
  std::string config_json;
};

struct tsrank_artifacts {
  std::vector<std::pair<std::string, std::string>> items;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_kind;

tsrank_status fail(tsrank_status status, std::string kind, std::string message) {
  g_last_kind = std::move(kind);
  g_last_error = std::move(message);
  return status;
}

tsrank_status status_of(tsrank::ErrorCode code) {
  using tsrank::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::template_error:
      return TSRANK_ERR_USAGE;
    case ErrorCode::data:
      return TSRANK_ERR_DATA;
    case ErrorCode::readout_incomplete:
    case ErrorCode::degenerate_readout:
    case ErrorCode::backend_unavailable:
    case ErrorCode::protocol:
      return TSRANK_ERR_BACKEND;
    case ErrorCode::contract:
      return TSRANK_ERR_INTERNAL;
  }
  return TSRANK_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into a status plus the last-error slot.
template <typename F>
tsrank_status guarded(F&& body) {
  g_last_error.clear();
  g_last_kind.clear();
  try {
    body();
    return TSRANK_OK;
  } catch (const tsrank::Error& e) {
    return fail(status_of(e.code()), std::string(tsrank::to_string(e.code())), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(TSRANK_ERR_DATA, "data", e.what());
  } catch (const std::bad_alloc&) {
    return fail(TSRANK_ERR_INTERNAL, "internal", "out of memory");
  } catch (const std::exception& e) {
    return fail(TSRANK_ERR_INTERNAL, "internal", e.what());
  } catch (...) {
    return fail(TSRANK_ERR_INTERNAL, "internal", "unknown exception");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw tsrank::Error(tsrank::ErrorCode::invalid_argument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

std::string read_file(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw tsrank::Error(tsrank::ErrorCode::data, std::string("cannot open '") + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

tsrank::Json header(const tsrank_engine& engine, const char* dataset_path) {
  tsrank::Json out;
  out["version"] = TSRANK_VERSION_STRING;
  out["config"] = tsrank::Json::parse(engine.config_json);
  out["dataset"] = dataset_path;
  return out;
}

// ---- curriculum options ---------------------------------------------------

struct CurriculumOptions {
  tsrank::BucketConfigs buckets = tsrank::default_bucket_configs();
  std::vector<tsrank::FixedBaseline> baselines = tsrank::kDefaultBaselines;
  tsrank::CurriculumThresholds thresholds;
  bool explicit_q_cutoffs = false;
  double med_quantile = 0.5;
  double hard_quantile = 0.9;
  tsrank::TrendStatistic rho = tsrank::TrendStatistic::decision_axis;
};

void reject_unknown(const tsrank::Json& obj, std::initializer_list<const char*> known,
                    const std::string& scope) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    require(ok, ("unknown curriculum option '" + scope + key + "'").c_str());
  }
}

CurriculumOptions parse_curriculum_options(const char* text) {
  CurriculumOptions opts;
  if (text == nullptr || *text == '\0') return opts;
  const auto json = tsrank::Json::parse(text, nullptr, false);
  require(!json.is_discarded() && json.is_object(), "curriculum options must be a JSON object");
  reject_unknown(json, {"buckets", "baselines", "thresholds", "quantiles", "trend"}, "");
  try {
    if (json.contains("buckets")) {
      const auto& b = json.at("buckets");
      require(b.is_array() && b.size() == 3, "buckets must list easy, medium and hard");
      for (std::size_t i = 0; i < 3; ++i) {
        auto& c = opts.buckets[i];
        c.n_rollouts = b[i].value("n_rollouts", c.n_rollouts);
        c.temperature = b[i].value("temperature", c.temperature);
        c.nucleus_p = b[i].value("nucleus_p", c.nucleus_p);
        c.rationale_budget_tokens =
            b[i].value("rationale_budget_tokens", c.rationale_budget_tokens);
      }
    }
    if (json.contains("baselines")) {
      opts.baselines.clear();
      for (const auto& b : json.at("baselines")) {
        opts.baselines.push_back(
            {b.at("n_rollouts").get<int>(), b.at("rationale_budget_tokens").get<int>()});
      }
    }
    if (json.contains("thresholds")) {
      const auto& t = json.at("thresholds");
      reject_unknown(t, {"q_med", "q_hard", "r_hard", "r_med", "r_easy"}, "thresholds.");
      opts.explicit_q_cutoffs = t.contains("q_med") || t.contains("q_hard");
      opts.thresholds.q_med = t.value("q_med", opts.thresholds.q_med);
      opts.thresholds.q_hard = t.value("q_hard", opts.thresholds.q_hard);
      opts.thresholds.r_hard = t.value("r_hard", opts.thresholds.r_hard);
      opts.thresholds.r_med = t.value("r_med", opts.thresholds.r_med);
      opts.thresholds.r_easy = t.value("r_easy", opts.thresholds.r_easy);
    }
    if (json.contains("quantiles")) {
      const auto& q = json.at("quantiles");
      reject_unknown(q, {"med", "hard"}, "quantiles.");
      opts.med_quantile = q.value("med", opts.med_quantile);
      opts.hard_quantile = q.value("hard", opts.hard_quantile);
    }
    if (json.contains("trend")) {
      const auto trend = json.at("trend").get<std::string>();
      require(trend == "decision" || trend == "composite", "trend must be decision or composite");
      opts.rho = trend == "decision" ? tsrank::TrendStatistic::decision_axis
                                     : tsrank::TrendStatistic::composite;
    }
  } catch (const nlohmann::json::exception& e) {
    throw tsrank::Error(tsrank::ErrorCode::invalid_argument,
                        std::string("curriculum options: ") + e.what());
  }
  tsrank::validate(opts.buckets);
  tsrank::validate(opts.thresholds);
  return opts;
}

// q-values file: JSONL of {"prompt_id", "epoch", "q"}.
std::map<int, std::map<std::string, double>> load_q_values(const char* path) {
  std::istringstream in(read_file(path));
  std::map<int, std::map<std::string, double>> out;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = std::string(path) + ":" + std::to_string(number) + ": ";
    const auto json = tsrank::Json::parse(line, nullptr, false);
    if (json.is_discarded() || !json.is_object() || !json.contains("prompt_id") ||
        !json.contains("epoch") || !json.contains("q") || !json["prompt_id"].is_string() ||
        !json["epoch"].is_number_integer() || !json["q"].is_number()) {
      throw tsrank::Error(tsrank::ErrorCode::data,
                          where + "expected {\"prompt_id\", \"epoch\", \"q\"}");
    }
    const double q = json["q"].get<double>();
    if (!(q >= 0.0 && q <= 1.0)) throw tsrank::Error(tsrank::ErrorCode::data, where + "q outside [0, 1]");
    out[json["epoch"].get<int>()][json["prompt_id"].get<std::string>()] = q;
  }
  return out;
}

}  // namespace

extern "C" {

const char* tsrank_version(void) { return TSRANK_VERSION_STRING; }
const char* tsrank_last_error(void) { return g_last_error.c_str(); }
const char* tsrank_last_error_kind(void) { return g_last_kind.c_str(); }
void tsrank_string_free(char* s) { std::free(s); }

tsrank_status tsrank_engine_create(const char* config_json, tsrank_engine** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    *out = nullptr;
    auto engine = std::make_unique<tsrank_engine>();
    engine->config = tsrank::merge_run_config(tsrank::RunConfig{},
                                              config_json == nullptr ? "" : config_json);
    engine->pipeline = tsrank::make_pipeline_config(engine->config);
    engine->backend = tsrank::make_backend(engine->config);
    engine->config_json = tsrank::run_config_to_json(engine->config);
    *out = engine.release();
  });
}

void tsrank_engine_destroy(tsrank_engine* engine) { delete engine; }

tsrank_status tsrank_engine_config(const tsrank_engine* engine, char** out_json) {
  return guarded([&] {
    require(engine != nullptr && out_json != nullptr, "engine and out_json must not be NULL");
    *out_json = dup_string(engine->config_json);
  });
}

tsrank_status tsrank_engine_probe(const tsrank_engine* engine) {
  return guarded([&] {
    require(engine != nullptr, "engine must not be NULL");
    engine->backend->probe();
  });
}

tsrank_status tsrank_engine_rank(const tsrank_engine* engine, const char* list_json,
                                 char** out_json) {
  return guarded([&] {
    require(engine != nullptr && list_json != nullptr && out_json != nullptr,
            "engine, list_json and out_json must not be NULL");
    *out_json = nullptr;
    const auto json = tsrank::Json::parse(list_json, nullptr, false);
    if (json.is_discarded()) throw tsrank::Error(tsrank::ErrorCode::data, "invalid JSON");
    const auto list = tsrank::candidate_list_from_json(json);
    const auto outcome =
        tsrank::rank_query(list, engine->config.threshold, *engine->backend, engine->pipeline);
    *out_json = dup_string(tsrank::dump_line(tsrank::to_json(outcome)));
  });
}

tsrank_status tsrank_engine_evaluate(const tsrank_engine* engine, const char* dataset_path,
                                     tsrank_artifacts** out) {
  return guarded([&] {
    require(engine != nullptr && dataset_path != nullptr && out != nullptr,
            "engine, dataset_path and out must not be NULL");
    *out = nullptr;
    const auto corpus = tsrank::load_dataset(dataset_path);
    std::string outcomes;
    const auto summary = tsrank::evaluate_corpus(
        corpus, engine->config.threshold, *engine->backend, engine->pipeline,
        [&](const tsrank::RankOutcome& o) {
          outcomes += tsrank::dump_line(tsrank::to_json(o));
          outcomes += '\n';
        });
    auto report = header(*engine, dataset_path);
    report["threshold"] = engine->config.threshold;
    report["warnings"] = summary.warnings;
    report["report"] = tsrank::to_json(summary.report);

    char label[64];
    std::snprintf(label, sizeof label, "Two-speed (T=%.2f)", engine->config.threshold);
    auto artifacts = std::make_unique<tsrank_artifacts>();
    artifacts->items = {{"report.json", tsrank::dump_pretty(report)},
                        {"outcomes.jsonl", std::move(outcomes)},
                        {"table.txt", tsrank::format_report_table(label, summary.report)}};
    *out = artifacts.release();
  });
}

tsrank_status tsrank_engine_sweep(const tsrank_engine* engine, const char* dataset_path,
                                  const double* thresholds, size_t count,
                                  tsrank_artifacts** out) {
  return guarded([&] {
    require(engine != nullptr && dataset_path != nullptr && out != nullptr,
            "engine, dataset_path and out must not be NULL");
    require(thresholds != nullptr && count > 0, "at least one threshold is required");
    *out = nullptr;
    for (size_t i = 0; i < count; ++i) {
      require(thresholds[i] >= 0.0 && thresholds[i] <= 1.0, "thresholds must lie in [0, 1]");
    }
    const auto corpus = tsrank::load_dataset(dataset_path);
    const auto rows = tsrank::sweep_thresholds(
        corpus, std::span<const double>(thresholds, count), *engine->backend, engine->pipeline);
    auto report = header(*engine, dataset_path);
    report["sweep"] = tsrank::to_json(std::span<const tsrank::SweepRow>(rows));
    auto artifacts = std::make_unique<tsrank_artifacts>();
    artifacts->items = {{"sweep.json", tsrank::dump_pretty(report)},
                        {"sweep.txt", tsrank::format_sweep_table(rows)}};
    *out = artifacts.release();
  });
}

tsrank_status tsrank_validate_dataset(const char* dataset_path, tsrank_artifacts** out) {
  return guarded([&] {
    require(dataset_path != nullptr && out != nullptr, "dataset_path and out must not be NULL");
    *out = nullptr;
    const auto corpus = tsrank::load_dataset(dataset_path);
    std::size_t with_truth = 0;
    std::size_t inserted = 0;
    std::size_t candidates = 0;
    for (const auto& list : corpus) {
      with_truth += list.relevant_id ? 1 : 0;
      inserted += list.oracle_inserted ? 1 : 0;
      candidates += list.size();
    }
    tsrank::Json report;
    report["dataset"] = dataset_path;
    report["valid"] = true;
    report["query_count"] = corpus.size();
    report["candidate_count"] = candidates;
    report["with_relevant_id"] = with_truth;
    report["oracle_inserted"] = inserted;
    auto artifacts = std::make_unique<tsrank_artifacts>();
    artifacts->items = {{"validation.json", tsrank::dump_pretty(report)}};
    *out = artifacts.release();
  });
}

tsrank_status tsrank_simulate_curriculum(const char* shares_path, const char* trace_path,
                                         const char* q_values_path, const char* options_json,
                                         tsrank_artifacts** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    *out = nullptr;
    require((shares_path == nullptr) != (trace_path == nullptr),
            "exactly one of shares_path and trace_path is required");
    require(q_values_path == nullptr || trace_path != nullptr,
            "q_values_path requires trace_path");
    auto opts = parse_curriculum_options(options_json);

    tsrank::Json input;
    std::vector<tsrank::EpochShares> epochs;
    if (shares_path != nullptr) {
      const auto json = tsrank::Json::parse(read_file(shares_path), nullptr, false);
      if (json.is_discarded()) {
        throw tsrank::Error(tsrank::ErrorCode::data,
                            std::string(shares_path) + ": invalid JSON");
      }
      try {
        epochs = tsrank::shares_from_json(json);
      } catch (const tsrank::Error& e) {
        throw tsrank::Error(tsrank::ErrorCode::data, std::string(shares_path) + ": " + e.what());
      }
      input["shares"] = shares_path;
    } else {
      const auto trace = tsrank::load_trace(trace_path);
      std::map<int, std::map<std::string, double>> q_by_epoch;
      if (q_values_path != nullptr) q_by_epoch = load_q_values(q_values_path);
      if (!opts.explicit_q_cutoffs && !q_by_epoch.empty()) {
        // Cutoffs come from the earliest epoch's q population.
        std::vector<double> qs;
        for (const auto& [prompt, q] : q_by_epoch.begin()->second) qs.push_back(q);
        std::tie(opts.thresholds.q_med, opts.thresholds.q_hard) =
            tsrank::quantile_cutoffs(qs, opts.med_quantile, opts.hard_quantile);
      }
      epochs = tsrank::shares_from_trace(trace, q_by_epoch, opts.thresholds, opts.rho);
      input["trace"] = trace_path;
      input["q_values"] = q_values_path == nullptr ? tsrank::Json(nullptr)
                                                   : tsrank::Json(q_values_path);
      input["thresholds"] = {{"q_med", opts.thresholds.q_med},
                             {"q_hard", opts.thresholds.q_hard},
                             {"r_hard", opts.thresholds.r_hard},
                             {"r_med", opts.thresholds.r_med},
                             {"r_easy", opts.thresholds.r_easy}};
      input["trend"] =
          opts.rho == tsrank::TrendStatistic::decision_axis ? "decision" : "composite";
    }

    const auto accounting = tsrank::compute_accounting(epochs, opts.buckets, opts.baselines);
    tsrank::Json buckets = tsrank::Json::array();
    for (const auto& c : opts.buckets) {
      buckets.push_back({{"bucket", std::string(tsrank::to_string(c.bucket))},
                         {"n_rollouts", c.n_rollouts},
                         {"temperature", c.temperature},
                         {"nucleus_p", c.nucleus_p},
                         {"rationale_budget_tokens", c.rationale_budget_tokens}});
    }
    tsrank::Json report;
    report["version"] = TSRANK_VERSION_STRING;
    report["input"] = std::move(input);
    report["buckets"] = std::move(buckets);
    report["accounting"] = tsrank::to_json(accounting);
    auto artifacts = std::make_unique<tsrank_artifacts>();
    artifacts->items = {{"accounting.json", tsrank::dump_pretty(report)},
                        {"accounting.txt", tsrank::format_accounting_table(accounting)}};
    *out = artifacts.release();
  });
}

size_t tsrank_artifacts_count(const tsrank_artifacts* a) { return a == nullptr ? 0 : a->items.size(); }

const char* tsrank_artifacts_name(const tsrank_artifacts* a, size_t i) {
  return a == nullptr || i >= a->items.size() ? nullptr : a->items[i].first.c_str();
}

const char* tsrank_artifacts_text(const tsrank_artifacts* a, size_t i) {
  return a == nullptr || i >= a->items.size() ? nullptr : a->items[i].second.c_str();
}

size_t tsrank_artifacts_size(const tsrank_artifacts* a, size_t i) {
  return a == nullptr || i >= a->items.size() ? 0 : a->items[i].second.size();
}

const char* tsrank_artifacts_get(const tsrank_artifacts* a, const char* name) {
  if (a == nullptr || name == nullptr) return nullptr;
  for (const auto& [n, text] : a->items) {
    if (n == name) return text.c_str();
  }
  return nullptr;
}

void tsrank_artifacts_destroy(tsrank_artifacts* a) { delete a; }

tsrank_status tsrank_fast_score(double z, double* out_s, double* out_q) {
  return guarded([&] {
    require(out_s != nullptr && out_q != nullptr, "outputs must not be NULL");
    const auto score = tsrank::fast_score(z);
    *out_s = score.s;
    *out_q = score.q;
  });
}

tsrank_status tsrank_normalized_entropy_of_log_odds(const double* z, size_t m, double* out_u) {
  return guarded([&] {
    require(z != nullptr && out_u != nullptr && m > 0, "z must hold at least one value");
    const auto p = tsrank::listwise_distribution(std::span<const double>(z, m));
    *out_u = tsrank::normalized_entropy(p);
  });
}

double tsrank_expected_slow_overhead(double gate_fraction, double slow_ms) {
  return tsrank::expected_slow_overhead(gate_fraction, slow_ms);
}

double tsrank_fast_query_time(double per_candidate_ms, size_t m, size_t batch) {
  if (m == 0 || batch == 0) return std::numeric_limits<double>::quiet_NaN();
  return tsrank::fast_query_time(per_candidate_ms, m, batch);
}

double tsrank_two_speed_query_time(double fast_query_ms, double gate_fraction, double slow_ms) {
  return tsrank::two_speed_query_time(fast_query_ms, gate_fraction, slow_ms);
}

}  // extern "C"

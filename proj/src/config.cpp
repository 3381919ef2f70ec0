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

#include "tsrank/config.hpp"

#include <initializer_list>
#include <string_view>

#include "tsrank/error.hpp"
#include "tsrank/json_io.hpp"

namespace tsrank {
namespace {

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::invalid_argument, "config: " + what);
}

void reject_unknown(const Json& obj, std::string_view scope,
                    std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) bad("unknown key '" + std::string(scope) + key + "'");
  }
}

template <typename T>
void read(const Json& obj, const char* key, T& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) throw std::invalid_argument("expected a string");
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!it->is_number_unsigned()) throw std::invalid_argument("expected a non-negative integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw std::invalid_argument("expected a number");
    }
    out = it->template get<T>();
  } catch (const std::exception& e) {
    bad("key '" + std::string(key) + "': " + e.what());
  }
}

void read_ms(const Json& obj, const char* key, std::chrono::milliseconds& out) {
  std::uint64_t ms = static_cast<std::uint64_t>(out.count());
  read(obj, key, ms);
  out = std::chrono::milliseconds(ms);
}

std::vector<TokenId> read_ids(const Json& obj, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_array()) bad(std::string("variants.") + key + " must be an array");
  std::vector<TokenId> out;
  for (const auto& id : v) {
    if (!id.is_number_integer()) bad(std::string("variants.") + key + " must hold integers");
    out.push_back(id.get<TokenId>());
  }
  return out;
}

}  // namespace

void validate(const RunConfig& config) {
  if (!(config.threshold >= 0.0 && config.threshold <= 1.0)) bad("threshold must be in [0, 1]");
  if (config.batch < 1) bad("batch must be >= 1");
  if (config.workers < 1) bad("workers must be >= 1");
  if (config.max_slow_tokens < 1) bad("max_slow_tokens must be >= 1");
  if (config.recall_cutoffs.empty()) bad("recall_cutoffs must not be empty");
  for (auto k : config.recall_cutoffs) {
    if (k < 1) bad("recall cutoffs must be >= 1");
  }
  if (config.remote.parallelism < 1) bad("remote.parallelism must be >= 1");
  if (config.remote.deadline.count() < 1) bad("remote.deadline_ms must be >= 1");
  if (config.remote.base_url.empty()) bad("remote.base_url must not be empty");
  validate(config.mock);
  validate(config.variants);
}

RunConfig merge_run_config(const RunConfig& base, const std::string& json_text) {
  RunConfig out = base;
  if (json_text.find_first_not_of(" \t\r\n") == std::string::npos) return out;
  const auto json = Json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (json.is_discarded()) bad("invalid JSON");
  if (!json.is_object()) bad("top level must be an object");
  reject_unknown(json, "",
                 {"backend", "mock", "remote", "variants", "max_slow_tokens", "threshold", "batch",
                  "workers", "recall_cutoffs", "template_dir", "other_candidates_budget", "seed"});

  if (const auto it = json.find("backend"); it != json.end()) {
    const std::string name = it->is_string() ? it->get<std::string>() : "";
    if (name == "mock") {
      out.backend = BackendKind::mock;
    } else if (name == "remote") {
      out.backend = BackendKind::remote;
    } else {
      bad("backend must be \"mock\" or \"remote\"");
    }
  }
  if (const auto it = json.find("mock"); it != json.end()) {
    if (!it->is_object()) bad("mock must be an object");
    reject_unknown(*it, "mock.",
                   {"sharpness", "slow_accuracy", "malform_rate", "ambiguous_fraction", "noise",
                    "ambiguous_noise", "fast_ms_per_candidate", "slow_ms_per_token"});
    read(*it, "sharpness", out.mock.sharpness);
    read(*it, "slow_accuracy", out.mock.slow_accuracy);
    read(*it, "malform_rate", out.mock.malform_rate);
    read(*it, "ambiguous_fraction", out.mock.ambiguous_fraction);
    read(*it, "noise", out.mock.noise);
    read(*it, "ambiguous_noise", out.mock.ambiguous_noise);
    read(*it, "fast_ms_per_candidate", out.mock.fast_ms_per_candidate);
    read(*it, "slow_ms_per_token", out.mock.slow_ms_per_token);
  }
  if (const auto it = json.find("remote"); it != json.end()) {
    if (!it->is_object()) bad("remote must be an object");
    reject_unknown(*it, "remote.", {"base_url", "deadline_ms", "parallelism", "retry_backoff_ms"});
    read(*it, "base_url", out.remote.base_url);
    read_ms(*it, "deadline_ms", out.remote.deadline);
    read(*it, "parallelism", out.remote.parallelism);
    read_ms(*it, "retry_backoff_ms", out.remote.retry_backoff);
  }
  if (const auto it = json.find("variants"); it != json.end()) {
    if (!it->is_object()) bad("variants must be an object");
    reject_unknown(*it, "variants.", {"yes_ids", "no_ids"});
    if (!it->contains("yes_ids") || !it->contains("no_ids")) {
      bad("variants needs both yes_ids and no_ids");
    }
    out.variants = {read_ids(*it, "yes_ids"), read_ids(*it, "no_ids")};
  }
  read(json, "max_slow_tokens", out.max_slow_tokens);
  read(json, "threshold", out.threshold);
  read(json, "batch", out.batch);
  read(json, "workers", out.workers);
  if (const auto it = json.find("recall_cutoffs"); it != json.end()) {
    if (!it->is_array()) bad("recall_cutoffs must be an array");
    out.recall_cutoffs.clear();
    for (const auto& k : *it) {
      if (!k.is_number_unsigned()) bad("recall_cutoffs must hold positive integers");
      out.recall_cutoffs.push_back(k.get<std::size_t>());
    }
  }
  read(json, "template_dir", out.template_dir);
  read(json, "other_candidates_budget", out.other_candidates_budget);
  read(json, "seed", out.seed);
  validate(out);
  return out;
}

std::string run_config_to_json(const RunConfig& c) {
  Json out;
  out["backend"] = std::string(to_string(c.backend));
  out["mock"] = {{"sharpness", c.mock.sharpness},
                 {"slow_accuracy", c.mock.slow_accuracy},
                 {"malform_rate", c.mock.malform_rate},
                 {"ambiguous_fraction", c.mock.ambiguous_fraction},
                 {"noise", c.mock.noise},
                 {"ambiguous_noise", c.mock.ambiguous_noise},
                 {"fast_ms_per_candidate", c.mock.fast_ms_per_candidate},
                 {"slow_ms_per_token", c.mock.slow_ms_per_token}};
  out["remote"] = {{"base_url", c.remote.base_url},
                   {"deadline_ms", c.remote.deadline.count()},
                   {"parallelism", c.remote.parallelism},
                   {"retry_backoff_ms", c.remote.retry_backoff.count()}};
  out["variants"] = {{"yes_ids", c.variants.yes_ids}, {"no_ids", c.variants.no_ids}};
  out["max_slow_tokens"] = c.max_slow_tokens;
  out["threshold"] = c.threshold;
  out["batch"] = c.batch;
  out["workers"] = c.workers;
  out["recall_cutoffs"] = c.recall_cutoffs;
  out["template_dir"] = c.template_dir;
  out["other_candidates_budget"] = c.other_candidates_budget;
  out["seed"] = c.seed;
  return out.dump();
}

std::unique_ptr<Backend> make_backend(const RunConfig& config) {
  validate(config);
  if (config.backend == BackendKind::remote) {
    return std::make_unique<RemoteBackend>(config.remote, config.variants,
                                           config.max_slow_tokens);
  }
  MockSpec spec = config.mock;
  spec.seed = config.seed;
  return std::make_unique<MockBackend>(spec, config.variants, config.max_slow_tokens);
}

PipelineConfig make_pipeline_config(const RunConfig& config) {
  validate(config);
  PipelineConfig out;
  out.threshold = config.threshold;
  out.batch = config.batch;
  out.workers = config.workers;
  out.recall_cutoffs = config.recall_cutoffs;
  out.render.other_candidates_budget = config.other_candidates_budget;
  out.templates = config.template_dir.empty() ? TemplateSet::defaults()
                                              : TemplateSet::load(config.template_dir);
  return out;
}

}  // namespace tsrank

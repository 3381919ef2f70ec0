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

// tsrank: evaluate, sweep, simulate-curriculum, serve and validate.
//
// Configuration precedence: flags > TSRANK_* environment > --config file >
// built-in defaults. Exit codes: 0 ok, 1 usage, 2 data, 3 backend.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "serve.hpp"
#include "tsrank/tsrank.h"

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Options {
  std::string config_path;
  std::optional<std::string> backend;
  std::optional<double> threshold;
  std::optional<std::size_t> batch;
  std::optional<std::size_t> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> template_dir;
  std::optional<std::string> base_url;
  std::string out_dir;
  bool quiet = false;

  std::string dataset;
  std::vector<double> sweep;

  std::string shares;
  std::string trace;
  std::string q_values;
  std::string curriculum_options;
  std::optional<std::string> trend;

  std::string host = "127.0.0.1";
  int port = 8080;
};

int report_failure(tsrank_status status) {
  std::cerr << "tsrank: " << tsrank_last_error_kind() << ": " << tsrank_last_error() << "\n";
  return status;
}

int usage_error(const std::string& message) {
  std::cerr << "tsrank: " << message << "\n";
  return TSRANK_ERR_USAGE;
}

// Config file overlaid with flag and environment values.
std::optional<std::string> effective_config(const Options& opt) {
  Json config = Json::object();
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path, std::ios::binary);
    if (!in) {
      usage_error("cannot open config '" + opt.config_path + "'");
      return std::nullopt;
    }
    config = Json::parse(in, nullptr, false);
    if (config.is_discarded() || !config.is_object()) {
      usage_error("config '" + opt.config_path + "' is not a JSON object");
      return std::nullopt;
    }
  }
  if (opt.backend) config["backend"] = *opt.backend;
  if (opt.threshold) config["threshold"] = *opt.threshold;
  if (opt.batch) config["batch"] = *opt.batch;
  if (opt.workers) config["workers"] = *opt.workers;
  if (opt.seed) config["seed"] = *opt.seed;
  if (opt.template_dir) config["template_dir"] = *opt.template_dir;
  if (opt.base_url) {
    if (!config.contains("remote") || !config["remote"].is_object()) config["remote"] = Json::object();
    config["remote"]["base_url"] = *opt.base_url;
  }
  return config.dump();
}

// Writes via a sibling temp file and rename so readers never see a partial file.
bool write_atomic(const fs::path& path, const char* data, std::size_t size) {
  const fs::path tmp = path.parent_path() / ("." + path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out.write(data, static_cast<std::streamsize>(size));
    out.flush();
    if (!out) return false;
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fs::remove(tmp, ec);
  return !ec;
}

// Writes every artifact under --out (when given) and echoes `echo` to stdout.
int emit(const Options& opt, tsrank_artifacts* artifacts, const char* echo) {
  int status = TSRANK_OK;
  if (!opt.out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    for (std::size_t i = 0; i < tsrank_artifacts_count(artifacts); ++i) {
      const fs::path path = fs::path(opt.out_dir) / tsrank_artifacts_name(artifacts, i);
      if (!write_atomic(path, tsrank_artifacts_text(artifacts, i),
                        tsrank_artifacts_size(artifacts, i))) {
        std::cerr << "tsrank: cannot write '" << path.string() << "'\n";
        status = TSRANK_ERR_DATA;
        break;
      }
    }
  }
  if (status == TSRANK_OK && !opt.quiet) {
    if (const char* text = tsrank_artifacts_get(artifacts, echo)) std::cout << text;
  }
  tsrank_artifacts_destroy(artifacts);
  return status;
}

struct EngineHandle {
  tsrank_engine* engine = nullptr;
  ~EngineHandle() { tsrank_engine_destroy(engine); }
};

int cmd_evaluate(const Options& opt) {
  const auto config = effective_config(opt);
  if (!config) return TSRANK_ERR_USAGE;
  EngineHandle handle;
  if (auto s = tsrank_engine_create(config->c_str(), &handle.engine); s != TSRANK_OK) {
    return report_failure(s);
  }
  tsrank_artifacts* artifacts = nullptr;
  if (!opt.sweep.empty()) {
    const auto s = tsrank_engine_sweep(handle.engine, opt.dataset.c_str(), opt.sweep.data(),
                                       opt.sweep.size(), &artifacts);
    if (s != TSRANK_OK) return report_failure(s);
    return emit(opt, artifacts, "sweep.txt");
  }
  const auto s = tsrank_engine_evaluate(handle.engine, opt.dataset.c_str(), &artifacts);
  if (s != TSRANK_OK) return report_failure(s);
  return emit(opt, artifacts, "table.txt");
}

int cmd_simulate(const Options& opt) {
  if (opt.shares.empty() == opt.trace.empty()) {
    return usage_error("simulate-curriculum needs exactly one of --shares and --trace");
  }
  if (!opt.q_values.empty() && opt.trace.empty()) {
    return usage_error("--q-values requires --trace");
  }
  Json options = Json::object();
  if (!opt.curriculum_options.empty()) {
    std::ifstream in(opt.curriculum_options, std::ios::binary);
    options = Json::parse(in, nullptr, false);
    if (!in || options.is_discarded() || !options.is_object()) {
      return usage_error("cannot read options '" + opt.curriculum_options + "'");
    }
  }
  if (opt.trend) options["trend"] = *opt.trend;
  const std::string options_text = options.dump();

  tsrank_artifacts* artifacts = nullptr;
  const auto s = tsrank_simulate_curriculum(
      opt.shares.empty() ? nullptr : opt.shares.c_str(),
      opt.trace.empty() ? nullptr : opt.trace.c_str(),
      opt.q_values.empty() ? nullptr : opt.q_values.c_str(), options_text.c_str(), &artifacts);
  if (s != TSRANK_OK) return report_failure(s);
  return emit(opt, artifacts, "accounting.txt");
}

int cmd_validate(const Options& opt) {
  tsrank_artifacts* artifacts = nullptr;
  const auto s = tsrank_validate_dataset(opt.dataset.c_str(), &artifacts);
  if (s != TSRANK_OK) return report_failure(s);
  return emit(opt, artifacts, "validation.json");
}

int cmd_serve(const Options& opt) {
  // Block before any thread exists so every thread inherits the mask and
  // the signals reach sigwait.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  const auto config = effective_config(opt);
  if (!config) return TSRANK_ERR_USAGE;
  EngineHandle handle;
  if (auto s = tsrank_engine_create(config->c_str(), &handle.engine); s != TSRANK_OK) {
    return report_failure(s);
  }
  if (auto s = tsrank_engine_probe(handle.engine); s != TSRANK_OK) return report_failure(s);
  return tsrank::serve::run(handle.engine, opt.host, opt.port);
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("tsrank"));

  CLI::App app{"Two-speed candidate reranking with uncertainty gating", "tsrank"};
  app.set_version_flag("--version", std::string(tsrank_version()));
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--config", opt.config_path, "JSON run configuration file")
      ->envname("TSRANK_CONFIG");
  app.add_option("--backend", opt.backend, "mock or remote")
      ->envname("TSRANK_BACKEND")
      ->check(CLI::IsMember({"mock", "remote"}));
  app.add_option("--threshold", opt.threshold, "uncertainty cap T in [0, 1]")
      ->envname("TSRANK_THRESHOLD")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--batch", opt.batch, "pointwise scoring calls in flight per query")
      ->envname("TSRANK_BATCH")
      ->check(CLI::PositiveNumber);
  app.add_option("--workers", opt.workers, "queries ranked concurrently")
      ->envname("TSRANK_WORKERS")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", opt.seed, "mock backend seed")->envname("TSRANK_SEED");
  app.add_option("--template-dir", opt.template_dir, "directory of prompt template overrides")
      ->envname("TSRANK_TEMPLATE_DIR");
  app.add_option("--base-url", opt.base_url, "remote backend URL")->envname("TSRANK_BASE_URL");
  app.add_option("--out", opt.out_dir, "directory for report files")->envname("TSRANK_OUT");
  app.add_flag("--quiet", opt.quiet, "do not echo the text report");

  auto* evaluate = app.add_subcommand("evaluate", "rank a JSONL dataset and report metrics");
  evaluate->add_option("--dataset", opt.dataset, "JSONL candidate lists")
      ->envname("TSRANK_DATASET")
      ->required();
  evaluate->add_option("--sweep", opt.sweep, "comma-separated thresholds to sweep")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));

  auto* simulate = app.add_subcommand("simulate-curriculum", "curriculum compute accounting");
  simulate->add_option("--shares", opt.shares, "bucket shares per epoch (JSON)");
  simulate->add_option("--trace", opt.trace, "rollout trace (JSONL)");
  simulate->add_option("--q-values", opt.q_values, "per-epoch uncertainty values (JSONL)");
  simulate->add_option("--options", opt.curriculum_options, "bucket/baseline/threshold overrides");
  simulate->add_option("--trend", opt.trend, "trend statistic for the trace")
      ->check(CLI::IsMember({"decision", "composite"}));

  auto* serve = app.add_subcommand("serve", "serve /rank and /healthz");
  serve->add_option("--host", opt.host, "bind address")->envname("TSRANK_HOST");
  serve->add_option("--port", opt.port, "bind port")->envname("TSRANK_PORT");

  auto* validate = app.add_subcommand("validate", "check a JSONL dataset");
  validate->add_option("--dataset", opt.dataset, "JSONL candidate lists")
      ->envname("TSRANK_DATASET")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return TSRANK_ERR_USAGE;
  }

  if (evaluate->parsed()) return cmd_evaluate(opt);
  if (simulate->parsed()) return cmd_simulate(opt);
  if (serve->parsed()) return cmd_serve(opt);
  return cmd_validate(opt);
}

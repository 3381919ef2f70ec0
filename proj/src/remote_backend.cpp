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

#include <chrono>
#include <cmath>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "tsrank/backend.hpp"
#include "tsrank/error.hpp"

namespace tsrank {
namespace {

constexpr int kAttempts = 2;  // one retry

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

nlohmann::json parse_payload(const std::string& body, const std::string& path) {
  auto json = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (json.is_discarded() || !json.is_object()) {
    throw Error(ErrorCode::protocol, path + ": response is not a JSON object");
  }
  return json;
}

double logprob_field(const nlohmann::json& json, const char* key) {
  const auto it = json.find(key);
  if (it == json.end() || !it->is_number()) {
    throw Error(ErrorCode::protocol, std::string("first_step response lacks numeric '") + key + "'");
  }
  const double v = it->get<double>();
  if (std::isnan(v) || v > 0.0) {
    throw Error(ErrorCode::protocol, std::string("'") + key + "' must be a log-probability <= 0");
  }
  return v;
}

std::string dump(const nlohmann::json& body) {
  return body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace

RemoteBackend::RemoteBackend(RemoteSpec spec, VariantSets variants, std::size_t max_slow_tokens,
                             std::string name)
    : spec_(std::move(spec)),
      descriptor_{std::move(name), BackendKind::remote, std::move(variants), max_slow_tokens} {
  validate(descriptor_.variants);
  if (spec_.parallelism == 0) throw Error(ErrorCode::invalid_argument, "parallelism must be >= 1");
  if (spec_.deadline.count() <= 0) throw Error(ErrorCode::invalid_argument, "deadline must be > 0");
  if (max_slow_tokens == 0) throw Error(ErrorCode::invalid_argument, "max_slow_tokens must be >= 1");
}

RemoteBackend::~RemoteBackend() = default;

std::string RemoteBackend::post(const std::string& path, const std::string& body) const {
  {
    std::unique_lock lock(slots_mutex_);
    slots_cv_.wait(lock, [this] { return in_flight_ < spec_.parallelism; });
    ++in_flight_;
  }
  struct Release {
    const RemoteBackend* self;
    ~Release() {
      {
        std::lock_guard lock(self->slots_mutex_);
        --self->in_flight_;
      }
      self->slots_cv_.notify_one();
    }
  } release{this};

  // Attempts and backoff share one deadline.
  const auto deadline = Clock::now() + spec_.deadline;
  std::string last_error;
  auto backoff = spec_.retry_backoff;
  int attempts = 0;
  for (int attempt = 1; attempt <= kAttempts; ++attempt) {
    const auto remaining =
        std::chrono::duration_cast<std::chrono::microseconds>(deadline - Clock::now());
    if (remaining.count() <= 0) {
      last_error = "deadline of " + std::to_string(spec_.deadline.count()) + " ms exceeded";
      break;
    }
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(remaining);
    const auto micros = remaining - seconds;
    ++attempts;
    httplib::Client client(spec_.base_url);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());
    const auto result = client.Post(path, body, "application/json");
    if (!result) {
      last_error = httplib::to_string(result.error());
    } else if (result->status >= 500) {
      last_error = "HTTP " + std::to_string(result->status);
    } else if (result->status != 200) {
      throw Error(ErrorCode::protocol,
                  path + ": HTTP " + std::to_string(result->status) + " " + result->body);
    } else {
      return result->body;
    }
    if (attempt < kAttempts) {
      if (Clock::now() + backoff >= deadline) {
        last_error += "; no time left to retry";
        break;
      }
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw BackendUnavailable(spec_.base_url + path + " unavailable after " +
                               std::to_string(attempts) + " attempt(s): " + last_error,
                           attempts);
}

TimedReadout RemoteBackend::score_first_step(const ScoreRequest& request) const {
  if (request.prompt.empty()) throw Error(ErrorCode::invalid_argument, "empty prompt");
  const auto start = Clock::now();
  const nlohmann::json body = {{"prompt", request.prompt},
                               {"yes_ids", descriptor_.variants.yes_ids},
                               {"no_ids", descriptor_.variants.no_ids}};
  const auto json = parse_payload(post("/v1/first_step", dump(body)), "/v1/first_step");
  const double yes = logprob_field(json, "yes_logprob");
  const double no = logprob_field(json, "no_logprob");

  TimedReadout out;
  out.readout.complete_over = ReadoutCoverage::variant_sets_only;
  const auto spread = [&out](std::span<const TokenId> ids, double pooled) {
    const double share = pooled - std::log(static_cast<double>(ids.size()));
    for (TokenId id : ids) out.readout.log_probs[id] = share;
  };
  spread(descriptor_.variants.yes_ids, yes);
  spread(descriptor_.variants.no_ids, no);
  out.elapsed_ms = elapsed_ms(start);
  return out;
}

TimedText RemoteBackend::generate_listwise(const GenerateRequest& request) const {
  if (request.prompt.empty()) throw Error(ErrorCode::invalid_argument, "empty prompt");
  const auto start = Clock::now();
  const nlohmann::json body = {{"prompt", request.prompt}, {"max_tokens", request.max_tokens}};
  const auto json = parse_payload(post("/v1/generate", dump(body)), "/v1/generate");
  const auto text = json.find("text");
  if (text == json.end() || !text->is_string()) {
    throw Error(ErrorCode::protocol, "generate response lacks string 'text'");
  }
  return {text->get<std::string>(), elapsed_ms(start)};
}

void RemoteBackend::probe() const {
  ScoreRequest request;
  request.prompt = "ping";
  score_first_step(request);
}

}  // namespace tsrank

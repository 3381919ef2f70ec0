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

// The scoring / generation boundary.
//
// Every request carries the rendered prompt, which is all a real model sees.
// The originating CandidateList rides along so the deterministic mock can
// bias toward ground truth when the list carries one; remote backends ignore
// it.

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "tsrank/core.hpp"
#include "tsrank/scoring.hpp"

namespace tsrank {

enum class BackendKind { mock, remote };

std::string_view to_string(BackendKind kind) noexcept;

struct BackendDescriptor {
  std::string name;
  BackendKind kind = BackendKind::mock;
  VariantSets variants;
  std::size_t max_slow_tokens = 1024;
};

struct ScoreRequest {
  std::string_view prompt;
  const CandidateList* list = nullptr;
  std::size_t target_index = 0;
};

struct GenerateRequest {
  std::string_view prompt;
  std::size_t max_tokens = 1024;
  const CandidateList* list = nullptr;
};

struct TimedReadout {
  FirstStepReadout readout;
  double elapsed_ms = 0.0;
};

struct TimedText {
  std::string text;
  double elapsed_ms = 0.0;
};

/// Implementations must tolerate concurrent calls.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual const BackendDescriptor& descriptor() const noexcept = 0;
  virtual TimedReadout score_first_step(const ScoreRequest& request) const = 0;
  virtual TimedText generate_listwise(const GenerateRequest& request) const = 0;

  /// True when elapsed_ms values come from a latency model rather than a
  /// clock; callers then derive wall times from the model too.
  virtual bool simulated_timing() const noexcept { return false; }

  /// Startup reachability check; throws BackendUnavailable on failure.
  virtual void probe() const {}
};

// ---------------------------------------------------------------------------
// Mock

struct MockSpec {
  std::uint64_t seed = 0;
  // Log-odds shift applied to the relevant candidate's prompt.
  double sharpness = 4.0;
  double slow_accuracy = 0.8;
  double malform_rate = 0.05;
  // Fraction of queries (keyed by query_id) whose z vector is near-uniform.
  double ambiguous_fraction = 0.45;
  double noise = 1.0;
  double ambiguous_noise = 0.05;
  // Latency model.
  double fast_ms_per_candidate = 70.0;
  double slow_ms_per_token = 25.0;
};

/// Throws Error(invalid_argument) on out-of-range fields.
void validate(const MockSpec& spec);

/// The mock's output-length unit: one token per this many bytes.
inline constexpr std::size_t kMockBytesPerToken = 4;

/// Default yes/no variant ids used by the mock vocabulary.
VariantSets default_variant_sets();

/// Deterministic stand-in for a decoder. Readouts cover the whole mock
/// vocabulary (the variant ids plus filler ids holding 1e-6 total mass) and
/// are a pure function of (spec, prompt bytes, list ground truth).
class MockBackend final : public Backend {
 public:
  explicit MockBackend(MockSpec spec, VariantSets variants = default_variant_sets(),
                       std::size_t max_slow_tokens = 1024);

  const BackendDescriptor& descriptor() const noexcept override { return descriptor_; }
  TimedReadout score_first_step(const ScoreRequest& request) const override;
  TimedText generate_listwise(const GenerateRequest& request) const override;
  bool simulated_timing() const noexcept override { return true; }

  const MockSpec& spec() const noexcept { return spec_; }

  /// The log-odds the mock encodes for a request; exposed for tests.
  double planned_log_odds(const ScoreRequest& request) const;
  /// Whether the mock treats this query as ambiguous.
  bool is_ambiguous(std::string_view query_id) const;

 private:
  MockSpec spec_;
  BackendDescriptor descriptor_;
};

// ---------------------------------------------------------------------------
// Remote
//
//   POST /v1/first_step  {"prompt", "yes_ids", "no_ids"}
//                     -> {"yes_logprob": float, "no_logprob": float}
//   POST /v1/generate    {"prompt", "max_tokens"} -> {"text": "..."}
//
// The server pools variant probabilities itself. The client spreads each
// pooled mass evenly over its variant ids so pooling on this side recovers
// the server's values.

struct RemoteSpec {
  std::string base_url = "http://127.0.0.1:8081";
  std::chrono::milliseconds deadline{30000};
  std::size_t parallelism = 4;
  std::chrono::milliseconds retry_backoff{100};
};

class RemoteBackend final : public Backend {
 public:
  RemoteBackend(RemoteSpec spec, VariantSets variants, std::size_t max_slow_tokens,
                std::string name = "remote");
  ~RemoteBackend() override;

  const BackendDescriptor& descriptor() const noexcept override { return descriptor_; }
  TimedReadout score_first_step(const ScoreRequest& request) const override;
  TimedText generate_listwise(const GenerateRequest& request) const override;
  void probe() const override;

 private:
  std::string post(const std::string& path, const std::string& body) const;

  RemoteSpec spec_;
  BackendDescriptor descriptor_;
  mutable std::mutex slots_mutex_;
  mutable std::condition_variable slots_cv_;
  mutable std::size_t in_flight_ = 0;
};

}  // namespace tsrank

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

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tsrank/backend.hpp"
#include "tsrank/pipeline.hpp"

namespace tsrank {

/// Effective run configuration. Serialized into every report.
struct RunConfig {
  BackendKind backend = BackendKind::mock;
  MockSpec mock;
  RemoteSpec remote;
  VariantSets variants = default_variant_sets();
  std::size_t max_slow_tokens = 1024;
  double threshold = kDefaultUncertaintyCap;
  std::size_t batch = 1;
  std::size_t workers = 1;
  std::vector<std::size_t> recall_cutoffs = kDefaultRecallCutoffs;
  std::string template_dir;  // empty: compiled-in templates
  std::size_t other_candidates_budget = kDefaultOtherCandidatesBudget;
  std::uint64_t seed = 0;  // feeds the mock
};

/// Throws Error(invalid_argument) unless T in [0, 1], batch >= 1, workers
/// >= 1, cutoffs >= 1 and the backend specs are valid.
void validate(const RunConfig& config);

/// Overlays the keys present in `json_text` onto `base`. Unknown keys are an
/// error. Throws Error(invalid_argument).
RunConfig merge_run_config(const RunConfig& base, const std::string& json_text);

std::string run_config_to_json(const RunConfig& config);

std::unique_ptr<Backend> make_backend(const RunConfig& config);
PipelineConfig make_pipeline_config(const RunConfig& config);

}  // namespace tsrank

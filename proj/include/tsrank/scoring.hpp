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

#include <map>
#include <span>

#include "tsrank/core.hpp"

namespace tsrank {

enum class ReadoutCoverage { full_vocab, variant_sets_only };

/// Natural-log probabilities at the first generated position.
struct FirstStepReadout {
  std::map<TokenId, double> log_probs;
  ReadoutCoverage complete_over = ReadoutCoverage::full_vocab;
};

/// Throws Error(invalid_argument) if any log-probability is positive or NaN.
void validate(const FirstStepReadout& readout);

/// log sum_i exp(log_probs[i]) with max-shift stabilization. Returns -inf
/// when every pooled id has zero mass. Throws readout_incomplete on a
/// missing id and invalid_argument on an empty id set.
double pool_log_prob(const FirstStepReadout& readout,
                     std::span<const TokenId> ids);

/// z = pooled log p(yes) - pooled log p(no). Throws degenerate_readout when
/// either side has zero mass.
double first_step_log_odds(const FirstStepReadout& readout,
                           const VariantSets& variants);

struct FastScore {
  double z = 0.0;  // canonical ranking key
  double s = 0.5;  // logistic(z)
  double q = 1.0;  // Bernoulli variance 4 s (1 - s)
};

/// Throws Error(invalid_argument) for non-finite z.
FastScore fast_score(double z);

}  // namespace tsrank

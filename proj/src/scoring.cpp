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

#include "tsrank/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tsrank/error.hpp"

namespace tsrank {

void validate(const FirstStepReadout& readout) {
  for (const auto& [id, lp] : readout.log_probs) {
    if (std::isnan(lp) || lp > 0.0) {
      throw Error(ErrorCode::invalid_argument,
                  "log-probability for token " + std::to_string(id) + " is not <= 0");
    }
  }
}

double pool_log_prob(const FirstStepReadout& readout, std::span<const TokenId> ids) {
  if (ids.empty()) throw Error(ErrorCode::invalid_argument, "cannot pool an empty id set");
  double peak = -std::numeric_limits<double>::infinity();
  for (TokenId id : ids) {
    const auto it = readout.log_probs.find(id);
    if (it == readout.log_probs.end()) {
      throw Error(ErrorCode::readout_incomplete,
                  "readout has no log-probability for token " + std::to_string(id));
    }
    peak = std::max(peak, it->second);
  }
  if (peak == -std::numeric_limits<double>::infinity()) return peak;
  double sum = 0.0;
  for (TokenId id : ids) sum += std::exp(readout.log_probs.at(id) - peak);
  return std::min(0.0, peak + std::log(sum));
}

double first_step_log_odds(const FirstStepReadout& readout, const VariantSets& variants) {
  const double yes = pool_log_prob(readout, variants.yes_ids);
  const double no = pool_log_prob(readout, variants.no_ids);
  if (!std::isfinite(yes) || !std::isfinite(no)) {
    throw Error(ErrorCode::degenerate_readout,
                std::string("zero pooled mass on the ") + (std::isfinite(yes) ? "no" : "yes") +
                    " side");
  }
  return yes - no;
}

FastScore fast_score(double z) {
  if (!std::isfinite(z)) throw Error(ErrorCode::invalid_argument, "log-odds must be finite");
  // Evaluate the logistic on the side that cannot overflow.
  const double s = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  return {z, s, 4.0 * s * (1.0 - s)};
}

}  // namespace tsrank

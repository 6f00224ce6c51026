// Copyright 2026 The MBMBR Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mbmbr/estimators.hpp"

#include <cmath>
#include <limits>

namespace mbmbr {

std::vector<double> NormalizeLogWeights(std::span<const double> log_weights) {
  const double norm = LogSumExp(log_weights);
  if (norm == -std::numeric_limits<double>::infinity()) {
    throw DegenerateWeightsError("every reference has zero model probability");
  }
  std::vector<double> out;
  out.reserve(log_weights.size());
  for (double lw : log_weights) out.push_back(std::exp(lw - norm));
  // One more pass removes the rounding left over from exp().
  const double sum = CompensatedSum(out);
  for (double& w : out) w /= sum;
  return out;
}

WeightVector EmpiricalWeights(const HypothesisPool& pool) {
  std::vector<double> w;
  w.reserve(pool.references().size());
  const auto total = static_cast<double>(pool.total_samples());
  for (const Hypothesis& h : pool.references()) {
    w.push_back(static_cast<double>(h.count) / total);
  }
  return WeightVector(std::move(w), WeightKind::kEmpirical);
}

WeightVector ModelBasedWeights(const HypothesisPool& pool) {
  return WeightVector(NormalizeLogWeights(pool.ReferenceLogProbs()),
                      WeightKind::kModelBased);
}

WeightVector LengthNormalizedWeights(const HypothesisPool& pool, double length_scale) {
  if (!std::isfinite(length_scale)) throw InputError("length scale must be finite");
  std::vector<double> log_w;
  log_w.reserve(pool.references().size());
  for (const Hypothesis& h : pool.references()) {
    // -inf stays -inf; the length term never revives a zero-mass reference.
    log_w.push_back(h.logprob.IsZero()
                        ? h.logprob.value()
                        : h.logprob.value() + length_scale * static_cast<double>(h.length));
  }
  return WeightVector(NormalizeLogWeights(log_w), WeightKind::kLengthNormalized);
}

}  // namespace mbmbr

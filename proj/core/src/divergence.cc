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

#include "mbmbr/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mbmbr {

RestrictedDistribution::RestrictedDistribution(WeightVector masses, double tail_mass)
    : masses_(std::move(masses)), tail_mass_(tail_mass) {
  if (!(tail_mass_ >= 0.0 && tail_mass_ <= 1.0)) {
    throw InputError("tail mass must lie in [0, 1]");
  }
}

RestrictedDistribution RestrictedDistribution::WithTailFromPool(const HypothesisPool& pool,
                                                                WeightVector masses) {
  const std::vector<double> lps = pool.ReferenceLogProbs();
  std::vector<double> probs;
  probs.reserve(lps.size());
  for (double lp : lps) probs.push_back(std::exp(lp));
  const double tail = std::clamp(1.0 - CompensatedSum(probs), 0.0, 1.0);
  return RestrictedDistribution(std::move(masses), tail);
}

double KlRestricted(std::span<const double> p, std::span<const double> model_logprobs) {
  if (p.size() != model_logprobs.size()) {
    throw ShapeError("distribution and logprobs differ in length");
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (model_logprobs[i] == -std::numeric_limits<double>::infinity()) {
      return kInfiniteDivergence;
    }
    kl += p[i] * (std::log(p[i]) - model_logprobs[i]);
  }
  // Rounding can leave a tiny negative value when p == P.
  return std::max(kl, 0.0);
}

double KlRestricted(const RestrictedDistribution& p, std::span<const double> model_logprobs) {
  return KlRestricted(p.masses().weights(), model_logprobs);
}

double KlModelBasedClosedForm(std::span<const double> reference_logprobs) {
  const double log_mass = LogSumExp(reference_logprobs);
  if (log_mass == -std::numeric_limits<double>::infinity()) {
    throw DegenerateWeightsError("references carry no model probability");
  }
  return std::max(-log_mass, 0.0);
}

double KlModelBasedClosedForm(const HypothesisPool& pool) {
  return KlModelBasedClosedForm(pool.ReferenceLogProbs());
}

double JsdRestricted(const RestrictedDistribution& p, std::span<const double> model_logprobs) {
  const auto& w = p.masses().weights();
  if (w.size() != model_logprobs.size()) {
    throw ShapeError("distribution and logprobs differ in length");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double q = std::exp(model_logprobs[i]);
    const double m = 0.5 * (w[i] + q);
    if (w[i] > 0.0) sum += w[i] * std::log(w[i] / m);
    if (q > 0.0) sum += q * std::log(q / m);
  }
  sum += p.tail_mass() * std::numbers::ln2;
  return std::clamp(0.5 * sum, 0.0, std::numbers::ln2);
}

PinskerBound PinskerObjectiveBound(const UtilityMatrix& matrix, std::span<const double> estimate,
                                   std::span<const double> exact) {
  if (estimate.size() != matrix.cols() || exact.size() != matrix.cols()) {
    throw ShapeError("Pinsker bound: distributions do not match the utility matrix columns");
  }
  PinskerBound bound;
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    const auto row = matrix.row(i);
    double diff = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) diff += row[j] * (exact[j] - estimate[j]);
    bound.lhs = std::max(bound.lhs, std::abs(diff));
  }
  std::vector<double> log_exact;
  log_exact.reserve(exact.size());
  for (double x : exact) log_exact.push_back(x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity());
  bound.kl = KlRestricted(estimate, log_exact);
  bound.rhs = std::isinf(bound.kl) ? kInfiniteDivergence
                                   : matrix.u_max() * std::sqrt(2.0 * bound.kl);
  return bound;
}

}  // namespace mbmbr

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

// Divergences between a distribution supported on the references R and the
// model distribution P, using natural logs throughout.

#ifndef MBMBR_DIVERGENCE_HPP_
#define MBMBR_DIVERGENCE_HPP_

#include <limits>
#include <span>
#include <vector>

#include "mbmbr/core.hpp"
#include "mbmbr/utility.hpp"

namespace mbmbr {

inline constexpr double kInfiniteDivergence = std::numeric_limits<double>::infinity();

// A weight vector over R plus the model mass outside R. The tail is stored,
// not recomputed, since external pools only know P on R through the logprobs
// they report.
class RestrictedDistribution {
 public:
  // Throws InputError unless tail_mass is in [0, 1].
  RestrictedDistribution(WeightVector masses, double tail_mass);

  // Tail taken as 1 - sum_{y in R} P(y), clamped to [0, 1].
  static RestrictedDistribution WithTailFromPool(const HypothesisPool& pool,
                                                 WeightVector masses);

  const WeightVector& masses() const { return masses_; }
  double tail_mass() const { return tail_mass_; }

 private:
  WeightVector masses_;
  double tail_mass_;
};

// sum_{y in R} p(y) (log p(y) - log P(y)) with 0 log 0 = 0. Returns
// kInfiniteDivergence if p puts mass where P is zero.
double KlRestricted(const RestrictedDistribution& p, std::span<const double> model_logprobs);
double KlRestricted(std::span<const double> p, std::span<const double> model_logprobs);

// KL(P_MB || P) = -log sum_{y in R} P(y). Throws DegenerateWeightsError when
// R carries no model mass.
double KlModelBasedClosedForm(const HypothesisPool& pool);
double KlModelBasedClosedForm(std::span<const double> reference_logprobs);

// Jensen-Shannon divergence from restricted quantities only:
// 1/2 [sum_R p log(p/M) + sum_R P log(P/M) + tail * ln 2], M = (p + P) / 2.
double JsdRestricted(const RestrictedDistribution& p, std::span<const double> model_logprobs);

struct PinskerBound {
  // max over candidates of |E_P[u] - E_p[u]|.
  double lhs = 0.0;
  // u_max * sqrt(2 KL(p || P)); infinite when the KL is.
  double rhs = 0.0;
  double kl = 0.0;

  bool Holds(double slack = 0.0) const { return lhs <= rhs + slack; }
};

// `matrix` holds u(h, y) for every candidate against every outcome of an
// enumerated distribution; `estimate` and `exact` are aligned with its
// columns.
PinskerBound PinskerObjectiveBound(const UtilityMatrix& matrix, std::span<const double> estimate,
                                   std::span<const double> exact);

}  // namespace mbmbr

#endif  // MBMBR_DIVERGENCE_HPP_

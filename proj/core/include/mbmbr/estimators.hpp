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

#ifndef MBMBR_ESTIMATORS_HPP_
#define MBMBR_ESTIMATORS_HPP_

#include <span>
#include <vector>

#include "mbmbr/core.hpp"

namespace mbmbr {

// Monte Carlo estimate: occurrence count over |H_ref|.
WeightVector EmpiricalWeights(const HypothesisPool& pool);

// P restricted to R and renormalized. Counts are ignored. Throws
// DegenerateWeightsError when every reference is at log-zero.
WeightVector ModelBasedWeights(const HypothesisPool& pool);

// Weights proportional to exp(length_scale * ℓ(y)) * P(y) over R. A scale of
// zero reduces to ModelBasedWeights.
WeightVector LengthNormalizedWeights(const HypothesisPool& pool,
                                     double length_scale = 1.0);

// Normalizes log-domain scores into a probability vector. Entries at -inf get
// weight zero.
std::vector<double> NormalizeLogWeights(std::span<const double> log_weights);

}  // namespace mbmbr

#endif  // MBMBR_ESTIMATORS_HPP_

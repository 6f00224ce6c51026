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

// Decision rules. Monte Carlo MBR, model-based MBR and its length-normalized
// variant share one kernel and differ only in the reference weights; the exact
// rule sums over a toy LM's complete support.

#ifndef MBMBR_DECODER_HPP_
#define MBMBR_DECODER_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mbmbr/core.hpp"
#include "mbmbr/toylm.hpp"
#include "mbmbr/utility.hpp"

namespace mbmbr {

enum class DecisionRule { kMbr, kMbmbr, kMbmbrL, kExact };

std::string_view DecisionRuleName(DecisionRule rule);
// Accepts "mbr", "mbmbr", "mbmbr-l" / "mbmbr_l", "exact".
std::optional<DecisionRule> ParseDecisionRule(std::string_view name);

struct SelectionResult {
  std::size_t chosen_index = 0;
  std::string chosen_text;
  std::vector<double> objective_values;
  DecisionRule rule = DecisionRule::kMbr;
  // Another candidate's objective lies within kTieTolerance of the winner's.
  bool tie_broken = false;

  double chosen_objective() const { return objective_values[chosen_index]; }
};

inline constexpr double kTieTolerance = 1e-12;

// Index of the maximum; among values within kTieTolerance of the maximum the
// lowest index wins.
std::size_t ArgmaxLowestIndex(std::span<const double> values, bool* tie_broken = nullptr);

// objective[i] = sum_j matrix(i, j) * weights[j], summed left to right.
// Throws ShapeError if the matrix does not match the pool or the weights.
SelectionResult Select(const HypothesisPool& pool, const UtilityMatrix& matrix,
                       const WeightVector& weights, DecisionRule rule);

// Same kernel over explicit candidate texts.
SelectionResult Select(std::span<const std::string> candidates, const UtilityMatrix& matrix,
                       std::span<const double> weights, DecisionRule rule);

// Exact expected utility under the toy LM: sum over the full support of
// u(h, y) * P(y). Throws BudgetError if the support exceeds `budget`.
SelectionResult ExactObjective(std::span<const std::string> candidates, const ToyLM& lm,
                               const Utility& utility, std::size_t budget = 1'000'000);

// Same, against a support enumerated once by the caller.
SelectionResult ExactObjective(std::span<const std::string> candidates,
                               std::span<const EnumeratedSequence> support,
                               const Utility& utility);

// ℓ(chosen) / ℓ(reference). Throws DivisionError for an empty reference.
double RelativeLength(const SelectionResult& result, std::string_view reference_text,
                      LengthUnit unit = LengthUnit::kTokens);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

// Population mean and standard deviation; {0, 0} for an empty input.
MeanStd MeanAndStddev(std::span<const double> values);

}  // namespace mbmbr

#endif  // MBMBR_DECODER_HPP_

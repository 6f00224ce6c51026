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

#include "mbmbr/decoder.hpp"

#include <cmath>

namespace mbmbr {

std::string_view DecisionRuleName(DecisionRule rule) {
  switch (rule) {
    case DecisionRule::kMbr: return "mbr";
    case DecisionRule::kMbmbr: return "mbmbr";
    case DecisionRule::kMbmbrL: return "mbmbr-l";
    case DecisionRule::kExact: return "exact";
  }
  return "unknown";
}

std::optional<DecisionRule> ParseDecisionRule(std::string_view name) {
  if (name == "mbr") return DecisionRule::kMbr;
  if (name == "mbmbr") return DecisionRule::kMbmbr;
  if (name == "mbmbr-l" || name == "mbmbr_l") return DecisionRule::kMbmbrL;
  if (name == "exact") return DecisionRule::kExact;
  return std::nullopt;
}

std::size_t ArgmaxLowestIndex(std::span<const double> values, bool* tie_broken) {
  if (values.empty()) throw ShapeError("argmax over an empty candidate list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  // Walk back to the first index that is tied with the maximum.
  std::size_t chosen = best;
  bool tie = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i != best && std::abs(values[i] - values[best]) <= kTieTolerance) {
      tie = true;
      if (i < chosen) chosen = i;
    }
  }
  if (tie_broken) *tie_broken = tie;
  return chosen;
}

SelectionResult Select(std::span<const std::string> candidates, const UtilityMatrix& matrix,
                       std::span<const double> weights, DecisionRule rule) {
  if (matrix.rows() != candidates.size() || matrix.cols() != weights.size()) {
    throw ShapeError("utility matrix is " + std::to_string(matrix.rows()) + "x" +
                     std::to_string(matrix.cols()) + " but there are " +
                     std::to_string(candidates.size()) + " candidates and " +
                     std::to_string(weights.size()) + " reference weights");
  }
  SelectionResult result;
  result.rule = rule;
  result.objective_values.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double v = 0.0;
    const auto row = matrix.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) v += row[j] * weights[j];
    result.objective_values.push_back(v);
  }
  result.chosen_index = ArgmaxLowestIndex(result.objective_values, &result.tie_broken);
  result.chosen_text = candidates[result.chosen_index];
  return result;
}

SelectionResult Select(const HypothesisPool& pool, const UtilityMatrix& matrix,
                       const WeightVector& weights, DecisionRule rule) {
  if (weights.size() != pool.references().size()) {
    throw ShapeError("weight vector does not match the pool's reference count");
  }
  const std::vector<std::string> candidates = Texts(pool.candidates());
  return Select(candidates, matrix, weights.weights(), rule);
}

SelectionResult ExactObjective(std::span<const std::string> candidates,
                               std::span<const EnumeratedSequence> support,
                               const Utility& utility) {
  std::vector<std::string> texts;
  std::vector<double> probs;
  texts.reserve(support.size());
  probs.reserve(support.size());
  for (const EnumeratedSequence& s : support) {
    texts.push_back(s.text);
    probs.push_back(s.logprob.Probability());
  }
  const UtilityMatrix matrix = ComputeUtilityMatrix(candidates, texts, utility);
  return Select(candidates, matrix, probs, DecisionRule::kExact);
}

SelectionResult ExactObjective(std::span<const std::string> candidates, const ToyLM& lm,
                               const Utility& utility, std::size_t budget) {
  const std::vector<EnumeratedSequence> support = Enumerate(lm, budget);
  return ExactObjective(candidates, support, utility);
}

double RelativeLength(const SelectionResult& result, std::string_view reference_text,
                      LengthUnit unit) {
  const std::size_t ref_len = SequenceLength(reference_text, unit);
  if (ref_len == 0) throw DivisionError("reference text is empty");
  return static_cast<double>(SequenceLength(result.chosen_text, unit)) /
         static_cast<double>(ref_len);
}

MeanStd MeanAndStddev(std::span<const double> values) {
  if (values.empty()) return {};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return {mean, std::sqrt(var)};
}

}  // namespace mbmbr

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

// Lexical utility functions u(h, y) and the candidate x reference utility
// matrix. All built-in utilities are bounded in [0, 1].

#ifndef MBMBR_UTILITY_HPP_
#define MBMBR_UTILITY_HPP_

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mbmbr/core.hpp"

namespace mbmbr {

// Sentence BLEU with add-one smoothing on every n-gram order:
// p_n = (matches_n + 1) / (max(0, |h| - n + 1) + 1). An empty hypothesis
// scores 0.
double SentenceBleu(std::string_view hypothesis, std::string_view reference,
                    int max_n = 4);

// Character n-gram F-beta, whitespace ignored. Precision and recall are
// averaged over the orders that occur in either string.
double Chrf(std::string_view hypothesis, std::string_view reference, int char_n = 6,
            double beta = 2.0);

// Token multiset F1.
double UnigramF1(std::string_view hypothesis, std::string_view reference);

enum class UtilityKind { kBleu, kChrf, kUnigramF1 };

std::string_view UtilityName(UtilityKind kind);
// Accepts "bleu", "chrf", "f1" / "unigram_f1".
std::optional<UtilityKind> ParseUtilityKind(std::string_view name);

class Utility {
 public:
  explicit Utility(UtilityKind kind) : kind_(kind) {}

  UtilityKind kind() const { return kind_; }
  std::string_view name() const { return UtilityName(kind_); }
  double operator()(std::string_view hypothesis, std::string_view reference) const;

 private:
  UtilityKind kind_;
};

// Dense row-major matrix: rows are candidates, columns are references.
class UtilityMatrix {
 public:
  UtilityMatrix() = default;
  // Throws ShapeError if values.size() != rows * cols.
  UtilityMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t row, std::size_t col) const { return values_[row * cols_ + col]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values_).subspan(r * cols_, cols_);
  }
  const std::vector<double>& values() const { return values_; }
  // max |u| over the matrix.
  double u_max() const { return u_max_; }

  friend bool operator==(const UtilityMatrix&, const UtilityMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  double u_max_ = 0.0;
};

// Fills values[i][j] = u(candidate_i, reference_j). Rows are split across
// `threads` workers; each cell is computed independently so the result does
// not depend on scheduling.
UtilityMatrix ComputeUtilityMatrix(std::span<const std::string> candidates,
                                   std::span<const std::string> references,
                                   const Utility& utility, unsigned threads = 1);

UtilityMatrix ComputeUtilityMatrix(const HypothesisPool& pool, const Utility& utility,
                                   unsigned threads = 1);

std::vector<std::string> Texts(std::span<const Hypothesis> hypotheses);

}  // namespace mbmbr

#endif  // MBMBR_UTILITY_HPP_

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

// Shared domain types: log-probabilities, hypotheses, deduplicated pools and
// normalized weight vectors over a pool's references.

#ifndef MBMBR_CORE_HPP_
#define MBMBR_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mbmbr/errors.hpp"

namespace mbmbr {

// Natural-log probability. Negative infinity is the distinguished log(0).
class LogProb {
 public:
  constexpr LogProb() = default;
  // Throws InputError on NaN. Positive values are accepted so that
  // unnormalized scorer outputs can flow through; IsNormalized() reports them.
  explicit LogProb(double value);

  static constexpr LogProb Zero() {
    LogProb lp;
    lp.value_ = -std::numeric_limits<double>::infinity();
    return lp;
  }
  static constexpr LogProb One() { return LogProb(); }
  static LogProb FromProbability(double p);

  constexpr double value() const { return value_; }
  bool IsZero() const { return value_ == -std::numeric_limits<double>::infinity(); }
  bool IsNormalized() const { return value_ <= 0.0; }
  double Probability() const;

  friend constexpr bool operator==(LogProb a, LogProb b) = default;
  friend constexpr auto operator<=>(LogProb a, LogProb b) { return a.value_ <=> b.value_; }

 private:
  double value_ = 0.0;
};

// log(sum(exp(x))) over the values; returns -inf for an empty or all -inf
// input.
double LogSumExp(std::span<const double> values);

// Neumaier-compensated sum, evaluated left to right.
double CompensatedSum(std::span<const double> values);

// How ℓ(y) is counted. Begin/end markers never count.
enum class LengthUnit { kTokens, kCharacters };

std::size_t SequenceLength(std::string_view text, LengthUnit unit);

// Splits on runs of ASCII whitespace.
std::vector<std::string_view> SplitTokens(std::string_view text);

// Dedup key: the surface string with one trailing newline removed.
std::string_view DedupKey(std::string_view text);

struct Hypothesis {
  std::string text;
  std::size_t length = 0;
  LogProb logprob;
  std::int64_t count = 1;
};

// Which side of the pool a sample lands on when building a split pool.
enum class SampleRole { kBoth, kCandidate, kReference };

struct Sample {
  std::string text;
  LogProb logprob;
  std::int64_t count = 1;
  SampleRole role = SampleRole::kBoth;
};

enum class PoolMode { kShared, kSplit };

struct PoolOptions {
  PoolMode mode = PoolMode::kShared;
  LengthUnit length_unit = LengthUnit::kTokens;
  std::string source_id;
};

// Candidates H_cand and the deduplicated reference set R built from the
// sampled collection H_ref. Immutable once built.
class HypothesisPool {
 public:
  // Throws EmptyPoolError when no sample contributes a reference, or when a
  // split pool ends up with no candidates.
  static HypothesisPool Build(std::span<const Sample> samples,
                              const PoolOptions& options = {});

  const std::string& source_id() const { return source_id_; }
  const std::vector<Hypothesis>& candidates() const { return candidates_; }
  const std::vector<Hypothesis>& references() const { return references_; }
  std::int64_t total_samples() const { return total_samples_; }
  PoolMode mode() const { return mode_; }
  LengthUnit length_unit() const { return length_unit_; }
  // Consistency notes, e.g. one text arriving with two different logprobs.
  const std::vector<std::string>& warnings() const { return warnings_; }

  std::vector<double> ReferenceLogProbs() const;

  // Expands references back into (text, logprob, count) samples in order.
  std::vector<Sample> ToSamples() const;

  friend bool operator==(const HypothesisPool& a, const HypothesisPool& b);

 private:
  HypothesisPool() = default;

  std::string source_id_;
  std::vector<Hypothesis> candidates_;
  std::vector<Hypothesis> references_;
  std::int64_t total_samples_ = 0;
  PoolMode mode_ = PoolMode::kShared;
  LengthUnit length_unit_ = LengthUnit::kTokens;
  std::vector<std::string> warnings_;
};

bool operator==(const Hypothesis& a, const Hypothesis& b);

enum class WeightKind { kEmpirical, kModelBased, kLengthNormalized, kExact };

std::string_view WeightKindName(WeightKind kind);

// A probability vector aligned with a pool's reference list.
class WeightVector {
 public:
  static constexpr double kSumTolerance = 1e-12;

  // Throws InvariantError unless weights are non-negative and sum to one
  // within kSumTolerance.
  WeightVector(std::vector<double> weights, WeightKind kind);

  const std::vector<double>& weights() const { return weights_; }
  WeightKind kind() const { return kind_; }
  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }

 private:
  std::vector<double> weights_;
  WeightKind kind_;
};

// SplitMix64 step; derives independent per-run or per-input seeds from a base
// seed so parallel work is schedule-independent.
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream);

}  // namespace mbmbr

#endif  // MBMBR_CORE_HPP_

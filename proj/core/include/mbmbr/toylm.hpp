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

// An exactly enumerable autoregressive model over a small vocabulary, and the
// ancestral / top-k / nucleus / epsilon samplers that draw from it.
//
// A ToyLM emits at most max_length symbols after BOS, the last of which is
// always EOS: once the body reaches max_length - 1 symbols, EOS is forced with
// probability one. Conditionals are keyed by the last `order` symbols of the
// history, left-padded with BOS.

#ifndef MBMBR_TOYLM_HPP_
#define MBMBR_TOYLM_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mbmbr/core.hpp"

namespace mbmbr {

using SymbolId = int;

class ToyLM {
 public:
  using Context = std::vector<SymbolId>;

  // Validates every conditional (length, sum to one within 1e-12, no mass on
  // BOS) and that every context reachable below the length cap has a row.
  ToyLM(std::vector<std::string> vocabulary, std::string_view bos, std::string_view eos,
        int order, int max_length, std::map<Context, std::vector<double>> conditionals);

  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  std::size_t vocab_size() const { return vocabulary_.size(); }
  SymbolId bos() const { return bos_; }
  SymbolId eos() const { return eos_; }
  int order() const { return order_; }
  int max_length() const { return max_length_; }
  const std::map<Context, std::vector<double>>& conditionals() const { return conditionals_; }

  // Next-symbol distribution after `body` (symbols generated so far, without
  // BOS). Returns the forced-EOS distribution at the length cap.
  std::vector<double> NextDistribution(std::span<const SymbolId> body) const;

  // Body symbols joined by single spaces; BOS/EOS are not rendered.
  std::string Render(std::span<const SymbolId> body) const;
  // Inverse of Render. Throws MalformedSequenceError on unknown symbols,
  // BOS/EOS inside the body, or a body longer than max_length - 1.
  std::vector<SymbolId> ParseBody(std::string_view text) const;
  SymbolId SymbolIndex(std::string_view symbol) const;

 private:
  const std::vector<double>& Row(std::span<const SymbolId> body) const;

  std::vector<std::string> vocabulary_;
  SymbolId bos_ = 0;
  SymbolId eos_ = 1;
  int order_ = 1;
  int max_length_ = 1;
  std::map<Context, std::vector<double>> conditionals_;
};

// log P of a complete sequence BOS ... EOS. Exact sum of step log-probs.
LogProb SequenceLogProb(const ToyLM& lm, std::span<const SymbolId> sequence);
// Same, for a rendered body.
LogProb TextLogProb(const ToyLM& lm, std::string_view body_text);

struct EnumeratedSequence {
  std::vector<SymbolId> body;
  std::string text;
  LogProb logprob;
};

// Every complete sequence with positive probability, in depth-first order
// (a prefix's EOS completion before its extensions, symbols ascending).
// Throws BudgetError as soon as more than `budget` sequences exist.
std::vector<EnumeratedSequence> Enumerate(const ToyLM& lm, std::size_t budget = 1'000'000);

enum class SamplingAlgorithm { kAncestral, kTopK, kNucleus, kEpsilon };

std::string_view SamplingAlgorithmName(SamplingAlgorithm algorithm);
std::optional<SamplingAlgorithm> ParseSamplingAlgorithm(std::string_view name);

struct SamplerConfig {
  SamplingAlgorithm algorithm = SamplingAlgorithm::kAncestral;
  int k = 10;
  double p = 0.9;
  double epsilon = 0.02;
  double temperature = 1.0;
  std::uint64_t seed = 0;

  // Checks only the fields the chosen algorithm reads, plus temperature.
  void Validate() const;
};

// Applies temperature, then the configured truncation, then renormalizes.
// Entries that survive untouched are returned bit-identical. When epsilon
// truncation would remove everything, only the argmax survives.
std::vector<double> TruncateDistribution(std::span<const double> probs,
                                         const SamplerConfig& config);

// Draws n sequences step by step from truncated conditionals. Each returned
// logprob is the untruncated model log-probability. Deterministic in
// config.seed.
std::vector<Sample> SampleSequences(const ToyLM& lm, const SamplerConfig& config,
                                    std::size_t n);

struct RandomLMOptions {
  int symbols = 4;
  int order = 1;
  int max_length = 7;
  // Dirichlet concentration for non-EOS symbols and for EOS.
  double concentration = 0.5;
  double eos_concentration = 0.5;
};

// Vocabulary is {<s>, </s>, a, b, ...}; every context gets a Dirichlet row.
ToyLM RandomToyLM(const RandomLMOptions& options, std::uint64_t seed);

}  // namespace mbmbr

#endif  // MBMBR_TOYLM_HPP_

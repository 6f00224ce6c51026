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

#include "mbmbr/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace mbmbr {

LogProb::LogProb(double value) : value_(value) {
  if (std::isnan(value)) throw InputError("log-probability is NaN");
  if (value == std::numeric_limits<double>::infinity()) {
    throw InputError("log-probability is +inf");
  }
}

LogProb LogProb::FromProbability(double p) {
  if (!(p >= 0.0)) throw InputError("probability must be non-negative");
  return p == 0.0 ? Zero() : LogProb(std::log(p));
}

double LogProb::Probability() const { return std::exp(value_); }

double LogSumExp(std::span<const double> values) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double max = kNegInf;
  for (double v : values) max = std::max(max, v);
  if (max == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

double CompensatedSum(std::span<const double> values) {
  double sum = 0.0;
  double c = 0.0;
  for (double v : values) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      c += (sum - t) + v;
    } else {
      c += (v - t) + sum;
    }
    sum = t;
  }
  return sum + c;
}

namespace {

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<std::string_view> SplitTokens(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !IsSpace(text[i])) ++i;
    if (i > start) tokens.push_back(text.substr(start, i - start));
  }
  return tokens;
}

std::size_t SequenceLength(std::string_view text, LengthUnit unit) {
  if (unit == LengthUnit::kCharacters) {
    // Count UTF-8 code points, not bytes.
    return static_cast<std::size_t>(std::count_if(
        text.begin(), text.end(),
        [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
  }
  return SplitTokens(text).size();
}

std::string_view DedupKey(std::string_view text) {
  if (!text.empty() && text.back() == '\n') text.remove_suffix(1);
  return text;
}

HypothesisPool HypothesisPool::Build(std::span<const Sample> samples,
                                     const PoolOptions& options) {
  if (samples.empty()) throw EmptyPoolError("no samples for pool '" + options.source_id + "'");

  HypothesisPool pool;
  pool.source_id_ = options.source_id;
  pool.mode_ = options.mode;
  pool.length_unit_ = options.length_unit;

  std::unordered_map<std::string, std::size_t> ref_index;
  std::unordered_map<std::string, std::size_t> cand_index;

  auto add = [&](std::vector<Hypothesis>& list,
                 std::unordered_map<std::string, std::size_t>& index,
                 const Sample& s, bool warn) {
    std::string key(DedupKey(s.text));
    auto [it, inserted] = index.try_emplace(key, list.size());
    if (inserted) {
      Hypothesis h;
      h.length = SequenceLength(key, options.length_unit);
      h.text = std::move(key);
      h.logprob = s.logprob;
      h.count = s.count;
      list.push_back(std::move(h));
      return;
    }
    Hypothesis& h = list[it->second];
    h.count += s.count;
    if (warn && h.logprob != s.logprob) {
      std::ostringstream os;
      os.precision(17);
      os << "text '" << h.text << "' seen with logprob " << h.logprob.value()
         << " and later " << s.logprob.value() << "; keeping the first";
      pool.warnings_.push_back(os.str());
    }
  };

  for (const Sample& s : samples) {
    if (s.count < 1) throw InputError("sample count must be >= 1");
    const bool shared = options.mode == PoolMode::kShared;
    if (shared || s.role != SampleRole::kCandidate) {
      add(pool.references_, ref_index, s, true);
      pool.total_samples_ += s.count;
    }
    if (!shared && s.role != SampleRole::kReference) {
      add(pool.candidates_, cand_index, s, s.role == SampleRole::kCandidate);
    }
  }

  if (options.mode == PoolMode::kShared) pool.candidates_ = pool.references_;
  if (pool.references_.empty()) {
    throw EmptyPoolError("pool '" + options.source_id + "' has no references");
  }
  if (pool.candidates_.empty()) {
    throw EmptyPoolError("pool '" + options.source_id + "' has no candidates");
  }
  return pool;
}

std::vector<double> HypothesisPool::ReferenceLogProbs() const {
  std::vector<double> out;
  out.reserve(references_.size());
  for (const Hypothesis& h : references_) out.push_back(h.logprob.value());
  return out;
}

std::vector<Sample> HypothesisPool::ToSamples() const {
  std::vector<Sample> out;
  if (mode_ == PoolMode::kSplit) {
    for (const Hypothesis& h : candidates_) {
      out.push_back({h.text, h.logprob, h.count, SampleRole::kCandidate});
    }
  }
  const SampleRole role =
      mode_ == PoolMode::kShared ? SampleRole::kBoth : SampleRole::kReference;
  for (const Hypothesis& h : references_) {
    out.push_back({h.text, h.logprob, h.count, role});
  }
  return out;
}

bool operator==(const Hypothesis& a, const Hypothesis& b) {
  return a.text == b.text && a.length == b.length && a.logprob == b.logprob &&
         a.count == b.count;
}

bool operator==(const HypothesisPool& a, const HypothesisPool& b) {
  return a.source_id_ == b.source_id_ && a.mode_ == b.mode_ &&
         a.length_unit_ == b.length_unit_ && a.total_samples_ == b.total_samples_ &&
         a.candidates_ == b.candidates_ && a.references_ == b.references_;
}

std::string_view WeightKindName(WeightKind kind) {
  switch (kind) {
    case WeightKind::kEmpirical: return "empirical";
    case WeightKind::kModelBased: return "model_based";
    case WeightKind::kLengthNormalized: return "length_normalized";
    case WeightKind::kExact: return "exact";
  }
  return "unknown";
}

WeightVector::WeightVector(std::vector<double> weights, WeightKind kind)
    : weights_(std::move(weights)), kind_(kind) {
  for (double w : weights_) {
    if (!(w >= 0.0)) throw InvariantError("weight vector has a negative or NaN entry");
  }
  const double sum = CompensatedSum(weights_);
  if (std::abs(sum - 1.0) > kSumTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << WeightKindName(kind) << " weights sum to " << sum;
    throw InvariantError(os.str());
  }
}

std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace mbmbr

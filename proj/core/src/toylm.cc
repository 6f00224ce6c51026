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

#include "mbmbr/toylm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace mbmbr {
namespace {

constexpr double kRowTolerance = 1e-12;

std::string ContextString(const ToyLM& lm, std::span<const SymbolId> ctx) {
  std::string s = "[";
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (i) s += ' ';
    s += lm.vocabulary()[static_cast<std::size_t>(ctx[i])];
  }
  return s + "]";
}

// Uniform double in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double UniformDouble(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t DrawIndex(std::span<const double> probs, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = i;
    cumulative += probs[i];
    if (u < cumulative) return i;
  }
  return last_positive;
}

}  // namespace

ToyLM::ToyLM(std::vector<std::string> vocabulary, std::string_view bos, std::string_view eos,
             int order, int max_length, std::map<Context, std::vector<double>> conditionals)
    : vocabulary_(std::move(vocabulary)),
      order_(order),
      max_length_(max_length),
      conditionals_(std::move(conditionals)) {
  if (order_ < 0) throw InputError("toy LM order must be >= 0");
  if (max_length_ < 1) throw InputError("toy LM max_length must be >= 1");
  std::set<std::string_view> seen;
  for (const std::string& sym : vocabulary_) {
    if (sym.empty()) throw InputError("toy LM vocabulary contains an empty symbol");
    if (std::any_of(sym.begin(), sym.end(),
                    [](char c) { return std::isspace(static_cast<unsigned char>(c)); })) {
      throw InputError("toy LM symbol '" + sym + "' contains whitespace");
    }
    if (!seen.insert(sym).second) throw InputError("duplicate toy LM symbol '" + sym + "'");
  }
  bos_ = SymbolIndex(bos);
  eos_ = SymbolIndex(eos);
  if (bos_ == eos_) throw InputError("BOS and EOS must differ");

  const std::size_t v = vocabulary_.size();
  for (const auto& [ctx, row] : conditionals_) {
    if (ctx.size() != static_cast<std::size_t>(order_)) {
      throw InputError("context " + ContextString(*this, ctx) + " does not have length " +
                       std::to_string(order_));
    }
    for (SymbolId s : ctx) {
      if (s < 0 || static_cast<std::size_t>(s) >= v || s == eos_) {
        throw InputError("context contains an invalid symbol");
      }
    }
    if (row.size() != v) {
      throw InputError("conditional for " + ContextString(*this, ctx) +
                       " has the wrong number of entries");
    }
    for (double p : row) {
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw InputError("conditional for " + ContextString(*this, ctx) +
                         " has a negative or non-finite entry");
      }
    }
    if (row[static_cast<std::size_t>(bos_)] != 0.0) {
      throw InputError("conditional for " + ContextString(*this, ctx) + " puts mass on BOS");
    }
    const double sum = CompensatedSum(row);
    if (std::abs(sum - 1.0) > kRowTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "conditional for " << ContextString(*this, ctx) << " sums to " << sum;
      throw InputError(os.str());
    }
  }

  // Breadth-first walk over contexts consulted before the length cap.
  std::set<Context> visited;
  std::deque<std::pair<Context, int>> queue;
  Context start(static_cast<std::size_t>(order_), bos_);
  visited.insert(start);
  queue.emplace_back(start, 0);
  while (!queue.empty()) {
    auto [ctx, depth] = queue.front();
    queue.pop_front();
    if (depth >= max_length_ - 1) continue;
    auto it = conditionals_.find(ctx);
    if (it == conditionals_.end()) {
      throw InputError("no conditional for reachable context " + ContextString(*this, ctx));
    }
    if (depth + 1 >= max_length_ - 1) continue;
    for (std::size_t s = 0; s < v; ++s) {
      if (static_cast<SymbolId>(s) == eos_ || it->second[s] <= 0.0) continue;
      Context next = ctx;
      if (order_ > 0) {
        next.erase(next.begin());
        next.push_back(static_cast<SymbolId>(s));
      }
      if (visited.insert(next).second) queue.emplace_back(std::move(next), depth + 1);
    }
  }
}

SymbolId ToyLM::SymbolIndex(std::string_view symbol) const {
  auto it = std::find(vocabulary_.begin(), vocabulary_.end(), symbol);
  if (it == vocabulary_.end()) {
    throw MalformedSequenceError("unknown symbol '" + std::string(symbol) + "'");
  }
  return static_cast<SymbolId>(it - vocabulary_.begin());
}

const std::vector<double>& ToyLM::Row(std::span<const SymbolId> body) const {
  Context ctx(static_cast<std::size_t>(order_), bos_);
  const std::size_t take = std::min(body.size(), ctx.size());
  std::copy(body.end() - static_cast<std::ptrdiff_t>(take), body.end(), ctx.end() - static_cast<std::ptrdiff_t>(take));
  auto it = conditionals_.find(ctx);
  if (it == conditionals_.end()) {
    throw InvariantError("no conditional for context " + ContextString(*this, ctx));
  }
  return it->second;
}

std::vector<double> ToyLM::NextDistribution(std::span<const SymbolId> body) const {
  if (body.size() + 1 >= static_cast<std::size_t>(max_length_)) {
    std::vector<double> forced(vocabulary_.size(), 0.0);
    forced[static_cast<std::size_t>(eos_)] = 1.0;
    return forced;
  }
  return Row(body);
}

std::string ToyLM::Render(std::span<const SymbolId> body) const {
  std::string out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (i) out += ' ';
    out += vocabulary_[static_cast<std::size_t>(body[i])];
  }
  return out;
}

std::vector<SymbolId> ToyLM::ParseBody(std::string_view text) const {
  std::vector<SymbolId> body;
  for (std::string_view tok : SplitTokens(text)) {
    const SymbolId s = SymbolIndex(tok);
    if (s == bos_ || s == eos_) {
      throw MalformedSequenceError("BOS/EOS inside a sequence body");
    }
    body.push_back(s);
  }
  if (body.size() + 1 > static_cast<std::size_t>(max_length_)) {
    throw MalformedSequenceError("sequence body longer than max_length - 1");
  }
  return body;
}

LogProb SequenceLogProb(const ToyLM& lm, std::span<const SymbolId> sequence) {
  if (sequence.size() < 2 || sequence.front() != lm.bos() || sequence.back() != lm.eos()) {
    throw MalformedSequenceError("sequence must start with BOS and end with EOS");
  }
  auto body = sequence.subspan(1, sequence.size() - 2);
  if (body.size() + 1 > static_cast<std::size_t>(lm.max_length())) {
    throw MalformedSequenceError("sequence longer than max_length");
  }
  for (SymbolId s : body) {
    if (s < 0 || static_cast<std::size_t>(s) >= lm.vocab_size() || s == lm.bos() ||
        s == lm.eos()) {
      throw MalformedSequenceError("invalid symbol inside a sequence body");
    }
  }
  double lp = 0.0;
  for (std::size_t t = 0; t <= body.size(); ++t) {
    const std::vector<double> dist = lm.NextDistribution(body.first(t));
    const SymbolId next = t < body.size() ? body[t] : lm.eos();
    const double p = dist[static_cast<std::size_t>(next)];
    if (p <= 0.0) return LogProb::Zero();
    lp += std::log(p);
  }
  return LogProb(lp);
}

LogProb TextLogProb(const ToyLM& lm, std::string_view body_text) {
  std::vector<SymbolId> seq{lm.bos()};
  for (SymbolId s : lm.ParseBody(body_text)) seq.push_back(s);
  seq.push_back(lm.eos());
  return SequenceLogProb(lm, seq);
}

std::vector<EnumeratedSequence> Enumerate(const ToyLM& lm, std::size_t budget) {
  std::vector<EnumeratedSequence> out;
  std::vector<SymbolId> body;
  const auto eos = static_cast<std::size_t>(lm.eos());

  auto visit = [&](auto&& self, double lp) -> void {
    const std::vector<double> dist = lm.NextDistribution(body);
    if (dist[eos] > 0.0) {
      if (out.size() >= budget) {
        throw BudgetError("toy LM support exceeds the enumeration budget of " +
                          std::to_string(budget));
      }
      out.push_back({body, lm.Render(body), LogProb(lp + std::log(dist[eos]))});
    }
    for (std::size_t s = 0; s < dist.size(); ++s) {
      if (s == eos || dist[s] <= 0.0) continue;
      body.push_back(static_cast<SymbolId>(s));
      self(self, lp + std::log(dist[s]));
      body.pop_back();
    }
  };
  visit(visit, 0.0);
  return out;
}

std::string_view SamplingAlgorithmName(SamplingAlgorithm algorithm) {
  switch (algorithm) {
    case SamplingAlgorithm::kAncestral: return "ancestral";
    case SamplingAlgorithm::kTopK: return "top_k";
    case SamplingAlgorithm::kNucleus: return "nucleus";
    case SamplingAlgorithm::kEpsilon: return "epsilon";
  }
  return "unknown";
}

std::optional<SamplingAlgorithm> ParseSamplingAlgorithm(std::string_view name) {
  if (name == "ancestral") return SamplingAlgorithm::kAncestral;
  if (name == "top_k" || name == "top-k") return SamplingAlgorithm::kTopK;
  if (name == "nucleus") return SamplingAlgorithm::kNucleus;
  if (name == "epsilon") return SamplingAlgorithm::kEpsilon;
  return std::nullopt;
}

void SamplerConfig::Validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InputError("temperature must be positive");
  }
  switch (algorithm) {
    case SamplingAlgorithm::kAncestral: break;
    case SamplingAlgorithm::kTopK:
      if (k < 1) throw InputError("top-k requires k >= 1");
      break;
    case SamplingAlgorithm::kNucleus:
      if (!(p > 0.0 && p <= 1.0)) throw InputError("nucleus requires p in (0, 1]");
      break;
    case SamplingAlgorithm::kEpsilon:
      if (!(epsilon >= 0.0 && epsilon < 1.0)) throw InputError("epsilon must be in [0, 1)");
      break;
  }
}

std::vector<double> TruncateDistribution(std::span<const double> probs,
                                         const SamplerConfig& config) {
  config.Validate();
  std::vector<double> q(probs.begin(), probs.end());
  if (q.empty()) return q;

  auto renormalize = [&q] {
    const double sum = CompensatedSum(q);
    for (double& x : q) x /= sum;
  };

  if (config.temperature != 1.0) {
    const double inv_t = 1.0 / config.temperature;
    for (double& x : q) x = x > 0.0 ? std::pow(x, inv_t) : 0.0;
    renormalize();
  }

  // Positive entries ordered by (probability desc, index asc).
  auto ranked = [&q] {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i] > 0.0) idx.push_back(i);
    }
    std::stable_sort(idx.begin(), idx.end(),
                     [&q](std::size_t a, std::size_t b) { return q[a] > q[b]; });
    return idx;
  };

  bool removed = false;
  switch (config.algorithm) {
    case SamplingAlgorithm::kAncestral:
      break;
    case SamplingAlgorithm::kTopK: {
      const std::vector<std::size_t> order = ranked();
      for (std::size_t r = static_cast<std::size_t>(config.k); r < order.size(); ++r) {
        q[order[r]] = 0.0;
        removed = true;
      }
      break;
    }
    case SamplingAlgorithm::kNucleus: {
      if (config.p >= 1.0) break;
      const std::vector<std::size_t> order = ranked();
      // Tolerance absorbs rounding in the running sum, e.g. 0.5 + 0.3 vs 0.8.
      constexpr double kSlack = 1e-12;
      double cumulative = 0.0;
      std::size_t keep = order.size();
      for (std::size_t r = 0; r < order.size(); ++r) {
        cumulative += q[order[r]];
        if (cumulative >= config.p - kSlack) {
          keep = r + 1;
          break;
        }
      }
      for (std::size_t r = keep; r < order.size(); ++r) {
        q[order[r]] = 0.0;
        removed = true;
      }
      break;
    }
    case SamplingAlgorithm::kEpsilon: {
      const std::vector<std::size_t> order = ranked();
      for (std::size_t i : order) {
        if (q[i] < config.epsilon) {
          q[i] = 0.0;
          removed = true;
        }
      }
      if (removed && std::all_of(q.begin(), q.end(), [](double x) { return x == 0.0; })) {
        std::fill(q.begin(), q.end(), 0.0);
        q[order.front()] = 1.0;
        return q;
      }
      break;
    }
  }
  if (removed) renormalize();
  return q;
}

std::vector<Sample> SampleSequences(const ToyLM& lm, const SamplerConfig& config,
                                    std::size_t n) {
  config.Validate();
  std::mt19937_64 rng(config.seed);
  std::vector<Sample> out;
  out.reserve(n);
  std::vector<SymbolId> body;
  for (std::size_t i = 0; i < n; ++i) {
    body.clear();
    double lp = 0.0;
    bool zero = false;
    while (true) {
      const std::vector<double> dist = lm.NextDistribution(body);
      const std::vector<double> truncated = TruncateDistribution(dist, config);
      const std::size_t s = DrawIndex(truncated, UniformDouble(rng));
      if (dist[s] > 0.0) {
        lp += std::log(dist[s]);
      } else {
        zero = true;
      }
      if (static_cast<SymbolId>(s) == lm.eos()) break;
      body.push_back(static_cast<SymbolId>(s));
    }
    out.push_back({lm.Render(body), zero ? LogProb::Zero() : LogProb(lp), 1, SampleRole::kBoth});
  }
  return out;
}

ToyLM RandomToyLM(const RandomLMOptions& options, std::uint64_t seed) {
  if (options.symbols < 1) throw InputError("random toy LM needs at least one symbol");
  if (!(options.concentration > 0.0) || !(options.eos_concentration > 0.0)) {
    throw InputError("Dirichlet concentrations must be positive");
  }
  std::vector<std::string> vocab{"<s>", "</s>"};
  for (int i = 0; i < options.symbols; ++i) {
    std::string name;
    int x = i;
    do {
      name.insert(name.begin(), static_cast<char>('a' + x % 26));
      x = x / 26 - 1;
    } while (x >= 0);
    vocab.push_back(name);
  }
  const std::size_t v = vocab.size();
  std::mt19937_64 rng(seed);

  auto dirichlet_row = [&] {
    std::vector<double> row(v, 0.0);
    for (;;) {
      double sum = 0.0;
      for (std::size_t s = 1; s < v; ++s) {
        std::gamma_distribution<double> g(s == 1 ? options.eos_concentration
                                                 : options.concentration);
        row[s] = g(rng);
        sum += row[s];
      }
      if (sum > 0.0 && std::isfinite(sum)) {
        for (double& x : row) x /= sum;
        const double fixed = CompensatedSum(row);
        for (double& x : row) x /= fixed;
        return row;
      }
    }
  };

  // Every context over {BOS, symbols} of length `order`, in lexicographic order.
  std::map<ToyLM::Context, std::vector<double>> conditionals;
  std::vector<SymbolId> alphabet{0};
  for (std::size_t s = 2; s < v; ++s) alphabet.push_back(static_cast<SymbolId>(s));
  ToyLM::Context ctx(static_cast<std::size_t>(options.order), 0);
  std::vector<std::size_t> digits(ctx.size(), 0);
  for (;;) {
    for (std::size_t i = 0; i < ctx.size(); ++i) ctx[i] = alphabet[digits[i]];
    conditionals.emplace(ctx, dirichlet_row());
    std::size_t pos = digits.size();
    while (pos > 0 && ++digits[pos - 1] == alphabet.size()) digits[--pos] = 0;
    if (pos == 0) break;
  }
  return ToyLM(std::move(vocab), "<s>", "</s>", options.order, options.max_length,
               std::move(conditionals));
}

}  // namespace mbmbr

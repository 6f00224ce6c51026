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

#include "mbmbr/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include "mbmbr/decoder.hpp"
#include "mbmbr/divergence.hpp"
#include "mbmbr/estimators.hpp"
#include "parallel.hpp"

namespace mbmbr {
namespace {

constexpr double kDominanceSlack = 1e-12;

double UniformDouble(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string HexDouble(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

std::uint64_t Fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct Estimates {
  double kl_mc;
  double kl_mb;
  double jsd_mc;
  double jsd_mb;
};

Estimates CompareEstimates(const HypothesisPool& pool) {
  const std::vector<double> lps = pool.ReferenceLogProbs();
  const auto mc = RestrictedDistribution::WithTailFromPool(pool, EmpiricalWeights(pool));
  const auto mb = RestrictedDistribution::WithTailFromPool(pool, ModelBasedWeights(pool));
  return {KlRestricted(mc, lps), KlRestricted(mb, lps), JsdRestricted(mc, lps),
          JsdRestricted(mb, lps)};
}

double Mean(std::span<const double> v) { return MeanAndStddev(v).mean; }

std::vector<double> AverageRanks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

void ZipfConfig::Validate() const {
  if (!(exponent > 1.0)) throw InputError("Zipf exponent must be > 1");
  if (domain_size < 2) throw InputError("Zipf domain size must be >= 2");
  if (runs < 1) throw InputError("Zipf runs must be >= 1");
  if (samples_per_run < 1) throw InputError("Zipf samples_per_run must be >= 1");
}

std::vector<double> ZipfPmf(double exponent, int domain_size) {
  std::vector<double> pmf;
  pmf.reserve(static_cast<std::size_t>(domain_size));
  for (int r = 1; r <= domain_size; ++r) pmf.push_back(std::pow(static_cast<double>(r), -exponent));
  const double z = CompensatedSum(pmf);
  for (double& p : pmf) p /= z;
  return pmf;
}

ZipfResult RunZipf(const ZipfConfig& config) {
  config.Validate();
  const std::vector<double> pmf = ZipfPmf(config.exponent, config.domain_size);
  std::vector<double> cdf(pmf.size());
  std::partial_sum(pmf.begin(), pmf.end(), cdf.begin());
  cdf.back() = 1.0;

  ZipfResult result;
  const auto runs = static_cast<std::size_t>(config.runs);
  result.kl_mc.assign(runs, 0.0);
  result.kl_mb.assign(runs, 0.0);

  internal::ParallelFor(runs, config.threads, [&](std::size_t run) {
    std::mt19937_64 rng(DeriveSeed(config.seed, run));
    std::vector<Sample> samples;
    samples.reserve(config.samples_per_run);
    for (std::size_t i = 0; i < config.samples_per_run; ++i) {
      const double u = UniformDouble(rng);
      const auto rank = static_cast<std::size_t>(
          std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      const std::size_t r = std::min(rank, pmf.size() - 1);
      samples.push_back({std::to_string(r + 1), LogProb(std::log(pmf[r])), 1, SampleRole::kBoth});
    }
    const HypothesisPool pool = HypothesisPool::Build(samples);
    const std::vector<double> lps = pool.ReferenceLogProbs();
    result.kl_mc[run] = KlRestricted(EmpiricalWeights(pool).weights(), lps);
    result.kl_mb[run] = KlRestricted(ModelBasedWeights(pool).weights(), lps);
  });

  for (std::size_t r = 0; r < runs; ++r) {
    if (result.kl_mb[r] > result.kl_mc[r] + kDominanceSlack) ++result.violations;
  }
  const MeanStd mc = MeanAndStddev(result.kl_mc);
  const MeanStd mb = MeanAndStddev(result.kl_mb);
  result.mean_kl_mc = mc.mean;
  result.std_kl_mc = mc.stddev;
  result.mean_kl_mb = mb.mean;
  result.std_kl_mb = mb.stddev;
  return result;
}

ToyLM LMSource::ForInput(std::size_t input, std::uint64_t seed) const {
  if (fixed) return *fixed;
  return RandomToyLM(random, DeriveSeed(seed, 2 * input));
}

void SweepConfig::Validate() const {
  sampler.Validate();
  if (sizes.empty()) throw InputError("sweep needs at least one sample size");
  if (!std::is_sorted(sizes.begin(), sizes.end())) throw InputError("sweep sizes must be ascending");
  if (sizes.front() < 1) throw InputError("sweep sizes must be >= 1");
  if (inputs < 1) throw InputError("sweep needs at least one input");
}

std::string SweepConfig::Hash() const {
  std::ostringstream os;
  os << "sampler=" << SamplingAlgorithmName(sampler.algorithm) << ",k=" << sampler.k
     << ",p=" << HexDouble(sampler.p) << ",eps=" << HexDouble(sampler.epsilon)
     << ",t=" << HexDouble(sampler.temperature) << ";sizes=";
  for (std::size_t n : sizes) os << n << ',';
  os << ";inputs=" << inputs << ";seed=" << seed << ";";
  if (lm.fixed) {
    const ToyLM& m = *lm.fixed;
    os << "lm=fixed,order=" << m.order() << ",max=" << m.max_length() << ",vocab=";
    for (const auto& s : m.vocabulary()) os << s << ' ';
    os << "bos=" << m.bos() << ",eos=" << m.eos();
    for (const auto& [ctx, row] : m.conditionals()) {
      os << '[';
      for (SymbolId s : ctx) os << s << ' ';
      os << ']';
      for (double x : row) os << HexDouble(x) << ' ';
    }
  } else {
    os << "lm=random,symbols=" << lm.random.symbols << ",order=" << lm.random.order
       << ",max=" << lm.random.max_length << ",alpha=" << HexDouble(lm.random.concentration)
       << ",eos_alpha=" << HexDouble(lm.random.eos_concentration);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(Fnv1a(os.str())));
  return buf;
}

SweepReport RunDivergenceSweep(const SweepConfig& config) {
  config.Validate();
  const std::size_t sizes = config.sizes.size();
  // estimates[input][size]
  std::vector<std::vector<Estimates>> estimates(config.inputs, std::vector<Estimates>(sizes));

  internal::ParallelFor(config.inputs, config.threads, [&](std::size_t input) {
    const ToyLM lm = config.lm.ForInput(input, config.seed);
    // P must be exactly available; this also enforces the enumeration budget.
    Enumerate(lm, config.budget);
    const std::uint64_t input_seed = DeriveSeed(config.seed, 2 * input + 1);
    for (std::size_t s = 0; s < sizes; ++s) {
      SamplerConfig sampler = config.sampler;
      sampler.seed = DeriveSeed(input_seed, config.sizes[s]);
      const std::vector<Sample> samples = SampleSequences(lm, sampler, config.sizes[s]);
      estimates[input][s] = CompareEstimates(HypothesisPool::Build(samples));
    }
  });

  SweepReport report;
  report.seed = config.seed;
  report.config_hash = config.Hash();
  for (std::size_t s = 0; s < sizes; ++s) {
    std::vector<double> kl_mc, kl_mb, jsd_mc, jsd_mb;
    SweepRow row;
    row.n = config.sizes[s];
    for (std::size_t input = 0; input < config.inputs; ++input) {
      const Estimates& e = estimates[input][s];
      jsd_mc.push_back(e.jsd_mc);
      jsd_mb.push_back(e.jsd_mb);
      if (e.kl_mb > e.kl_mc + kDominanceSlack) ++row.dominance_violations;
      if (std::isinf(e.kl_mc) || std::isinf(e.kl_mb)) {
        ++row.excluded_infinite;
        continue;
      }
      kl_mc.push_back(e.kl_mc);
      kl_mb.push_back(e.kl_mb);
    }
    const MeanStd mc = MeanAndStddev(kl_mc);
    const MeanStd mb = MeanAndStddev(kl_mb);
    row.mean_kl_mc = mc.mean;
    row.std_kl_mc = mc.stddev;
    row.mean_kl_mb = mb.mean;
    row.std_kl_mb = mb.stddev;
    row.mean_jsd_mc = Mean(jsd_mc);
    row.mean_jsd_mb = Mean(jsd_mb);
    report.rows.push_back(row);
  }
  return report;
}

QualityReport RunQualityCorrelation(const SweepConfig& config, const Utility& utility) {
  config.Validate();
  const std::size_t sizes = config.sizes.size();
  struct Point {
    double kl_mc, kl_mb, regret_mc, regret_mb;
  };
  std::vector<std::vector<Point>> points(config.inputs, std::vector<Point>(sizes));

  internal::ParallelFor(config.inputs, config.threads, [&](std::size_t input) {
    const ToyLM lm = config.lm.ForInput(input, config.seed);
    const std::vector<EnumeratedSequence> support = Enumerate(lm, config.budget);
    const std::uint64_t input_seed = DeriveSeed(config.seed, 2 * input + 1);
    for (std::size_t s = 0; s < sizes; ++s) {
      SamplerConfig sampler = config.sampler;
      sampler.seed = DeriveSeed(input_seed, config.sizes[s]);
      const HypothesisPool pool = HypothesisPool::Build(SampleSequences(lm, sampler, config.sizes[s]));
      const std::vector<std::string> candidates = Texts(pool.candidates());
      const SelectionResult exact = ExactObjective(candidates, support, utility);
      const double best = exact.chosen_objective();

      const UtilityMatrix matrix = ComputeUtilityMatrix(pool, utility);
      const WeightVector w_mc = EmpiricalWeights(pool);
      const WeightVector w_mb = ModelBasedWeights(pool);
      const SelectionResult mc = Select(pool, matrix, w_mc, DecisionRule::kMbr);
      const SelectionResult mb = Select(pool, matrix, w_mb, DecisionRule::kMbmbr);
      const std::vector<double> lps = pool.ReferenceLogProbs();
      points[input][s] = {KlRestricted(w_mc.weights(), lps), KlRestricted(w_mb.weights(), lps),
                          best - exact.objective_values[mc.chosen_index],
                          best - exact.objective_values[mb.chosen_index]};
    }
  });

  QualityReport report;
  report.seed = config.seed;
  report.config_hash = config.Hash();
  std::vector<double> kl_mc, kl_mb, reg_mc, reg_mb;
  for (std::size_t s = 0; s < sizes; ++s) {
    QualityRow row;
    row.n = config.sizes[s];
    std::vector<double> a, b, c, d;
    for (std::size_t input = 0; input < config.inputs; ++input) {
      const Point& p = points[input][s];
      a.push_back(p.kl_mc);
      b.push_back(p.kl_mb);
      c.push_back(p.regret_mc);
      d.push_back(p.regret_mb);
    }
    row.mean_kl_mc = Mean(a);
    row.mean_kl_mb = Mean(b);
    row.mean_regret_mc = Mean(c);
    row.mean_regret_mb = Mean(d);
    kl_mc.push_back(row.mean_kl_mc);
    kl_mb.push_back(row.mean_kl_mb);
    reg_mc.push_back(row.mean_regret_mc);
    reg_mb.push_back(row.mean_regret_mb);
    report.rows.push_back(row);
  }
  report.spearman_mc = SpearmanCorrelation(kl_mc, reg_mc);
  report.spearman_mb = SpearmanCorrelation(kl_mb, reg_mb);
  std::vector<double> kl_all = kl_mc, reg_all = reg_mc;
  kl_all.insert(kl_all.end(), kl_mb.begin(), kl_mb.end());
  reg_all.insert(reg_all.end(), reg_mb.begin(), reg_mb.end());
  report.spearman_pooled = SpearmanCorrelation(kl_all, reg_all);
  return report;
}

double SpearmanCorrelation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("Spearman inputs differ in length");
  if (x.size() < 2) return 0.0;
  const std::vector<double> rx = AverageRanks(x);
  const std::vector<double> ry = AverageRanks(y);
  const double mx = Mean(rx);
  const double my = Mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace mbmbr

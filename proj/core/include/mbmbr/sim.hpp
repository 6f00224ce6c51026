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

// Desk-scale experiments: the finite Zipf estimator study, divergence vs.
// sample count sweeps on toy LMs, and the KL vs. decision-regret correlation.

#ifndef MBMBR_SIM_HPP_
#define MBMBR_SIM_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mbmbr/core.hpp"
#include "mbmbr/toylm.hpp"
#include "mbmbr/utility.hpp"

namespace mbmbr {

// Ranks r = 1..domain_size with P(r) = r^-a / sum_r' r'^-a.
struct ZipfConfig {
  double exponent = 2.0;
  int domain_size = 500;
  std::size_t samples_per_run = 100;
  int runs = 100;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  void Validate() const;
};

std::vector<double> ZipfPmf(double exponent, int domain_size);

struct ZipfResult {
  double mean_kl_mc = 0.0;
  double std_kl_mc = 0.0;
  double mean_kl_mb = 0.0;
  double std_kl_mb = 0.0;
  std::vector<double> kl_mc;  // per run
  std::vector<double> kl_mb;  // per run
  // Runs where KL(P_MB || P) > KL(P_hat || P) + 1e-12.
  int violations = 0;
};

ZipfResult RunZipf(const ZipfConfig& config);

// Where each sweep input's model comes from: one fixed LM, or a fresh random
// LM per input seeded from the sweep seed.
struct LMSource {
  std::optional<ToyLM> fixed;
  RandomLMOptions random;

  ToyLM ForInput(std::size_t input, std::uint64_t seed) const;
};

struct SweepConfig {
  LMSource lm;
  SamplerConfig sampler;
  std::vector<std::size_t> sizes{4, 8, 16, 32, 64};
  std::size_t inputs = 200;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t budget = 1'000'000;

  void Validate() const;
  // FNV-1a over a canonical rendering of every field that affects results.
  std::string Hash() const;
};

struct SweepRow {
  std::size_t n = 0;
  double mean_kl_mc = 0.0;
  double std_kl_mc = 0.0;
  double mean_kl_mb = 0.0;
  double std_kl_mb = 0.0;
  double mean_jsd_mc = 0.0;
  double mean_jsd_mb = 0.0;
  // Inputs left out of the KL means because a divergence was infinite.
  std::size_t excluded_infinite = 0;
  std::size_t dominance_violations = 0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::uint64_t seed = 0;
  std::string config_hash;
};

// Per input and size n: draw n samples, build the shared pool, and compare
// the empirical and model-based estimates with P exactly.
SweepReport RunDivergenceSweep(const SweepConfig& config);

struct QualityRow {
  std::size_t n = 0;
  double mean_kl_mc = 0.0;
  double mean_kl_mb = 0.0;
  // exact(h_model) - exact(h_selected), h_model being the exact-objective
  // argmax over the same candidates.
  double mean_regret_mc = 0.0;
  double mean_regret_mb = 0.0;
};

struct QualityReport {
  std::vector<QualityRow> rows;
  double spearman_mc = 0.0;
  double spearman_mb = 0.0;
  // Both estimators' (kl, regret) points pooled.
  double spearman_pooled = 0.0;
  std::uint64_t seed = 0;
  std::string config_hash;
};

QualityReport RunQualityCorrelation(const SweepConfig& config, const Utility& utility);

// Spearman rank correlation with average ranks for ties; 0 when either side
// is constant.
double SpearmanCorrelation(std::span<const double> x, std::span<const double> y);

}  // namespace mbmbr

#endif  // MBMBR_SIM_HPP_

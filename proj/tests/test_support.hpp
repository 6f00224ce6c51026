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

// Fixtures and independent oracles shared by the test binaries. Nothing here
// calls into the code paths it is used to check.

#ifndef MBMBR_TESTS_TEST_SUPPORT_HPP_
#define MBMBR_TESTS_TEST_SUPPORT_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mbmbr/core.hpp"

namespace mbmbr::testing {

inline const std::vector<std::string>& TruthTexts() {
  static const std::vector<std::string> texts{
      "But telling the truth is not a crime.",
      "However, telling the truth is not a crime.",
      "But to tell the truth is not a crime.",
  };
  return texts;
}

// H_ref = (y0, y0, y1, y1, y2) with P = (0.3, 0.1, 0.1).
inline std::vector<Sample> TruthSamples() {
  const auto& t = TruthTexts();
  const LogProb p0(std::log(0.3));
  const LogProb p1(std::log(0.1));
  return {{t[0], p0}, {t[1], p1}, {t[0], p0}, {t[2], p1}, {t[1], p1}};
}

inline HypothesisPool TruthPool() { return HypothesisPool::Build(TruthSamples()); }

// A pool over `support` distinct texts with random counts and random
// logprobs such that sum_R P <= 1.
inline HypothesisPool RandomPool(std::mt19937_64& rng, std::size_t support) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 6);
  std::vector<double> raw(support + 1);
  double sum = 0.0;
  for (double& x : raw) {
    x = -std::log(1.0 - unit(rng));  // exponential -> flat Dirichlet
    sum += x;
  }
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < support; ++i) {
    samples.push_back({"t" + std::to_string(i), LogProb(std::log(raw[i] / sum)), count(rng)});
  }
  return HypothesisPool::Build(samples);
}

inline std::vector<double> RandomSimplex(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(n);
  double sum = 0.0;
  for (double& v : x) {
    v = -std::log(1.0 - unit(rng));
    sum += v;
  }
  for (double& v : x) v /= sum;
  return x;
}

// KL(p || q) over a fully enumerated domain, straight from the definition.
inline double DirectKl(const std::vector<double>& p, const std::vector<double>& q) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

// JSD over a fully enumerated domain, straight from the definition.
inline double DirectJsd(const std::vector<double>& p, const std::vector<double>& q) {
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
  return 0.5 * (DirectKl(p, m) + DirectKl(q, m));
}

}  // namespace mbmbr::testing

#endif  // MBMBR_TESTS_TEST_SUPPORT_HPP_

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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mbmbr/divergence.hpp"
#include "mbmbr/estimators.hpp"
#include "test_support.hpp"

namespace mbmbr {
namespace {

TEST(KlRestrictedTest, TruthExample) {
  const HypothesisPool pool = testing::TruthPool();
  const auto lps = pool.ReferenceLogProbs();
  const double kl_mc = KlRestricted(RestrictedDistribution(EmpiricalWeights(pool), 0.5), lps);
  const double kl_mb = KlRestricted(RestrictedDistribution(ModelBasedWeights(pool), 0.5), lps);
  EXPECT_NEAR(kl_mc, 0.808, 1e-3);
  EXPECT_NEAR(kl_mb, 0.693, 1e-3);
  EXPECT_NEAR(kl_mc, 0.8082200095406578, 1e-14);
  EXPECT_NEAR(kl_mb, std::numbers::ln2, 1e-14);
}

TEST(KlRestrictedTest, EqualToModelIsZero) {
  const std::vector<double> p{0.5, 0.25, 0.25};
  const std::vector<double> lps{std::log(0.5), std::log(0.25), std::log(0.25)};
  EXPECT_NEAR(KlRestricted(p, lps), 0.0, 1e-16);
}

TEST(KlRestrictedTest, MassOnZeroProbabilityIsInfinite) {
  const std::vector<double> p{0.5, 0.5};
  const std::vector<double> lps{std::log(0.5), -INFINITY};
  EXPECT_EQ(KlRestricted(p, lps), kInfiniteDivergence);
  // Zero mass on a zero-probability outcome is fine (0 log 0 = 0).
  const std::vector<double> q{1.0, 0.0};
  EXPECT_NEAR(KlRestricted(q, lps), std::log(2.0), 1e-15);
}

TEST(KlClosedFormTest, TruthExampleAndFullCoverage) {
  EXPECT_NEAR(KlModelBasedClosedForm(testing::TruthPool()), std::numbers::ln2, 1e-15);
  const std::vector<double> full{std::log(0.25), std::log(0.75)};
  EXPECT_NEAR(KlModelBasedClosedForm(full), 0.0, 1e-15);
  const std::vector<double> dead{-INFINITY};
  EXPECT_THROW(KlModelBasedClosedForm(dead), DegenerateWeightsError);
}

// Closed form vs the generic KL of the model-based weights, plus optimality
// over random alternatives and the empirical estimate.
TEST(KlClosedFormTest, InformationProjectionOnRandomPools) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const HypothesisPool pool = testing::RandomPool(rng, 1 + rng() % 25);
    const auto lps = pool.ReferenceLogProbs();
    const double closed = KlModelBasedClosedForm(pool);
    EXPECT_NEAR(KlRestricted(ModelBasedWeights(pool).weights(), lps), closed, 1e-12);
    EXPECT_LE(closed, KlRestricted(EmpiricalWeights(pool).weights(), lps) + 1e-12);
    for (int q = 0; q < 20; ++q) {
      const auto alt = testing::RandomSimplex(rng, lps.size());
      EXPECT_GE(KlRestricted(alt, lps), closed - 1e-12);
    }
  }
}

TEST(JsdRestrictedTest, IdentityAndDisjoint) {
  const std::vector<double> lps{std::log(0.5), std::log(0.5)};
  const RestrictedDistribution same(WeightVector({0.5, 0.5}, WeightKind::kExact), 0.0);
  EXPECT_NEAR(JsdRestricted(same, lps), 0.0, 1e-16);

  const std::vector<double> none{-INFINITY, -INFINITY};
  const RestrictedDistribution disjoint(WeightVector({0.3, 0.7}, WeightKind::kEmpirical), 1.0);
  EXPECT_NEAR(JsdRestricted(disjoint, none), std::numbers::ln2, 1e-15);
}

// Restricted formula vs JSD over the fully enumerated domain.
TEST(JsdRestrictedTest, MatchesEnumeratedDomain) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t domain = 2 + rng() % 60;
    const std::vector<double> truth = testing::RandomSimplex(rng, domain);
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < domain; ++i) {
      if (rng() % 3 == 0) support.push_back(i);
    }
    if (support.empty()) support.push_back(0);
    const std::vector<double> p_r = testing::RandomSimplex(rng, support.size());
    std::vector<double> p_full(domain, 0.0);
    std::vector<double> lps;
    double covered = 0.0;
    for (std::size_t k = 0; k < support.size(); ++k) {
      p_full[support[k]] = p_r[k];
      lps.push_back(std::log(truth[support[k]]));
      covered += truth[support[k]];
    }
    const RestrictedDistribution p(WeightVector(p_r, WeightKind::kEmpirical), 1.0 - covered);
    const double jsd = JsdRestricted(p, lps);
    EXPECT_NEAR(jsd, testing::DirectJsd(p_full, truth), 1e-12);
    EXPECT_NEAR(jsd, testing::DirectJsd(truth, p_full), 1e-12);
    EXPECT_GE(jsd, 0.0);
    EXPECT_LE(jsd, std::numbers::ln2);
  }
}

TEST(RestrictedDistributionTest, TailFromPool) {
  const HypothesisPool pool = testing::TruthPool();
  const auto d = RestrictedDistribution::WithTailFromPool(pool, EmpiricalWeights(pool));
  EXPECT_NEAR(d.tail_mass(), 0.5, 1e-15);
  EXPECT_THROW(RestrictedDistribution(EmpiricalWeights(pool), 1.5), InputError);
}

TEST(PinskerTest, EqualDistributionsGiveZero) {
  const UtilityMatrix m(2, 2, {1.0, 0.3, 0.3, 1.0});
  const std::vector<double> p{0.4, 0.6};
  const PinskerBound b = PinskerObjectiveBound(m, p, p);
  EXPECT_EQ(b.lhs, 0.0);
  EXPECT_EQ(b.rhs, 0.0);
  EXPECT_TRUE(b.Holds());
}

// The worked example texts plus one explicit stand-in for the unsampled mass (P = 0.5),
// with lhs and rhs frozen from a hand-written oracle.
TEST(PinskerTest, TruthExampleWithUnigramF1) {
  std::vector<std::string> domain = testing::TruthTexts();
  domain.push_back("Telling lies is a crime.");
  const std::vector<double> truth{0.3, 0.1, 0.1, 0.5};
  const UtilityMatrix m =
      ComputeUtilityMatrix(testing::TruthTexts(), domain, Utility(UtilityKind::kUnigramF1));

  const PinskerBound mc = PinskerObjectiveBound(m, std::vector<double>{0.4, 0.4, 0.2, 0.0}, truth);
  EXPECT_NEAR(mc.lhs, 0.22731900452488685, 1e-15);
  EXPECT_NEAR(mc.rhs, 1.0 * std::sqrt(2.0 * 0.8082200095406578), 1e-14);
  EXPECT_NEAR(mc.rhs, std::sqrt(2.0 * 0.808), 1e-3);
  EXPECT_TRUE(mc.Holds());

  const PinskerBound mb = PinskerObjectiveBound(m, std::vector<double>{0.6, 0.2, 0.2, 0.0}, truth);
  EXPECT_NEAR(mb.lhs, 0.23908371040723986, 1e-15);
  EXPECT_NEAR(mb.rhs, 1.1774100225154747, 1e-14);
  EXPECT_TRUE(mb.Holds());
}

TEST(PinskerTest, RandomInstancesAndInfiniteKl) {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng() % 30;
    const std::size_t rows = 1 + rng() % 5;
    std::vector<double> values(rows * n);
    for (double& v : values) v = unit(rng);
    const UtilityMatrix m(rows, n, values);
    const auto truth = testing::RandomSimplex(rng, n);
    const auto est = testing::RandomSimplex(rng, n);
    EXPECT_TRUE(PinskerObjectiveBound(m, est, truth).Holds(1e-12));
  }
  const UtilityMatrix m(1, 2, {1.0, 0.0});
  const PinskerBound inf = PinskerObjectiveBound(m, std::vector<double>{0.5, 0.5},
                                                 std::vector<double>{1.0, 0.0});
  EXPECT_TRUE(std::isinf(inf.rhs));
  EXPECT_TRUE(inf.Holds());
}

}  // namespace
}  // namespace mbmbr

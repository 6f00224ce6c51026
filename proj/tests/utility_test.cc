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
#include <random>

#include "mbmbr/utility.hpp"
#include "test_support.hpp"

namespace mbmbr {
namespace {

TEST(SentenceBleuTest, IdentityIsOne) {
  EXPECT_DOUBLE_EQ(SentenceBleu("the cat sat on the mat", "the cat sat on the mat"), 1.0);
  EXPECT_DOUBLE_EQ(SentenceBleu("a", "a"), 1.0);
}

TEST(SentenceBleuTest, EmptyHypothesisIsZero) {
  EXPECT_EQ(SentenceBleu("", "a b"), 0.0);
  EXPECT_EQ(SentenceBleu("", ""), 0.0);
}

TEST(SentenceBleuTest, NoOverlapIsPureSmoothing) {
  // |h| = 3, BP = 1: (1/4 * 1/3 * 1/2 * 1/1)^(1/4).
  EXPECT_NEAR(SentenceBleu("a b c", "x y z"), 0.4518010018049224, 1e-15);
}

TEST(SentenceBleuTest, BrevityPenalty) {
  // All precisions are (c+1)/(c+1) = 1; BP = e^(1 - 5/4).
  EXPECT_NEAR(SentenceBleu("a b c d", "a b c d e"), 0.7788007830714049, 1e-15);
}

TEST(ChrfTest, IdentityAndDisjoint) {
  EXPECT_DOUBLE_EQ(Chrf("hello world", "hello world"), 1.0);
  EXPECT_DOUBLE_EQ(Chrf("abc", "xyz"), 0.0);
  EXPECT_EQ(Chrf("", ""), 0.0);
}

TEST(ChrfTest, UnigramExample) {
  EXPECT_NEAR(Chrf("abc", "abd", 1), 2.0 / 3.0, 1e-15);
}

TEST(ChrfTest, WhitespaceIgnored) {
  EXPECT_DOUBLE_EQ(Chrf("a b c", "abc"), 1.0);
}

TEST(UnigramF1Test, Examples) {
  EXPECT_DOUBLE_EQ(UnigramF1("a b c", "a b c"), 1.0);
  EXPECT_EQ(UnigramF1("a b", "c d"), 0.0);
  EXPECT_NEAR(UnigramF1("a a b", "a b b"), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(UnigramF1("", "a"), 0.0);
}

TEST(UtilityKindTest, ParseNames) {
  EXPECT_EQ(ParseUtilityKind("bleu"), UtilityKind::kBleu);
  EXPECT_EQ(ParseUtilityKind("chrf"), UtilityKind::kChrf);
  EXPECT_EQ(ParseUtilityKind("f1"), UtilityKind::kUnigramF1);
  EXPECT_FALSE(ParseUtilityKind("comet").has_value());
}

std::string RandomSentence(std::mt19937_64& rng) {
  static const char* words[] = {"a", "b", "c", "dd", "ee", "the", "cat"};
  std::string s;
  const int n = static_cast<int>(rng() % 7);
  for (int i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += words[rng() % 7];
  }
  return s;
}

TEST(UtilityPropertiesTest, BoundedAndIdentityOne) {
  std::mt19937_64 rng(3);
  for (UtilityKind kind : {UtilityKind::kBleu, UtilityKind::kChrf, UtilityKind::kUnigramF1}) {
    const Utility u(kind);
    for (int t = 0; t < 2000; ++t) {
      const std::string h = RandomSentence(rng);
      const std::string y = RandomSentence(rng);
      const double v = u(h, y);
      EXPECT_GE(v, 0.0) << u.name();
      EXPECT_LE(v, 1.0 + 1e-15) << u.name();
      if (!h.empty()) EXPECT_NEAR(u(h, h), 1.0, 1e-15) << u.name() << " '" << h << "'";
    }
  }
}

TEST(UtilityMatrixTest, TruthExampleUnderUnigramF1) {
  const HypothesisPool pool = testing::TruthPool();
  const UtilityMatrix m = ComputeUtilityMatrix(pool, Utility(UtilityKind::kUnigramF1));
  ASSERT_EQ(m.rows(), 3u);
  ASSERT_EQ(m.cols(), 3u);
  const double expected[3][3] = {{1.0, 0.875, 0.8235294117647058},
                                 {0.875, 1.0, 0.7058823529411765},
                                 {0.8235294117647058, 0.7058823529411765, 1.0}};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_NEAR(m(i, j), expected[i][j], 1e-15);
      // Element-wise oracle: the scalar call, bit for bit.
      EXPECT_EQ(m(i, j), UnigramF1(pool.candidates()[i].text, pool.references()[j].text));
    }
  }
  EXPECT_EQ(m.u_max(), 1.0);
}

TEST(UtilityMatrixTest, SharedPoolDiagonalAndSymmetry) {
  std::mt19937_64 rng(5);
  std::vector<Sample> samples;
  for (int i = 0; i < 25; ++i) samples.push_back({RandomSentence(rng) + " z", LogProb(-1.0)});
  const HypothesisPool pool = HypothesisPool::Build(samples);
  for (UtilityKind kind : {UtilityKind::kChrf, UtilityKind::kUnigramF1}) {
    const UtilityMatrix m = ComputeUtilityMatrix(pool, Utility(kind));
    for (std::size_t i = 0; i < m.rows(); ++i) {
      EXPECT_DOUBLE_EQ(m(i, i), 1.0);
      if (kind != UtilityKind::kUnigramF1) continue;  // chrF weights recall over precision
      for (std::size_t j = 0; j < m.cols(); ++j) EXPECT_DOUBLE_EQ(m(i, j), m(j, i));
    }
  }
}

TEST(UtilityMatrixTest, ParallelMatchesSerial) {
  std::mt19937_64 rng(9);
  std::vector<Sample> samples;
  for (int i = 0; i < 40; ++i) samples.push_back({RandomSentence(rng) + " q", LogProb(-1.0)});
  const HypothesisPool pool = HypothesisPool::Build(samples);
  const Utility u(UtilityKind::kBleu);
  const UtilityMatrix serial = ComputeUtilityMatrix(pool, u, 1);
  for (unsigned threads : {2u, 3u, 8u}) {
    EXPECT_EQ(ComputeUtilityMatrix(pool, u, threads), serial);
  }
}

TEST(UtilityMatrixTest, ShapeChecked) {
  EXPECT_THROW(UtilityMatrix(2, 2, {1.0, 2.0, 3.0}), ShapeError);
  EXPECT_THROW(UtilityMatrix(1, 1, {NAN}), InputError);
}

}  // namespace
}  // namespace mbmbr

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
#include <sstream>

#include "mbmbr/decoder.hpp"
#include "mbmbr/estimators.hpp"
#include "mbmbr/io.hpp"
#include "test_support.hpp"

namespace mbmbr {
namespace {

constexpr const char* kHeader = R"({"format":"mbmbr.samples","format_version":1})";

PoolSet Read(const std::string& body, const ReadOptions& options = {}) {
  std::istringstream in(std::string(kHeader) + "\n" + body);
  return ReadSamples(in, options);
}

TEST(ReadSamplesTest, GroupsByIdInFirstSeenOrder) {
  const PoolSet set = Read(
      R"({"id":"s2","text":"x y","logprob":-1.0}
{"id":"s1","text":"a","logprob":-0.5}
{"id":"s2","text":"x","logprob":-2.0}
{"id":"s1","text":"a","logprob":-0.5}
{"id":"s2","text":"x y","logprob":-1.0,"count":2}
)");
  ASSERT_EQ(set.pools.size(), 2u);
  EXPECT_EQ(set.pools[0].source_id(), "s2");
  EXPECT_EQ(set.pools[0].candidates().size(), 2u);
  EXPECT_EQ(set.pools[0].candidates()[0].count, 3);
  EXPECT_EQ(set.pools[0].total_samples(), 4);
  ASSERT_NE(set.Find("s1"), nullptr);
  EXPECT_EQ(set.Find("s1")->candidates()[0].count, 2);
  EXPECT_EQ(set.Find("nope"), nullptr);
}

TEST(ReadSamplesTest, TruthExampleRoundTrip) {
  HypothesisPool pool = HypothesisPool::Build(testing::TruthSamples(), {.source_id = "t2"});
  std::ostringstream out;
  WriteSamples(out, std::span<const HypothesisPool>(&pool, 1));
  std::istringstream in(out.str());
  const PoolSet set = ReadSamples(in);
  ASSERT_EQ(set.pools.size(), 1u);
  EXPECT_EQ(set.pools[0], pool);
  const auto w = EmpiricalWeights(set.pools[0]).weights();
  EXPECT_NEAR(w[0], 0.4, 1e-15);
  EXPECT_NEAR(w[1], 0.4, 1e-15);
  EXPECT_NEAR(w[2], 0.2, 1e-15);
}

TEST(ReadSamplesTest, SplitRolesRoundTrip) {
  const std::vector<Sample> samples{{"c", LogProb(-1.0), 1, SampleRole::kCandidate},
                                    {"r", LogProb(-2.0), 2, SampleRole::kReference},
                                    {"b", LogProb(-0.5), 1, SampleRole::kBoth}};
  HypothesisPool pool = HypothesisPool::Build(samples, {.mode = PoolMode::kSplit, .source_id = "q"});
  std::ostringstream out;
  WriteSamples(out, std::span<const HypothesisPool>(&pool, 1));
  std::istringstream in(out.str());
  const PoolSet set = ReadSamples(in, {.mode = PoolMode::kSplit});
  ASSERT_EQ(set.pools.size(), 1u);
  EXPECT_EQ(set.pools[0], pool);
}

TEST(ReadSamplesTest, EmptyStreamWarns) {
  std::istringstream empty("");
  const PoolSet a = ReadSamples(empty);
  EXPECT_TRUE(a.pools.empty());
  ASSERT_EQ(a.warnings.size(), 1u);
  const PoolSet b = Read("");
  EXPECT_TRUE(b.pools.empty());
  EXPECT_FALSE(b.warnings.empty());
}

TEST(ReadSamplesTest, ParseErrorsNameTheLine) {
  const auto line_of = [](const std::string& body) -> std::size_t {
    try {
      Read(body);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("{\"id\":\"a\",\"text\":\"x\",\"logprob\":-1}\nnot json\n"), 3u);
  EXPECT_EQ(line_of("{\"id\":\"a\",\"logprob\":-1}\n"), 2u);
  EXPECT_EQ(line_of("{\"id\":\"a\",\"text\":\"x\"}\n"), 2u);
  EXPECT_EQ(line_of("{\"id\":\"a\",\"text\":\"x\",\"logprob\":\"low\"}\n"), 2u);
  EXPECT_EQ(line_of("{\"id\":\"a\",\"text\":\"x\",\"logprob\":-1,\"count\":0}\n"), 2u);
  EXPECT_EQ(line_of("{\"id\":\"a\",\"text\":\"x\",\"logprob\":-1,\"role\":\"hyp\"}\n"), 2u);
  EXPECT_EQ(line_of("{\"id\":\"a\",\"text\":\"x\",\"logprob\":0.5}\n"), 2u);

  std::istringstream bad_header("{\"format\":\"other\",\"format_version\":1}\n");
  EXPECT_THROW(ReadSamples(bad_header), ParseError);
  std::istringstream bad_version("{\"format\":\"mbmbr.samples\",\"format_version\":9}\n");
  EXPECT_THROW(ReadSamples(bad_version), ParseError);
  try {
    Read("[]\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(ReadSamplesTest, LogBaseAndUnnormalized) {
  const std::string body = "{\"id\":\"a\",\"text\":\"x\",\"logprob\":-1}\n";
  EXPECT_NEAR(Read(body, {.log_base = 2.0}).pools[0].candidates()[0].logprob.value(), -std::log(2.0),
              1e-15);
  EXPECT_NEAR(Read(body, {.log_base = 10.0}).pools[0].candidates()[0].logprob.value(), -std::log(10.0),
              1e-15);
  const std::string pos = "{\"id\":\"a\",\"text\":\"x\",\"logprob\":3.5}\n";
  EXPECT_THROW(Read(pos), ParseError);
  EXPECT_EQ(Read(pos, {.unnormalized = true}).pools[0].candidates()[0].logprob.value(), 3.5);
  const std::string zero =
      "{\"id\":\"a\",\"text\":\"x\",\"logprob\":null}\n"
      "{\"id\":\"a\",\"text\":\"y\",\"logprob\":\"-inf\"}\n";
  const PoolSet z = Read(zero);
  EXPECT_TRUE(std::isinf(z.pools[0].candidates()[0].logprob.value()));
  EXPECT_TRUE(std::isinf(z.pools[0].candidates()[1].logprob.value()));
}

TEST(UtilityMatrixIoTest, RoundTripIsBitExact) {
  const UtilityMatrix m(2, 3, {0.1, 1.0 / 3.0, 2.0 / 7.0, 1e-300, 0.9999999999999999, 0.0});
  const std::vector<ExternalMatrix> in_mats{{"s", {"a", "b"}, {"a", "b", "c"}, m}};
  std::ostringstream out;
  WriteUtilityMatrices(out, in_mats);
  std::istringstream in(out.str());
  const auto back = ReadUtilityMatrices(in);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].matrix, m);
  EXPECT_EQ(back[0].candidates, in_mats[0].candidates);
  EXPECT_EQ(back[0].references, in_mats[0].references);
}

TEST(UtilityMatrixIoTest, AlignmentChecks) {
  const HypothesisPool pool = testing::TruthPool();
  const auto& t = testing::TruthTexts();
  const ExternalMatrix ok{"", {t[0], t[1], t[2]}, {t[0], t[1], t[2]},
                          UtilityMatrix(3, 3, std::vector<double>(9, 0.5))};
  EXPECT_EQ(&AlignUtilityMatrix(ok, pool), &ok.matrix);

  const ExternalMatrix short_refs{"", {t[0], t[1], t[2]}, {t[0], t[1]},
                                  UtilityMatrix(3, 2, std::vector<double>(6, 0.5))};
  EXPECT_THROW(AlignUtilityMatrix(short_refs, pool), AlignmentError);

  const ExternalMatrix swapped{"", {t[1], t[0], t[2]}, {t[0], t[1], t[2]},
                               UtilityMatrix(3, 3, std::vector<double>(9, 0.5))};
  try {
    AlignUtilityMatrix(swapped, pool);
    FAIL();
  } catch (const AlignmentError& e) {
    EXPECT_NE(std::string(e.what()).find("candidate"), std::string::npos);
  }

  std::istringstream bad_shape(
      "{\"format\":\"mbmbr.utility_matrix\",\"format_version\":1}\n"
      "{\"id\":\"s\",\"candidates\":[\"a\"],\"references\":[\"a\",\"b\"],\"values\":[1]}\n");
  EXPECT_THROW(ReadUtilityMatrices(bad_shape), ParseError);
}

TEST(SelectionReportTest, CsvRowsAndRoundTrip) {
  std::vector<SelectionRow> rows;
  const auto& t = testing::TruthTexts();
  for (const std::string id : {"p1", "p2"}) {
    const HypothesisPool pool = HypothesisPool::Build(testing::TruthSamples(), {.source_id = id});
    const UtilityMatrix m = ComputeUtilityMatrix(pool, Utility(UtilityKind::kUnigramF1));
    rows.push_back(MakeSelectionRow(id, Select(pool, m, EmpiricalWeights(pool), DecisionRule::kMbr),
                                    RelativeLength(Select(pool, m, EmpiricalWeights(pool),
                                                          DecisionRule::kMbr),
                                                   t[2], LengthUnit::kTokens)));
    rows.push_back(
        MakeSelectionRow(id, Select(pool, m, ModelBasedWeights(pool), DecisionRule::kMbmbr)));
    rows.push_back(MakeSelectionRow(
        id, Select(pool, m, LengthNormalizedWeights(pool), DecisionRule::kMbmbrL)));
  }
  std::ostringstream out;
  WriteSelectionReport(out, rows, ReportFormat::kCsv);
  std::istringstream in(out.str());
  const auto parsed = ParseCsv(in);
  ASSERT_EQ(parsed.size(), 7u);
  EXPECT_EQ(parsed[0][0], "format_version");
  EXPECT_EQ(parsed[0][7], "relative_length");

  std::istringstream again(out.str());
  const auto back = ReadSelectionReportCsv(again);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].id, rows[i].id);
    EXPECT_EQ(back[i].rule, rows[i].rule);
    EXPECT_EQ(back[i].chosen_index, rows[i].chosen_index);
    EXPECT_EQ(back[i].chosen_text, rows[i].chosen_text);
    EXPECT_NEAR(back[i].objective, rows[i].objective, 1e-9);
    EXPECT_EQ(back[i].relative_length.has_value(), rows[i].relative_length.has_value());
  }
  EXPECT_EQ(back[0].chosen_text, t[0]);
  EXPECT_EQ(back[1].chosen_text, t[0]);
}

TEST(SelectionReportTest, RecordsFormat) {
  SelectionResult r;
  r.chosen_text = "a \"quoted\", text";
  r.objective_values = {0.25};
  std::vector<SelectionRow> rows{MakeSelectionRow("x", r)};
  std::ostringstream out;
  WriteSelectionReport(out, rows, ReportFormat::kRecords);
  EXPECT_NE(out.str().find("mbmbr.selection"), std::string::npos);
  EXPECT_NE(out.str().find("\"relative_length\":null"), std::string::npos);

  std::ostringstream csv;
  WriteSelectionReport(csv, rows, ReportFormat::kCsv);
  std::istringstream in(csv.str());
  EXPECT_EQ(ReadSelectionReportCsv(in)[0].chosen_text, r.chosen_text);
}

TEST(ToyLMIoTest, RoundTrip) {
  const ToyLM lm = RandomToyLM({.symbols = 3, .order = 2, .max_length = 4}, 9);
  std::ostringstream out;
  WriteToyLM(out, lm);
  std::istringstream in(out.str());
  const ToyLM back = ReadToyLM(in);
  EXPECT_EQ(back.vocabulary(), lm.vocabulary());
  EXPECT_EQ(back.order(), lm.order());
  EXPECT_EQ(back.max_length(), lm.max_length());
  EXPECT_EQ(back.conditionals(), lm.conditionals());
}

TEST(ToyLMIoTest, RejectsBadConfig) {
  std::istringstream missing(R"({"format":"mbmbr.toylm","format_version":1,"vocabulary":["<s>","</s>","a"]})");
  EXPECT_THROW(ReadToyLM(missing), ParseError);
  std::istringstream bad_sum(R"({"format":"mbmbr.toylm","format_version":1,
    "vocabulary":["<s>","</s>","a"],"order":1,"max_length":3,
    "conditionals":[{"context":["<s>"],"probs":{"a":0.5,"</s>":0.4}},
                    {"context":["a"],"probs":{"a":0.5,"</s>":0.5}}]})");
  EXPECT_THROW(ReadToyLM(bad_sum), InputError);
}

TEST(CsvTest, EscapeAndParse) {
  EXPECT_EQ(CsvEscape("plain"), "plain");
  EXPECT_EQ(CsvEscape("a,b"), "\"a,b\"");
  EXPECT_EQ(CsvEscape("say \"hi\""), "\"say \"\"hi\"\"\"");
  std::istringstream in("x,\"a,b\",\"line\nbreak\"\n1,2,3\n");
  const auto rows = ParseCsv(in);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0][1], "a,b");
  EXPECT_EQ(rows[0][2], "line\nbreak");
}

TEST(CsvTest, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5, 0.0}) {
    EXPECT_EQ(std::stod(FormatDouble(x)), x);
  }
  EXPECT_EQ(FormatDouble(INFINITY), "inf");
  EXPECT_EQ(FormatDouble(-INFINITY), "-inf");
}

}  // namespace
}  // namespace mbmbr

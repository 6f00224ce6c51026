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

// File formats. Every format starts with a version marker: JSON-lines files
// open with a header object {"format": ..., "format_version": 1}, CSV reports
// carry format_version as their first column, and the toy LM config is a JSON
// document with top-level "format" and "format_version" keys. See
// docs/formats.md.

#ifndef MBMBR_IO_HPP_
#define MBMBR_IO_HPP_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mbmbr/core.hpp"
#include "mbmbr/decoder.hpp"
#include "mbmbr/sim.hpp"
#include "mbmbr/toylm.hpp"
#include "mbmbr/utility.hpp"

namespace mbmbr {

inline constexpr int kFormatVersion = 1;

inline constexpr std::string_view kSamplesFormat = "mbmbr.samples";
inline constexpr std::string_view kUtilityMatrixFormat = "mbmbr.utility_matrix";
inline constexpr std::string_view kSelectionFormat = "mbmbr.selection";
inline constexpr std::string_view kReferencesFormat = "mbmbr.references";
inline constexpr std::string_view kToyLMFormat = "mbmbr.toylm";

struct SampleRecord {
  std::string id;
  std::string text;
  double logprob = 0.0;  // natural log after base conversion; -inf for log(0)
  std::int64_t count = 1;
  SampleRole role = SampleRole::kBoth;
};

struct ReadOptions {
  PoolMode mode = PoolMode::kShared;
  LengthUnit length_unit = LengthUnit::kTokens;
  // Base of the logprobs in the file; converted to natural log on read.
  // nullopt means natural log already.
  std::optional<double> log_base;
  // Allow logprob > 0 (length-penalized or otherwise unnormalized scores).
  bool unnormalized = false;
};

struct PoolSet {
  // In order of each id's first appearance.
  std::vector<HypothesisPool> pools;
  std::vector<std::string> warnings;

  const HypothesisPool* Find(std::string_view id) const;
};

// Parses one record line (without the header). Throws ParseError.
SampleRecord ParseSampleRecord(std::string_view line, std::size_t line_number,
                               const ReadOptions& options = {});

// Groups records by id, preserving within-id order. An empty stream yields an
// empty set plus a warning. Throws ParseError naming the line.
PoolSet ReadSamples(std::istream& in, const ReadOptions& options = {});

// Writes pools so that ReadSamples reconstructs them (texts, counts,
// logprobs, roles).
void WriteSamples(std::ostream& out, std::span<const HypothesisPool> pools);

struct ExternalMatrix {
  std::string id;
  std::vector<std::string> candidates;
  std::vector<std::string> references;
  UtilityMatrix matrix;
};

std::vector<ExternalMatrix> ReadUtilityMatrices(std::istream& in);
void WriteUtilityMatrices(std::ostream& out, std::span<const ExternalMatrix> matrices);

// Checks the matrix's declared candidate and reference orders against the
// pool and returns it. Throws AlignmentError naming the first mismatch.
const UtilityMatrix& AlignUtilityMatrix(const ExternalMatrix& external, const HypothesisPool& pool);

// id -> reference text, for relative-length diagnostics.
std::map<std::string, std::string> ReadReferences(std::istream& in);

struct SelectionRow {
  std::string id;
  DecisionRule rule = DecisionRule::kMbr;
  std::size_t chosen_index = 0;
  std::string chosen_text;
  double objective = 0.0;
  bool tie_broken = false;
  std::optional<double> relative_length;
};

SelectionRow MakeSelectionRow(std::string id, const SelectionResult& result,
                              std::optional<double> relative_length = std::nullopt);

enum class ReportFormat { kRecords, kCsv };

// CSV columns, in order:
// format_version,id,rule,chosen_index,chosen_text,objective,tie_broken,relative_length
void WriteSelectionReport(std::ostream& out, std::span<const SelectionRow> rows,
                          ReportFormat format);
std::vector<SelectionRow> ReadSelectionReportCsv(std::istream& in);

struct DivergenceRow {
  std::string id;
  std::size_t references = 0;
  std::int64_t total_samples = 0;
  double tail_mass = 0.0;
  double kl_mc = 0.0;
  double kl_mb = 0.0;
  double kl_mb_closed_form = 0.0;
  double jsd_mc = 0.0;
  double jsd_mb = 0.0;
};

void WriteDivergenceCsv(std::ostream& out, std::span<const DivergenceRow> rows);
void WriteZipfCsv(std::ostream& out, const ZipfConfig& config, const ZipfResult& result,
                  bool with_header = true);
void WriteSweepCsv(std::ostream& out, const SweepReport& report);
void WriteQualityCsv(std::ostream& out, const QualityReport& report);

ToyLM ReadToyLM(std::istream& in);
void WriteToyLM(std::ostream& out, const ToyLM& lm);

// RFC 4180 helpers.
std::string CsvEscape(std::string_view field);
std::vector<std::vector<std::string>> ParseCsv(std::istream& in);

// Shortest decimal that reads back to the same double; "inf"/"-inf"/"nan"
// for non-finite values.
std::string FormatDouble(double x);

}  // namespace mbmbr

#endif  // MBMBR_IO_HPP_

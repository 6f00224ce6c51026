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

#include "mbmbr/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace mbmbr {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

json HeaderFor(std::string_view format) {
  return json{{"format", format}, {"format_version", kFormatVersion}};
}

void CheckHeader(const json& j, std::string_view format, std::size_t line) {
  if (!j.is_object() || !j.contains("format") || !j.contains("format_version")) {
    throw ParseError(line, "expected a header with \"format\" and \"format_version\"");
  }
  if (!j["format"].is_string() || j["format"].get<std::string>() != format) {
    throw ParseError(line, "expected format \"" + std::string(format) + "\"");
  }
  if (!j["format_version"].is_number_integer() ||
      j["format_version"].get<int>() != kFormatVersion) {
    throw ParseError(line, "unsupported format_version (expected " +
                               std::to_string(kFormatVersion) + ")");
  }
}

bool IsBlank(std::string_view line) {
  return line.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

json ParseJsonLine(std::string_view line, std::size_t line_number) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(line_number, std::string("invalid JSON: ") + e.what());
  }
}

// Reads lines, skipping blanks, and validates the header on the first
// non-blank line. Calls fn(json, line_number) for every following line.
// Returns false if the stream held no non-blank line.
template <typename Fn>
bool ForEachRecord(std::istream& in, std::string_view format, Fn&& fn) {
  std::string line;
  std::size_t line_number = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (IsBlank(line)) continue;
    if (!header_seen) {
      CheckHeader(ParseJsonLine(line, line_number), format, line_number);
      header_seen = true;
      continue;
    }
    fn(line, line_number);
  }
  return header_seen;
}

std::string RequireString(const json& j, const char* key, std::size_t line) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw ParseError(line, std::string("missing or non-string field \"") + key + "\"");
  }
  return j[key].get<std::string>();
}

json LogProbToJson(double lp) {
  if (lp == -std::numeric_limits<double>::infinity()) return "-inf";
  return lp;
}

std::string RoleName(SampleRole role) {
  switch (role) {
    case SampleRole::kBoth: return "both";
    case SampleRole::kCandidate: return "cand";
    case SampleRole::kReference: return "ref";
  }
  return "both";
}

std::vector<std::string> StringArray(const json& j, const char* key, std::size_t line) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw ParseError(line, std::string("missing array \"") + key + "\"");
  }
  std::vector<std::string> out;
  for (const json& x : j[key]) {
    if (!x.is_string()) throw ParseError(line, std::string("non-string entry in \"") + key + "\"");
    out.push_back(x.get<std::string>());
  }
  return out;
}

double ParseDouble(std::string_view s, std::size_t line) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(line, "invalid number '" + std::string(s) + "'");
  }
  return x;
}

}  // namespace

std::string FormatDouble(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

const HypothesisPool* PoolSet::Find(std::string_view id) const {
  for (const HypothesisPool& p : pools) {
    if (p.source_id() == id) return &p;
  }
  return nullptr;
}

SampleRecord ParseSampleRecord(std::string_view line, std::size_t line_number,
                               const ReadOptions& options) {
  const json j = ParseJsonLine(line, line_number);
  if (!j.is_object()) throw ParseError(line_number, "record is not a JSON object");
  SampleRecord r;
  r.id = RequireString(j, "id", line_number);
  r.text = RequireString(j, "text", line_number);
  if (r.id.empty()) throw ParseError(line_number, "empty id");
  if (DedupKey(r.text).empty()) throw ParseError(line_number, "empty text");

  if (!j.contains("logprob")) throw ParseError(line_number, "missing field \"logprob\"");
  const json& lp = j["logprob"];
  if (lp.is_null() || (lp.is_string() && lp.get<std::string>() == "-inf")) {
    r.logprob = -std::numeric_limits<double>::infinity();
  } else if (lp.is_number()) {
    r.logprob = lp.get<double>();
    if (options.log_base) r.logprob *= std::log(*options.log_base);
    if (!std::isfinite(r.logprob)) throw ParseError(line_number, "logprob is not finite");
    if (r.logprob > 0.0 && !options.unnormalized) {
      throw ParseError(line_number, "logprob > 0 (pass --unnormalized to allow)");
    }
  } else {
    throw ParseError(line_number, "logprob must be a number, null or \"-inf\"");
  }

  if (j.contains("count")) {
    if (!j["count"].is_number_integer() || j["count"].get<std::int64_t>() < 1) {
      throw ParseError(line_number, "count must be a positive integer");
    }
    r.count = j["count"].get<std::int64_t>();
  }
  if (j.contains("role")) {
    const std::string role = j["role"].is_string() ? j["role"].get<std::string>() : "";
    if (role == "both") {
      r.role = SampleRole::kBoth;
    } else if (role == "cand") {
      r.role = SampleRole::kCandidate;
    } else if (role == "ref") {
      r.role = SampleRole::kReference;
    } else {
      throw ParseError(line_number, "role must be \"both\", \"cand\" or \"ref\"");
    }
  }
  return r;
}

PoolSet ReadSamples(std::istream& in, const ReadOptions& options) {
  if (options.log_base && !(*options.log_base > 0.0 && *options.log_base != 1.0)) {
    throw InputError("log base must be positive and not 1");
  }
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<Sample>> grouped;
  const bool any = ForEachRecord(in, kSamplesFormat, [&](const std::string& line, std::size_t n) {
    SampleRecord r = ParseSampleRecord(line, n, options);
    auto [it, inserted] = grouped.try_emplace(r.id);
    if (inserted) order.push_back(r.id);
    it->second.push_back({std::move(r.text), LogProb(r.logprob), r.count, r.role});
  });

  PoolSet set;
  if (!any || order.empty()) {
    set.warnings.push_back("sample stream is empty");
    return set;
  }
  for (const std::string& id : order) {
    PoolOptions po;
    po.mode = options.mode;
    po.length_unit = options.length_unit;
    po.source_id = id;
    set.pools.push_back(HypothesisPool::Build(grouped[id], po));
    for (const std::string& w : set.pools.back().warnings()) {
      set.warnings.push_back("id '" + id + "': " + w);
    }
  }
  return set;
}

void WriteSamples(std::ostream& out, std::span<const HypothesisPool> pools) {
  out << HeaderFor(kSamplesFormat).dump() << '\n';
  for (const HypothesisPool& pool : pools) {
    for (const Sample& s : pool.ToSamples()) {
      ordered_json j;
      j["id"] = pool.source_id();
      j["text"] = s.text;
      j["logprob"] = LogProbToJson(s.logprob.value());
      j["count"] = s.count;
      if (s.role != SampleRole::kBoth) j["role"] = RoleName(s.role);
      out << j.dump() << '\n';
    }
  }
}

std::vector<ExternalMatrix> ReadUtilityMatrices(std::istream& in) {
  std::vector<ExternalMatrix> out;
  ForEachRecord(in, kUtilityMatrixFormat, [&](const std::string& line, std::size_t n) {
    const json j = ParseJsonLine(line, n);
    if (!j.is_object()) throw ParseError(n, "record is not a JSON object");
    ExternalMatrix m;
    m.id = RequireString(j, "id", n);
    m.candidates = StringArray(j, "candidates", n);
    m.references = StringArray(j, "references", n);
    if (!j.contains("values") || !j["values"].is_array()) {
      throw ParseError(n, "missing array \"values\"");
    }
    std::vector<double> values;
    values.reserve(j["values"].size());
    for (const json& v : j["values"]) {
      if (!v.is_number()) throw ParseError(n, "non-numeric utility value");
      values.push_back(v.get<double>());
    }
    try {
      m.matrix = UtilityMatrix(m.candidates.size(), m.references.size(), std::move(values));
    } catch (const InputError& e) {
      throw ParseError(n, e.what());
    }
    out.push_back(std::move(m));
  });
  return out;
}

void WriteUtilityMatrices(std::ostream& out, std::span<const ExternalMatrix> matrices) {
  out << HeaderFor(kUtilityMatrixFormat).dump() << '\n';
  for (const ExternalMatrix& m : matrices) {
    ordered_json j;
    j["id"] = m.id;
    j["candidates"] = m.candidates;
    j["references"] = m.references;
    j["values"] = m.matrix.values();
    out << j.dump() << '\n';
  }
}

const UtilityMatrix& AlignUtilityMatrix(const ExternalMatrix& external,
                                        const HypothesisPool& pool) {
  auto check = [&](const std::vector<std::string>& declared,
                   const std::vector<Hypothesis>& actual, const char* what) {
    const std::size_t n = std::min(declared.size(), actual.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (DedupKey(declared[i]) != actual[i].text) {
        throw AlignmentError("utility matrix for '" + external.id + "': " + what + " " +
                             std::to_string(i) + " is '" + declared[i] +
                             "' but the pool has '" + actual[i].text + "'");
      }
    }
    if (declared.size() != actual.size()) {
      throw AlignmentError("utility matrix for '" + external.id + "' declares " +
                           std::to_string(declared.size()) + " " + what + "s; pool has " +
                           std::to_string(actual.size()) +
                           (declared.size() < actual.size()
                                ? " (first missing: '" + actual[n].text + "')"
                                : " (first extra: '" + declared[n] + "')"));
    }
  };
  check(external.candidates, pool.candidates(), "candidate");
  check(external.references, pool.references(), "reference");
  return external.matrix;
}

std::map<std::string, std::string> ReadReferences(std::istream& in) {
  std::map<std::string, std::string> out;
  ForEachRecord(in, kReferencesFormat, [&](const std::string& line, std::size_t n) {
    const json j = ParseJsonLine(line, n);
    if (!j.is_object()) throw ParseError(n, "record is not a JSON object");
    out[RequireString(j, "id", n)] = RequireString(j, "text", n);
  });
  return out;
}

SelectionRow MakeSelectionRow(std::string id, const SelectionResult& result,
                              std::optional<double> relative_length) {
  SelectionRow row;
  row.id = std::move(id);
  row.rule = result.rule;
  row.chosen_index = result.chosen_index;
  row.chosen_text = result.chosen_text;
  row.objective = result.chosen_objective();
  row.tie_broken = result.tie_broken;
  row.relative_length = relative_length;
  return row;
}

std::string CsvEscape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::vector<std::string>> ParseCsv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw ParseError(rows.size() + 1, "unterminated quoted CSV field");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

void WriteSelectionReport(std::ostream& out, std::span<const SelectionRow> rows,
                          ReportFormat format) {
  if (format == ReportFormat::kCsv) {
    out << "format_version,id,rule,chosen_index,chosen_text,objective,tie_broken,relative_length\n";
    for (const SelectionRow& r : rows) {
      out << kFormatVersion << ',' << CsvEscape(r.id) << ',' << DecisionRuleName(r.rule) << ','
          << r.chosen_index << ',' << CsvEscape(r.chosen_text) << ',' << FormatDouble(r.objective)
          << ',' << (r.tie_broken ? 1 : 0) << ','
          << (r.relative_length ? FormatDouble(*r.relative_length) : "") << '\n';
    }
    return;
  }
  out << HeaderFor(kSelectionFormat).dump() << '\n';
  for (const SelectionRow& r : rows) {
    ordered_json j;
    j["id"] = r.id;
    j["rule"] = DecisionRuleName(r.rule);
    j["chosen_index"] = r.chosen_index;
    j["chosen_text"] = r.chosen_text;
    j["objective"] = r.objective;
    j["tie_broken"] = r.tie_broken;
    j["relative_length"] = r.relative_length ? json(*r.relative_length) : json(nullptr);
    out << j.dump() << '\n';
  }
}

std::vector<SelectionRow> ReadSelectionReportCsv(std::istream& in) {
  const auto rows = ParseCsv(in);
  if (rows.empty()) throw ParseError(1, "missing CSV header");
  if (rows[0].size() != 8 || rows[0][0] != "format_version") {
    throw ParseError(1, "unexpected selection CSV header");
  }
  std::vector<SelectionRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    const std::size_t line = i + 1;
    if (f.size() != 8) throw ParseError(line, "expected 8 fields");
    if (f[0] != std::to_string(kFormatVersion)) throw ParseError(line, "unsupported format_version");
    SelectionRow r;
    r.id = f[1];
    const auto rule = ParseDecisionRule(f[2]);
    if (!rule) throw ParseError(line, "unknown rule '" + f[2] + "'");
    r.rule = *rule;
    r.chosen_index = static_cast<std::size_t>(ParseDouble(f[3], line));
    r.chosen_text = f[4];
    r.objective = ParseDouble(f[5], line);
    r.tie_broken = f[6] == "1";
    if (!f[7].empty()) r.relative_length = ParseDouble(f[7], line);
    out.push_back(std::move(r));
  }
  return out;
}

void WriteDivergenceCsv(std::ostream& out, std::span<const DivergenceRow> rows) {
  out << "format_version,id,references,total_samples,tail_mass,kl_mc,kl_mb,kl_mb_closed_form,"
         "jsd_mc,jsd_mb\n";
  for (const DivergenceRow& r : rows) {
    out << kFormatVersion << ',' << CsvEscape(r.id) << ',' << r.references << ','
        << r.total_samples << ',' << FormatDouble(r.tail_mass) << ',' << FormatDouble(r.kl_mc)
        << ',' << FormatDouble(r.kl_mb) << ',' << FormatDouble(r.kl_mb_closed_form) << ','
        << FormatDouble(r.jsd_mc) << ',' << FormatDouble(r.jsd_mb) << '\n';
  }
}

void WriteZipfCsv(std::ostream& out, const ZipfConfig& config, const ZipfResult& result,
                  bool with_header) {
  if (with_header) {
    out << "format_version,exponent,domain_size,indexing,samples_per_run,runs,seed,"
           "mean_kl_mc,std_kl_mc,mean_kl_mb,std_kl_mb,violations\n";
  }
  out << kFormatVersion << ',' << FormatDouble(config.exponent) << ',' << config.domain_size
      << ",rank1," << config.samples_per_run << ',' << config.runs << ',' << config.seed << ','
      << FormatDouble(result.mean_kl_mc) << ',' << FormatDouble(result.std_kl_mc) << ','
      << FormatDouble(result.mean_kl_mb) << ',' << FormatDouble(result.std_kl_mb) << ','
      << result.violations << '\n';
}

void WriteSweepCsv(std::ostream& out, const SweepReport& report) {
  out << "format_version,seed,config_hash,n,mean_kl_mc,std_kl_mc,mean_kl_mb,std_kl_mb,"
         "mean_jsd_mc,mean_jsd_mb,excluded_infinite,dominance_violations\n";
  for (const SweepRow& r : report.rows) {
    out << kFormatVersion << ',' << report.seed << ',' << report.config_hash << ',' << r.n << ','
        << FormatDouble(r.mean_kl_mc) << ',' << FormatDouble(r.std_kl_mc) << ','
        << FormatDouble(r.mean_kl_mb) << ',' << FormatDouble(r.std_kl_mb) << ','
        << FormatDouble(r.mean_jsd_mc) << ',' << FormatDouble(r.mean_jsd_mb) << ','
        << r.excluded_infinite << ',' << r.dominance_violations << '\n';
  }
}

void WriteQualityCsv(std::ostream& out, const QualityReport& report) {
  out << "format_version,seed,config_hash,n,mean_kl_mc,mean_kl_mb,mean_regret_mc,"
         "mean_regret_mb,spearman_mc,spearman_mb,spearman_pooled\n";
  for (const QualityRow& r : report.rows) {
    out << kFormatVersion << ',' << report.seed << ',' << report.config_hash << ',' << r.n << ','
        << FormatDouble(r.mean_kl_mc) << ',' << FormatDouble(r.mean_kl_mb) << ','
        << FormatDouble(r.mean_regret_mc) << ',' << FormatDouble(r.mean_regret_mb) << ','
        << FormatDouble(report.spearman_mc) << ',' << FormatDouble(report.spearman_mb) << ','
        << FormatDouble(report.spearman_pooled) << '\n';
  }
}

ToyLM ReadToyLM(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("toy LM config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(0, "toy LM config must be a JSON object");
  CheckHeader(j, kToyLMFormat, 0);
  const std::vector<std::string> vocab = StringArray(j, "vocabulary", 0);
  const std::string bos = j.contains("bos") ? RequireString(j, "bos", 0) : "<s>";
  const std::string eos = j.contains("eos") ? RequireString(j, "eos", 0) : "</s>";
  if (!j.contains("order") || !j["order"].is_number_integer()) {
    throw ParseError(0, "missing integer \"order\"");
  }
  if (!j.contains("max_length") || !j["max_length"].is_number_integer()) {
    throw ParseError(0, "missing integer \"max_length\"");
  }
  if (!j.contains("conditionals") || !j["conditionals"].is_array()) {
    throw ParseError(0, "missing array \"conditionals\"");
  }
  std::unordered_map<std::string, SymbolId> index;
  for (std::size_t i = 0; i < vocab.size(); ++i) index[vocab[i]] = static_cast<SymbolId>(i);
  auto lookup = [&](const std::string& s) {
    auto it = index.find(s);
    if (it == index.end()) throw ParseError(0, "unknown symbol '" + s + "' in conditionals");
    return it->second;
  };

  std::map<ToyLM::Context, std::vector<double>> conditionals;
  for (const json& entry : j["conditionals"]) {
    if (!entry.is_object()) throw ParseError(0, "conditional entry must be an object");
    ToyLM::Context ctx;
    for (const std::string& s : StringArray(entry, "context", 0)) ctx.push_back(lookup(s));
    if (!entry.contains("probs") || !entry["probs"].is_object()) {
      throw ParseError(0, "conditional entry needs a \"probs\" object");
    }
    std::vector<double> row(vocab.size(), 0.0);
    for (const auto& [sym, p] : entry["probs"].items()) {
      if (!p.is_number()) throw ParseError(0, "probability for '" + sym + "' is not a number");
      row[static_cast<std::size_t>(lookup(sym))] = p.get<double>();
    }
    if (!conditionals.emplace(std::move(ctx), std::move(row)).second) {
      throw ParseError(0, "duplicate context in conditionals");
    }
  }
  return ToyLM(vocab, bos, eos, j["order"].get<int>(), j["max_length"].get<int>(),
               std::move(conditionals));
}

void WriteToyLM(std::ostream& out, const ToyLM& lm) {
  ordered_json j;
  j["format"] = kToyLMFormat;
  j["format_version"] = kFormatVersion;
  j["vocabulary"] = lm.vocabulary();
  j["bos"] = lm.vocabulary()[static_cast<std::size_t>(lm.bos())];
  j["eos"] = lm.vocabulary()[static_cast<std::size_t>(lm.eos())];
  j["order"] = lm.order();
  j["max_length"] = lm.max_length();
  ordered_json conds = ordered_json::array();
  for (const auto& [ctx, row] : lm.conditionals()) {
    ordered_json entry;
    ordered_json names = ordered_json::array();
    for (SymbolId s : ctx) names.push_back(lm.vocabulary()[static_cast<std::size_t>(s)]);
    entry["context"] = names;
    ordered_json probs = ordered_json::object();
    for (std::size_t s = 0; s < row.size(); ++s) {
      if (row[s] > 0.0) probs[lm.vocabulary()[s]] = row[s];
    }
    entry["probs"] = probs;
    conds.push_back(entry);
  }
  j["conditionals"] = conds;
  out << j.dump(2) << '\n';
}

}  // namespace mbmbr

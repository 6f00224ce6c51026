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

#include "mbmbr/utility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <utility>

namespace mbmbr {
namespace {

// Maps symbol sequences (tokens as ids, or code points) to dense ids.
class Interner {
 public:
  std::uint32_t Id(std::u32string_view key) {
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(ids_.size());
    ids_.emplace(std::u32string(key), id);
    return id;
  }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::u32string_view s) const {
      return std::hash<std::u32string_view>{}(s);
    }
  };
  std::unordered_map<std::u32string, std::uint32_t, Hash, std::equal_to<>> ids_;
};

// Sorted (n-gram id, count) runs per order, plus the sequence length.
struct Profile {
  std::size_t length = 0;
  std::vector<std::vector<std::pair<std::uint32_t, int>>> orders;
};

Profile MakeProfile(const std::u32string& seq, int max_n, Interner& grams) {
  Profile p;
  p.length = seq.size();
  p.orders.resize(static_cast<std::size_t>(max_n));
  std::vector<std::uint32_t> ids;
  for (std::size_t n = 1; n <= static_cast<std::size_t>(max_n) && n <= seq.size(); ++n) {
    ids.clear();
    const std::u32string_view view(seq);
    for (std::size_t i = 0; i + n <= seq.size(); ++i) ids.push_back(grams.Id(view.substr(i, n)));
    std::sort(ids.begin(), ids.end());
    auto& runs = p.orders[n - 1];
    for (std::uint32_t id : ids) {
      if (!runs.empty() && runs.back().first == id) {
        ++runs.back().second;
      } else {
        runs.emplace_back(id, 1);
      }
    }
  }
  return p;
}

int ClippedMatches(const std::vector<std::pair<std::uint32_t, int>>& a,
                   const std::vector<std::pair<std::uint32_t, int>>& b) {
  int m = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (b[j].first < a[i].first) {
      ++j;
    } else {
      m += std::min(a[i].second, b[j].second);
      ++i;
      ++j;
    }
  }
  return m;
}

class TokenMap {
 public:
  std::u32string Map(std::string_view text) {
    std::u32string out;
    for (std::string_view tok : SplitTokens(text)) {
      auto [it, _] = ids_.try_emplace(std::string(tok), static_cast<char32_t>(ids_.size()));
      out.push_back(it->second);
    }
    return out;
  }

 private:
  std::unordered_map<std::string, char32_t> ids_;
};

// Lenient UTF-8 decode with whitespace removed.
std::u32string CodePointsNoSpace(std::string_view text) {
  std::u32string out;
  std::size_t i = 0;
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    char32_t cp = c;
    std::size_t len = 1;
    if (c >= 0xF0) {
      cp = c & 0x07;
      len = 4;
    } else if (c >= 0xE0) {
      cp = c & 0x0F;
      len = 3;
    } else if (c >= 0xC0) {
      cp = c & 0x1F;
      len = 2;
    }
    for (std::size_t k = 1; k < len && i + k < text.size(); ++k) {
      cp = (cp << 6) | (static_cast<unsigned char>(text[i + k]) & 0x3F);
    }
    i += len;
    if (cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v') continue;
    out.push_back(cp);
  }
  return out;
}

double BleuScore(const Profile& h, const Profile& r, int max_n) {
  if (h.length == 0) return 0.0;
  double log_precision = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    const auto un = static_cast<std::size_t>(n);
    const std::size_t total = h.length >= un ? h.length - un + 1 : 0;
    const int matches = ClippedMatches(h.orders[un - 1], r.orders[un - 1]);
    log_precision += std::log((matches + 1.0) / (static_cast<double>(total) + 1.0));
  }
  log_precision /= max_n;

  double log_bp = 0.0;
  if (h.length < r.length) {
    log_bp = 1.0 - static_cast<double>(r.length) / static_cast<double>(h.length);
  }
  return std::exp(log_precision + log_bp);
}

double ChrfScore(const Profile& h, const Profile& r, int char_n, double beta) {
  double precision = 0.0;
  double recall = 0.0;
  int orders = 0;
  for (std::size_t n = 1; n <= static_cast<std::size_t>(char_n); ++n) {
    const std::size_t h_total = h.length >= n ? h.length - n + 1 : 0;
    const std::size_t r_total = r.length >= n ? r.length - n + 1 : 0;
    if (h_total == 0 && r_total == 0) continue;
    ++orders;
    if (h_total == 0 || r_total == 0) continue;
    const double m = ClippedMatches(h.orders[n - 1], r.orders[n - 1]);
    precision += m / static_cast<double>(h_total);
    recall += m / static_cast<double>(r_total);
  }
  if (orders == 0) return 0.0;
  precision /= orders;
  recall /= orders;
  if (precision == 0.0 && recall == 0.0) return 0.0;
  const double b2 = beta * beta;
  return (1.0 + b2) * precision * recall / (b2 * precision + recall);
}

double F1Score(const Profile& h, const Profile& r) {
  if (h.length == 0 || r.length == 0) return 0.0;
  const int overlap = ClippedMatches(h.orders[0], r.orders[0]);
  return 2.0 * overlap / static_cast<double>(h.length + r.length);
}

constexpr int kBleuOrder = 4;
constexpr int kChrfOrder = 6;
constexpr double kChrfBeta = 2.0;

// Builds profiles for one utility kind over any number of texts, sharing the
// token and n-gram tables.
class Profiler {
 public:
  explicit Profiler(UtilityKind kind) : kind_(kind) {}

  Profile operator()(std::string_view text) {
    switch (kind_) {
      case UtilityKind::kBleu: return MakeProfile(tokens_.Map(text), kBleuOrder, grams_);
      case UtilityKind::kChrf: return MakeProfile(CodePointsNoSpace(text), kChrfOrder, grams_);
      case UtilityKind::kUnigramF1: return MakeProfile(tokens_.Map(text), 1, grams_);
    }
    return {};
  }

 private:
  UtilityKind kind_;
  TokenMap tokens_;
  Interner grams_;
};

double Score(UtilityKind kind, const Profile& h, const Profile& r) {
  switch (kind) {
    case UtilityKind::kBleu: return BleuScore(h, r, kBleuOrder);
    case UtilityKind::kChrf: return ChrfScore(h, r, kChrfOrder, kChrfBeta);
    case UtilityKind::kUnigramF1: return F1Score(h, r);
  }
  return 0.0;
}

}  // namespace

double SentenceBleu(std::string_view hypothesis, std::string_view reference, int max_n) {
  if (max_n < 1) throw InputError("BLEU max_n must be >= 1");
  TokenMap tokens;
  Interner grams;
  const Profile h = MakeProfile(tokens.Map(hypothesis), max_n, grams);
  const Profile r = MakeProfile(tokens.Map(reference), max_n, grams);
  return BleuScore(h, r, max_n);
}

double Chrf(std::string_view hypothesis, std::string_view reference, int char_n, double beta) {
  if (char_n < 1) throw InputError("chrF order must be >= 1");
  if (!(beta > 0.0)) throw InputError("chrF beta must be positive");
  Interner grams;
  const Profile h = MakeProfile(CodePointsNoSpace(hypothesis), char_n, grams);
  const Profile r = MakeProfile(CodePointsNoSpace(reference), char_n, grams);
  return ChrfScore(h, r, char_n, beta);
}

double UnigramF1(std::string_view hypothesis, std::string_view reference) {
  Profiler profile(UtilityKind::kUnigramF1);
  const Profile h = profile(hypothesis);
  const Profile r = profile(reference);
  return F1Score(h, r);
}

std::string_view UtilityName(UtilityKind kind) {
  switch (kind) {
    case UtilityKind::kBleu: return "bleu";
    case UtilityKind::kChrf: return "chrf";
    case UtilityKind::kUnigramF1: return "f1";
  }
  return "unknown";
}

std::optional<UtilityKind> ParseUtilityKind(std::string_view name) {
  if (name == "bleu") return UtilityKind::kBleu;
  if (name == "chrf") return UtilityKind::kChrf;
  if (name == "f1" || name == "unigram_f1") return UtilityKind::kUnigramF1;
  return std::nullopt;
}

double Utility::operator()(std::string_view hypothesis, std::string_view reference) const {
  Profiler profile(kind_);
  const Profile h = profile(hypothesis);
  const Profile r = profile(reference);
  return Score(kind_, h, r);
}

UtilityMatrix::UtilityMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw ShapeError("utility matrix has " + std::to_string(values_.size()) +
                     " values, expected " + std::to_string(rows_) + "x" +
                     std::to_string(cols_));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InputError("utility matrix contains a non-finite value");
    u_max_ = std::max(u_max_, std::abs(v));
  }
}

UtilityMatrix ComputeUtilityMatrix(std::span<const std::string> candidates,
                                   std::span<const std::string> references,
                                   const Utility& utility, unsigned threads) {
  const std::size_t rows = candidates.size();
  const std::size_t cols = references.size();
  std::vector<double> values(rows * cols);
  Profiler profile(utility.kind());
  std::vector<Profile> cand_profiles, ref_profiles;
  cand_profiles.reserve(rows);
  ref_profiles.reserve(cols);
  for (const std::string& c : candidates) cand_profiles.push_back(profile(c));
  for (const std::string& r : references) ref_profiles.push_back(profile(r));
  auto fill_rows = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        values[i * cols + j] = Score(utility.kind(), cand_profiles[i], ref_profiles[j]);
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(rows)));
  if (threads <= 1) {
    fill_rows(0, rows);
  } else {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (rows + threads - 1) / threads;
    for (std::size_t begin = 0; begin < rows; begin += chunk) {
      workers.emplace_back(fill_rows, begin, std::min(rows, begin + chunk));
    }
  }
  return UtilityMatrix(rows, cols, std::move(values));
}

std::vector<std::string> Texts(std::span<const Hypothesis> hypotheses) {
  std::vector<std::string> out;
  out.reserve(hypotheses.size());
  for (const Hypothesis& h : hypotheses) out.push_back(h.text);
  return out;
}

UtilityMatrix ComputeUtilityMatrix(const HypothesisPool& pool, const Utility& utility,
                                   unsigned threads) {
  const auto cands = Texts(pool.candidates());
  const auto refs = Texts(pool.references());
  return ComputeUtilityMatrix(cands, refs, utility, threads);
}

}  // namespace mbmbr

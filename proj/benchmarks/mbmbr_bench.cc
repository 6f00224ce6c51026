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

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "mbmbr/decoder.hpp"
#include "mbmbr/estimators.hpp"
#include "mbmbr/sim.hpp"
#include "mbmbr/toylm.hpp"
#include "mbmbr/utility.hpp"

namespace mbmbr {
namespace {

std::vector<Sample> RandomSamples(std::size_t n, std::uint64_t seed) {
  static const char* kWords[] = {"the", "a", "cat", "dog", "sat", "on", "mat", "truth",
                                 "is", "not", "crime", "but", "to", "tell", "however"};
  std::mt19937_64 rng(seed);
  std::vector<Sample> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string text;
    const int len = 5 + static_cast<int>(rng() % 20);
    for (int k = 0; k < len; ++k) {
      if (k) text += ' ';
      text += kWords[rng() % 15];
    }
    out.push_back({text, LogProb(-0.5 * len - static_cast<double>(rng() % 100) / 10.0)});
  }
  return out;
}

void BM_UtilityMatrix(benchmark::State& state) {
  const auto kind = static_cast<UtilityKind>(state.range(1));
  const HypothesisPool pool =
      HypothesisPool::Build(RandomSamples(static_cast<std::size_t>(state.range(0)), 1));
  const Utility u(kind);
  for (auto _ : state) benchmark::DoNotOptimize(ComputeUtilityMatrix(pool, u));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
  state.SetLabel(std::string(UtilityName(kind)));
}
BENCHMARK(BM_UtilityMatrix)->ArgsProduct({{16, 64, 256}, {0, 1, 2}});

void BM_Select(benchmark::State& state) {
  const HypothesisPool pool =
      HypothesisPool::Build(RandomSamples(static_cast<std::size_t>(state.range(0)), 2));
  const UtilityMatrix m = ComputeUtilityMatrix(pool, Utility(UtilityKind::kUnigramF1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Select(pool, m, ModelBasedWeights(pool), DecisionRule::kMbmbr));
  }
}
BENCHMARK(BM_Select)->Arg(64)->Arg(256)->Arg(1024);

void BM_SampleSequences(benchmark::State& state) {
  const ToyLM lm = RandomToyLM({}, 3);
  SamplerConfig c;
  c.algorithm = static_cast<SamplingAlgorithm>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(SampleSequences(lm, c, 256));
  state.SetLabel(std::string(SamplingAlgorithmName(c.algorithm)));
}
BENCHMARK(BM_SampleSequences)->DenseRange(0, 3);

void BM_Enumerate(benchmark::State& state) {
  const ToyLM lm = RandomToyLM({.symbols = 4, .max_length = static_cast<int>(state.range(0))}, 4);
  for (auto _ : state) benchmark::DoNotOptimize(Enumerate(lm));
}
BENCHMARK(BM_Enumerate)->Arg(5)->Arg(7)->Arg(9);

void BM_Zipf(benchmark::State& state) {
  ZipfConfig c;
  c.samples_per_run = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(RunZipf(c));
}
BENCHMARK(BM_Zipf)->Arg(100)->Arg(400);

}  // namespace
}  // namespace mbmbr

BENCHMARK_MAIN();

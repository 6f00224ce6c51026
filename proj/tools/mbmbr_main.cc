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

// mbmbr: command-line front end.
//
// Exit codes: 0 success, 1 input error, 2 internal invariant violation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mbmbr/core.hpp"
#include "mbmbr/decoder.hpp"
#include "mbmbr/divergence.hpp"
#include "mbmbr/errors.hpp"
#include "mbmbr/estimators.hpp"
#include "mbmbr/io.hpp"
#include "mbmbr/sim.hpp"
#include "mbmbr/toylm.hpp"
#include "mbmbr/utility.hpp"

namespace {

using namespace mbmbr;

// Input file, or stdin for "-".
class Input {
 public:
  explicit Input(const std::string& path) {
    if (path == "-") return;
    file_ = std::make_unique<std::ifstream>(path);
    if (!*file_) throw InputError("cannot open " + path);
  }
  std::istream& get() { return file_ ? *file_ : std::cin; }

 private:
  std::unique_ptr<std::ifstream> file_;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw InputError("cannot write " + path);
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void Warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

// ---- shared option groups ----

struct PoolFlags {
  std::string input = "-";
  std::optional<double> log_base;
  bool unnormalized = false;
  std::string length_unit = "tokens";
  std::string pool_mode = "shared";

  void Add(CLI::App* app) {
    app->add_option("input", input, "Sample records (JSON lines), '-' for stdin");
    app->add_option("--log-base", log_base, "Base of the input logprobs (default: natural)")
        ->check(CLI::PositiveNumber);
    app->add_flag("--unnormalized", unnormalized, "Accept logprob > 0");
    app->add_option("--length-unit", length_unit, "Length unit for MBMBR-L")
        ->check(CLI::IsMember({"tokens", "characters"}));
    app->add_option("--pool-mode", pool_mode, "shared: candidates = references; split: use roles")
        ->check(CLI::IsMember({"shared", "split"}));
  }

  PoolSet Read() const {
    ReadOptions opts;
    opts.mode = pool_mode == "split" ? PoolMode::kSplit : PoolMode::kShared;
    opts.length_unit = length_unit == "characters" ? LengthUnit::kCharacters : LengthUnit::kTokens;
    opts.log_base = log_base;
    opts.unnormalized = unnormalized;
    Input in(input);
    PoolSet set = ReadSamples(in.get(), opts);
    for (const auto& w : set.warnings) Warn(w);
    return set;
  }
};

struct SamplerFlags {
  std::string algorithm = "ancestral";
  SamplerConfig config;

  void Add(CLI::App* app) {
    app->add_option("--algorithm", algorithm, "ancestral | top_k | nucleus | epsilon");
    app->add_option("--k", config.k, "Top-k size");
    app->add_option("--p", config.p, "Nucleus mass");
    app->add_option("--epsilon", config.epsilon, "Epsilon threshold");
    app->add_option("--temperature", config.temperature, "Softmax temperature");
  }

  SamplerConfig Get() const {
    SamplerConfig c = config;
    const auto a = ParseSamplingAlgorithm(algorithm);
    if (!a) throw InputError("unknown sampling algorithm '" + algorithm + "'");
    c.algorithm = *a;
    c.Validate();
    return c;
  }
};

struct LMFlags {
  std::string path;
  RandomLMOptions random;
  std::uint64_t lm_seed = 0;

  void Add(CLI::App* app, bool with_seed) {
    app->add_option("--lm", path, "Toy LM config (JSON); random LM when omitted");
    app->add_option("--symbols", random.symbols, "Random LM: non-special symbols");
    app->add_option("--order", random.order, "Random LM: n-gram order");
    app->add_option("--max-length", random.max_length, "Max generated symbols, EOS included");
    app->add_option("--concentration", random.concentration, "Random LM: Dirichlet concentration");
    app->add_option("--eos-concentration", random.eos_concentration,
                    "Random LM: Dirichlet concentration of EOS");
    if (with_seed) app->add_option("--lm-seed", lm_seed, "Random LM seed");
  }

  std::optional<ToyLM> Fixed() const {
    if (path.empty()) return std::nullopt;
    Input in(path);
    return ReadToyLM(in.get());
  }

  ToyLM Get() const {
    if (auto lm = Fixed()) return *lm;
    return RandomToyLM(random, lm_seed);
  }
};

std::vector<DecisionRule> ParseRules(const std::vector<std::string>& names) {
  std::vector<DecisionRule> rules;
  for (const auto& n : names) {
    const auto r = ParseDecisionRule(n);
    if (!r || *r == DecisionRule::kExact) throw InputError("unknown rule '" + n + "'");
    rules.push_back(*r);
  }
  if (rules.empty()) throw InputError("no decision rules given");
  return rules;
}

Utility ParseUtility(const std::string& name) {
  const auto k = ParseUtilityKind(name);
  if (!k) throw InputError("unknown utility '" + name + "'");
  return Utility(*k);
}

// ---- select ----

struct SelectCommand {
  PoolFlags pool;
  std::vector<std::string> rules{"mbr", "mbmbr", "mbmbr-l"};
  std::string utility = "bleu";
  std::string matrix_path;
  double length_scale = 1.0;
  std::string references_path;
  std::string format = "records";
  std::string output;
  unsigned threads = 1;

  void Add(CLI::App* app) {
    pool.Add(app);
    app->add_option("--rules", rules, "Any of mbr, mbmbr, mbmbr-l")->delimiter(',');
    app->add_option("--utility", utility, "bleu | chrf | f1 | external");
    app->add_option("--matrix", matrix_path, "Utility matrices for --utility external");
    app->add_option("--length-scale", length_scale, "MBMBR-L scale on the length");
    app->add_option("--references", references_path, "Reference texts for relative length");
    app->add_option("--format", format, "Report format")
        ->check(CLI::IsMember({"records", "csv"}));
    app->add_option("-o,--output", output, "Report path (default stdout)");
    app->add_option("--threads", threads, "Worker threads for utility matrices");
  }

  int Run() const {
    const std::vector<DecisionRule> rule_list = ParseRules(rules);
    const bool external = utility == "external";
    std::optional<Utility> u;
    if (!external) u = ParseUtility(utility);
    if (external && matrix_path.empty()) throw InputError("--utility external needs --matrix");

    const PoolSet set = pool.Read();
    std::map<std::string, ExternalMatrix> matrices;
    if (external) {
      Input in(matrix_path);
      for (auto& m : ReadUtilityMatrices(in.get())) {
        const std::string id = m.id;
        matrices.emplace(id, std::move(m));
      }
    }
    std::map<std::string, std::string> refs;
    if (!references_path.empty()) {
      Input in(references_path);
      refs = ReadReferences(in.get());
    }

    std::vector<SelectionRow> rows;
    for (const HypothesisPool& p : set.pools) {
      for (const auto& w : p.warnings()) Warn(p.source_id() + ": " + w);
      UtilityMatrix computed;
      const UtilityMatrix* m = nullptr;
      if (external) {
        const auto it = matrices.find(p.source_id());
        if (it == matrices.end()) throw AlignmentError("no utility matrix for id '" + p.source_id() + "'");
        m = &AlignUtilityMatrix(it->second, p);
      } else {
        computed = ComputeUtilityMatrix(p, *u, threads);
        m = &computed;
      }
      for (DecisionRule rule : rule_list) {
        const WeightVector w = rule == DecisionRule::kMbr     ? EmpiricalWeights(p)
                               : rule == DecisionRule::kMbmbr ? ModelBasedWeights(p)
                                                              : LengthNormalizedWeights(p, length_scale);
        const SelectionResult r = Select(p, *m, w, rule);
        std::optional<double> rel;
        if (const auto it = refs.find(p.source_id()); it != refs.end()) {
          rel = RelativeLength(r, it->second, p.length_unit());
        }
        rows.push_back(MakeSelectionRow(p.source_id(), r, rel));
      }
    }
    Output out(output);
    WriteSelectionReport(out.get(), rows, format == "csv" ? ReportFormat::kCsv : ReportFormat::kRecords);
    return 0;
  }
};

// ---- divergence ----

struct DivergenceCommand {
  PoolFlags pool;
  std::optional<double> tail_mass;
  bool tail_from_logprobs = false;
  bool assume_tail_zero = false;
  std::string output;

  void Add(CLI::App* app) {
    pool.Add(app);
    app->add_option("--tail-mass", tail_mass, "Model mass outside the sampled set");
    app->add_flag("--tail-from-logprobs", tail_from_logprobs, "Tail = 1 - sum of P over the pool");
    app->add_flag("--assume-tail-zero", assume_tail_zero, "Treat the pool as the whole support");
    app->add_option("-o,--output", output, "CSV path (default stdout)");
  }

  int Run() const {
    const int modes = (tail_mass ? 1 : 0) + (tail_from_logprobs ? 1 : 0) + (assume_tail_zero ? 1 : 0);
    if (modes != 1) {
      throw InputError(
          "divergence needs exactly one of --tail-mass, --tail-from-logprobs, --assume-tail-zero");
    }
    const PoolSet set = pool.Read();
    std::vector<DivergenceRow> rows;
    for (const HypothesisPool& p : set.pools) {
      const auto lps = p.ReferenceLogProbs();
      const WeightVector mc = EmpiricalWeights(p);
      const WeightVector mb = ModelBasedWeights(p);
      const auto restricted = [&](const WeightVector& w) {
        if (tail_from_logprobs) return RestrictedDistribution::WithTailFromPool(p, w);
        return RestrictedDistribution(w, tail_mass ? *tail_mass : 0.0);
      };
      const RestrictedDistribution dmc = restricted(mc);
      const RestrictedDistribution dmb = restricted(mb);
      DivergenceRow row;
      row.id = p.source_id();
      row.references = p.references().size();
      row.total_samples = p.total_samples();
      row.tail_mass = dmc.tail_mass();
      row.kl_mc = KlRestricted(dmc, lps);
      row.kl_mb = KlRestricted(dmb, lps);
      row.kl_mb_closed_form = KlModelBasedClosedForm(p);
      row.jsd_mc = JsdRestricted(dmc, lps);
      row.jsd_mb = JsdRestricted(dmb, lps);
      rows.push_back(row);
    }
    Output out(output);
    WriteDivergenceCsv(out.get(), rows);
    return 0;
  }
};

// ---- simulate-zipf ----

struct ZipfCommand {
  ZipfConfig config;
  std::vector<std::size_t> samples{100};
  std::string output;

  void Add(CLI::App* app) {
    app->add_option("--exponent", config.exponent, "Zipf exponent a (> 1)");
    app->add_option("--domain-size", config.domain_size, "Number of ranks");
    app->add_option("--samples-per-run", samples, "One or more sample counts")->delimiter(',');
    app->add_option("--runs", config.runs, "Independent runs per sample count");
    app->add_option("--seed", config.seed, "Base seed");
    app->add_option("--threads", config.threads, "Worker threads");
    app->add_option("-o,--output", output, "CSV path (default stdout)");
  }

  int Run() const {
    Output out(output);
    bool header = true;
    for (std::size_t n : samples) {
      ZipfConfig c = config;
      c.samples_per_run = n;
      const ZipfResult r = RunZipf(c);
      if (r.violations != 0) {
        throw InvariantError(std::to_string(r.violations) + " runs with KL_mb > KL_mc");
      }
      WriteZipfCsv(out.get(), c, r, header);
      header = false;
    }
    return 0;
  }
};

// ---- sweep ----

struct SweepCommand {
  std::string mode = "divergence";
  LMFlags lm;
  SamplerFlags sampler;
  SweepConfig config;
  std::string utility = "bleu";
  std::string output;

  void Add(CLI::App* app) {
    app->add_option("--mode", mode, "divergence | quality")
        ->check(CLI::IsMember({"divergence", "quality"}));
    lm.Add(app, false);
    sampler.algorithm = "epsilon";
    sampler.Add(app);
    app->add_option("--sizes", config.sizes, "Sample sizes, ascending")->delimiter(',');
    app->add_option("--inputs", config.inputs, "Synthetic inputs (one LM each unless --lm)");
    app->add_option("--seed", config.seed, "Base seed");
    app->add_option("--budget", config.budget, "Enumeration budget per LM");
    app->add_option("--threads", config.threads, "Worker threads");
    app->add_option("--utility", utility, "Quality mode: bleu | chrf | f1");
    app->add_option("-o,--output", output, "CSV path (default stdout)");
  }

  int Run() {
    config.lm.fixed = lm.Fixed();
    config.lm.random = lm.random;
    config.sampler = sampler.Get();
    Output out(output);
    if (mode == "divergence") {
      const SweepReport r = RunDivergenceSweep(config);
      for (const SweepRow& row : r.rows) {
        if (row.dominance_violations != 0) throw InvariantError("KL_mb > KL_mc in sweep");
      }
      WriteSweepCsv(out.get(), r);
    } else {
      WriteQualityCsv(out.get(), RunQualityCorrelation(config, ParseUtility(utility)));
    }
    return 0;
  }
};

// ---- toylm ----

struct ToyLMCommand {
  LMFlags lm;
  SamplerFlags sampler;
  std::size_t n = 10;
  std::uint64_t seed = 0;
  std::string id = "toy";
  std::size_t budget = 1'000'000;
  std::vector<std::string> texts;
  std::string output;

  void Add(CLI::App* app) {
    app->require_subcommand(1);
    auto* sample = app->add_subcommand("sample", "Draw sequences as sample records");
    lm.Add(sample, true);
    sampler.Add(sample);
    sample->add_option("-n", n, "Number of sequences");
    sample->add_option("--seed", seed, "Sampling seed");
    sample->add_option("--id", id, "id written on every record");
    sample->add_option("-o,--output", output, "Output path (default stdout)");

    auto* enumerate = app->add_subcommand("enumerate", "List the full support as CSV");
    lm.Add(enumerate, true);
    enumerate->add_option("--budget", budget, "Maximum number of sequences");
    enumerate->add_option("-o,--output", output, "Output path (default stdout)");

    auto* logprob = app->add_subcommand("logprob", "Score space-separated symbol sequences");
    lm.Add(logprob, true);
    logprob->add_option("texts", texts, "Sequences (empty string for immediate EOS)")->required();

    auto* generate = app->add_subcommand("generate", "Write a random toy LM config");
    lm.Add(generate, true);
    generate->add_option("-o,--output", output, "Output path (default stdout)");
  }

  int Run(CLI::App* app) {
    const ToyLM model = lm.Get();
    if (app->got_subcommand("sample")) {
      SamplerConfig c = sampler.Get();
      c.seed = seed;
      const HypothesisPool pool =
          HypothesisPool::Build(SampleSequences(model, c, n), PoolOptions{.source_id = id});
      Output out(output);
      WriteSamples(out.get(), std::span<const HypothesisPool>(&pool, 1));
    } else if (app->got_subcommand("enumerate")) {
      Output out(output);
      out.get() << "format_version,text,logprob,probability\n";
      for (const auto& e : Enumerate(model, budget)) {
        out.get() << kFormatVersion << ',' << CsvEscape(e.text) << ',' << FormatDouble(e.logprob.value())
                  << ',' << FormatDouble(e.logprob.Probability()) << '\n';
      }
    } else if (app->got_subcommand("logprob")) {
      std::cout << "format_version,text,logprob\n";
      for (const auto& t : texts) {
        std::cout << kFormatVersion << ',' << CsvEscape(t) << ','
                  << FormatDouble(TextLogProb(model, t).value()) << '\n';
      }
    } else {
      Output out(output);
      WriteToyLM(out.get(), model);
    }
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum Bayes risk decoding with model-based and Monte Carlo estimates"};
  app.require_subcommand(1);

  SelectCommand select;
  select.Add(app.add_subcommand("select", "Pick one hypothesis per id under each decision rule"));
  DivergenceCommand divergence;
  divergence.Add(app.add_subcommand("divergence", "KL and JSD of the estimates to the model"));
  ZipfCommand zipf;
  zipf.Add(app.add_subcommand("simulate-zipf", "Monte Carlo vs model-based KL on a Zipf law"));
  SweepCommand sweep;
  sweep.Add(app.add_subcommand("sweep", "Toy-LM divergence or quality sweep"));
  ToyLMCommand toylm;
  CLI::App* toylm_app = app.add_subcommand("toylm", "Sample, enumerate or score a toy LM");
  toylm.Add(toylm_app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand("select")) return select.Run();
    if (app.got_subcommand("divergence")) return divergence.Run();
    if (app.got_subcommand("simulate-zipf")) return zipf.Run();
    if (app.got_subcommand("sweep")) return sweep.Run();
    return toylm.Run(toylm_app);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const InvariantError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
}

//
// Copyright 2026 The shuffledp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//


#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.h"

namespace {

using namespace shuffledp;
using namespace shuffledp::cli;

const std::map<std::string, Fidelity> kFidelities = {{"messages", Fidelity::kMessages},
                                                     {"tally", Fidelity::kTally}};

void AddParamOptions(CLI::App* cmd, ParamSpec& spec) {
  cmd->add_option("--eps", spec.eps, "privacy budget epsilon")->capture_default_str();
  cmd->add_option("--rho", spec.rho, "derivation knob in (0, 1/2]")->capture_default_str();
  cmd->add_option("--n", spec.n, "number of users")->capture_default_str();
  cmd->add_option("--eps-prime", spec.eps_prime, "noise budget (explicit parameters)");
  cmd->add_option("--q", spec.q, "drop probability (explicit parameters)");
  cmd->add_option("--s", spec.s, "padding count (default: minimal)");
  cmd->add_option("--lambda", spec.lambda, "flooding rate (default: minimal)");
}

void AddFidelity(CLI::App* cmd, Fidelity& fidelity) {
  cmd->add_option("--fidelity", fidelity, "messages or tally")
      ->transform(CLI::CheckedTransformer(kFidelities, CLI::ignore_case));
}

// Audits default to eps' = eps / 2 and q = 0.01.
void AuditDefaults(ParamSpec& spec) {
  if (!spec.eps_prime) spec.eps_prime = spec.eps / 2.0;
  if (!spec.q) spec.q = 0.01;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pure-DP shuffle-model counting, summation and histograms"};
  app.set_config("--config", "", "TOML/INI file with option values");
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  std::string format = "json";
  std::optional<std::string> output;
  app.add_option("--seed", common.seed, "random seed")->envname("SHUFFLEDP_SEED");
  app.add_option("--format", format, "report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_option("--output", output, "write the report here instead of stdout");
  app.add_option("--threads", common.threads, "worker threads for trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  ParamSpec params_spec;
  CLI::App* params = app.add_subcommand("params", "derive and check protocol parameters");
  AddParamOptions(params, params_spec);

  CLI::App* run = app.add_subcommand("run", "run a protocol");
  run->require_subcommand(1);
  run->fallthrough();
  RunOptions count_options;
  CLI::App* count = run->add_subcommand("count", "binary counting");
  AddParamOptions(count, count_options.spec);
  AddFidelity(count, count_options.fidelity);
  count->add_option("--trials", count_options.trials)->capture_default_str();
  count->add_option("--ones", count_options.ones, "users holding 1 (default: all)");
  count->add_option("--input", count_options.input, "file of 0/1 inputs");
  count->add_option("--dump-messages", count_options.dump_messages,
                    "write trial 0's shuffled batch (binary wire format)");

  RunOptions sum_options;
  sum_options.fidelity = Fidelity::kTally;
  CLI::App* realsum = run->add_subcommand("realsum", "summation of reals in [0, 1]");
  AddParamOptions(realsum, sum_options.spec);
  AddFidelity(realsum, sum_options.fidelity);
  realsum->add_option("--trials", sum_options.trials)->capture_default_str();
  realsum->add_option("--input", sum_options.input, "file of reals in [0, 1]");
  realsum->add_option("--bits", sum_options.bits, "precision k (default: ceil(log2 n))");
  realsum->add_option("--on-infeasible", sum_options.on_infeasible,
                      "fail, or estimate infeasible bits by n/2")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, InfeasibleInstance>{
              {"fail", InfeasibleInstance::kThrow},
              {"public-constant", InfeasibleInstance::kPublicConstant}},
          CLI::ignore_case));

  RunOptions hist_options;
  hist_options.fidelity = Fidelity::kTally;
  CLI::App* histogram = run->add_subcommand("histogram", "histogram over B buckets");
  AddParamOptions(histogram, hist_options.spec);
  AddFidelity(histogram, hist_options.fidelity);
  histogram->add_option("--trials", hist_options.trials)->capture_default_str();
  histogram->add_option("--buckets", hist_options.buckets)->capture_default_str();
  histogram->add_option("--input", hist_options.input, "file of bucket ids in [0, B)");
  histogram->add_option("--dump-messages", hist_options.dump_messages,
                        "write trial 0's shuffled tagged messages as tag,sign lines");

  CLI::App* audit = app.add_subcommand("audit", "numerical checks");
  audit->require_subcommand(1);
  audit->fallthrough();
  LemmaOptions lemma_options;
  CLI::App* lemmas = audit->add_subcommand("lemmas", "noise and flooding ratio inequalities");
  AddParamOptions(lemmas, lemma_options.spec);
  lemmas->add_option("--geo-i-max", lemma_options.geo_i_max)->capture_default_str();
  lemmas->add_option("--poi-i-max", lemma_options.poi_i_max,
                     "default: ceil(lambda + 20 sqrt(lambda) + s)");

  DivergenceOptions div_options;
  div_options.spec.n = 3;
  CLI::App* divergence = audit->add_subcommand("divergence", "exact max-divergence audit");
  AddParamOptions(divergence, div_options.spec);
  divergence->add_option("--coverage", div_options.audit.coverage)->capture_default_str();
  divergence->add_option("--mass-floor", div_options.audit.mass_floor)->capture_default_str();
  divergence->add_option("--tolerance", div_options.audit.tolerance)->capture_default_str();
  divergence->add_option("--grid-cap", div_options.audit.grid_cap)->capture_default_str();

  MseOptions mse_options;
  CLI::App* mse = audit->add_subcommand("mse", "Monte Carlo MSE against the exact law");
  AddParamOptions(mse, mse_options.spec);
  AddFidelity(mse, mse_options.fidelity);
  mse->add_option("--ones", mse_options.ones, "users holding 1 (default: all)");
  mse->add_option("--trials", mse_options.trials)->capture_default_str();

  CommOptions comm_options;
  CLI::App* comm = audit->add_subcommand("comm", "messages per user against the exact mean");
  AddParamOptions(comm, comm_options.spec);
  comm->add_option("--x", comm_options.x, "the user's input bit")
      ->check(CLI::Range(0, 1))
      ->capture_default_str();
  comm->add_option("--trials", comm_options.trials)->capture_default_str();

  BenchOptions bench_options;
  bench_options.spec.n = 1000;
  CLI::App* bench = app.add_subcommand("bench", "time counting runs");
  AddParamOptions(bench, bench_options.spec);
  AddFidelity(bench, bench_options.fidelity);
  bench->add_option("--trials", bench_options.trials)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  common.format = format == "csv" ? Format::kCsv : Format::kJson;

  Result result;
  if (params->parsed()) {
    result = Guard([&] { return CmdParams(params_spec, common); });
  } else if (count->parsed()) {
    count_options.n_given = count->count("--n") > 0;
    result = Guard([&] { return CmdRunCount(count_options, common); });
  } else if (realsum->parsed()) {
    sum_options.n_given = realsum->count("--n") > 0;
    result = Guard([&] { return CmdRunRealSum(sum_options, common); });
  } else if (histogram->parsed()) {
    hist_options.n_given = histogram->count("--n") > 0;
    result = Guard([&] { return CmdRunHistogram(hist_options, common); });
  } else if (lemmas->parsed()) {
    AuditDefaults(lemma_options.spec);
    result = Guard([&] { return CmdAuditLemmas(lemma_options, common); });
  } else if (divergence->parsed()) {
    AuditDefaults(div_options.spec);
    result = Guard([&] { return CmdAuditDivergence(div_options, common); });
  } else if (mse->parsed()) {
    AuditDefaults(mse_options.spec);
    result = Guard([&] { return CmdAuditMse(mse_options, common); });
  } else if (comm->parsed()) {
    AuditDefaults(comm_options.spec);
    result = Guard([&] { return CmdAuditComm(comm_options, common); });
  } else if (bench->parsed()) {
    result = Guard([&] { return CmdBench(bench_options, common); });
  }

  if (!result.output.empty()) {
    if (output) {
      std::ofstream out(*output, std::ios::binary);
      out << result.output;
      if (!out) {
        std::cerr << "shuffledp: cannot write " << *output << "\n";
        return kUsage;
      }
    } else {
      std::cout << result.output;
    }
  }
  if (!result.message.empty()) std::cerr << "shuffledp: " << result.message << "\n";
  return result.code;
}

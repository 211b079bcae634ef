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


// Command implementations behind the shuffledp binary. Each command returns
// its exit code and report text instead of printing, so the same code paths
// can be driven from tests.

#ifndef SHUFFLEDP_TOOLS_COMMANDS_H_
#define SHUFFLEDP_TOOLS_COMMANDS_H_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "shuffledp/audit.h"
#include "shuffledp/composition.h"
#include "shuffledp/errors.h"
#include "shuffledp/parallel.h"
#include "shuffledp/params.h"
#include "shuffledp/protocol.h"
#include "shuffledp/random.h"
#include "shuffledp/report.h"

namespace shuffledp::cli {

enum ExitCode : int { kOk = 0, kFail = 1, kUsage = 2, kInconclusive = 3 };

enum class Format { kJson, kCsv };

struct Result {
  int code = kOk;
  std::string output;   // the report
  std::string message;  // diagnostics for stderr
};

struct Common {
  std::optional<uint64_t> seed;
  Format format = Format::kJson;
  int threads = 1;
};

// Either derived from (eps, rho, n) or given explicitly. Explicit mode starts
// as soon as eps_prime or q is set; missing s and lambda then default to
// their minimal admissible values.
struct ParamSpec {
  double eps = 1.0;
  double rho = 0.5;
  int64_t n = 100;
  std::optional<double> eps_prime;
  std::optional<double> q;
  std::optional<int64_t> s;
  std::optional<double> lambda;
};

// q used to fill in s and lambda when the explicit q admits no finite
// padding (q = 0).
inline constexpr double kFallbackQ = 0.01;

inline ProtocolParams ResolveParams(const ParamSpec& spec) {
  const bool explicit_mode = spec.eps_prime || spec.q || spec.s || spec.lambda;
  if (!explicit_mode) return DeriveParams(spec.eps, spec.rho, spec.n);
  if (!spec.eps_prime || !spec.q) {
    throw ParameterError("explicit parameters need both --eps-prime and --q");
  }
  ProtocolParams p;
  p.n = spec.n;
  p.eps = spec.eps;
  p.eps_prime = *spec.eps_prime;
  p.q = *spec.q;
  if (spec.s) {
    p.s = *spec.s;
  } else {
    const double fill_q = *spec.q > 0.0 ? *spec.q : kFallbackQ;
    p.s = MinimalParams(spec.eps, *spec.eps_prime, fill_q, spec.n).s;
  }
  if (spec.lambda) {
    p.lambda = *spec.lambda;
  } else {
    if (!(p.eps_prime > 0.0 && p.eps_prime < p.eps)) {
      throw ParameterError("need 0 < eps_prime < eps to pick a default lambda");
    }
    p.lambda = MinimalFlooding(p.eps, p.eps_prime, p.s);
  }
  return p;
}

// --- formatting -----------------------------------------------------------------

inline std::string ViolationText(const ConditionReport& report) {
  std::string out = "parameters violate the privacy condition:";
  for (const Violation& v : report.violations) {
    out += std::string(" [") + ClauseName(v.clause) + "] " + v.detail + ";";
  }
  return out;
}

inline std::string CsvCell(const Json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_array()) {
    std::string out;
    for (size_t k = 0; k < value.size(); ++k) {
      if (k) out += ';';
      out += CsvCell(value[k]);
    }
    return out;
  }
  return value.dump();
}

inline void FlattenScalars(const Json& object, const std::string& prefix, Json& out) {
  for (const auto& [key, value] : object.items()) {
    if (value.is_object()) {
      FlattenScalars(value, prefix + key + ".", out);
    } else {
      out[prefix + key] = value;
    }
  }
}

// A "# {meta}" comment line, a header and one row per record.
inline std::string ToCsv(const Json& meta, const std::vector<Json>& rows) {
  std::ostringstream os;
  os << "# " << meta.dump() << '\n';
  if (rows.empty()) return os.str();
  Json first;
  FlattenScalars(rows.front(), "", first);
  bool head = true;
  for (const auto& [key, value] : first.items()) {
    os << (head ? "" : ",") << key;
    head = false;
  }
  os << '\n';
  for (const Json& row : rows) {
    Json flat;
    FlattenScalars(row, "", flat);
    head = true;
    for (const auto& [key, value] : flat.items()) {
      os << (head ? "" : ",") << CsvCell(value);
      head = false;
    }
    os << '\n';
  }
  return os.str();
}

inline std::string Render(const Json& report, const std::vector<Json>& rows,
                          Format format) {
  if (format == Format::kJson) return report.dump(2) + "\n";
  Json meta = report;
  return ToCsv(meta, rows);
}

inline uint64_t RequireSeed(const Common& common) {
  if (!common.seed) {
    throw ParameterError("a seed is required (--seed or SHUFFLEDP_SEED)");
  }
  return *common.seed;
}

inline const char* FidelityName(Fidelity f) {
  return f == Fidelity::kMessages ? "messages" : "tally";
}

// --- input files ------------------------------------------------------------------

// Whitespace-separated values; '#' starts a comment.
template <typename T>
std::vector<T> ReadValues(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file " + path);
  std::vector<T> values;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = line.substr(0, line.find('#'));
    std::istringstream fields(line);
    std::string token;
    while (fields >> token) {
      std::istringstream parse(token);
      T value;
      if (!(parse >> value) || !parse.eof()) {
        throw InputError(path + ":" + std::to_string(line_no) + ": malformed value '" +
                         token + "'");
      }
      values.push_back(value);
    }
  }
  return values;
}

inline int64_t ResolveUsers(int64_t n, size_t from_file, bool have_file,
                            bool n_given) {
  if (!have_file) return n;
  if (n_given && static_cast<size_t>(n) != from_file) {
    throw InputError("--n disagrees with the number of values in the input file");
  }
  return static_cast<int64_t>(from_file);
}

// --- params -----------------------------------------------------------------------

inline Result CmdParams(const ParamSpec& spec, const Common& common) {
  const ProtocolParams p = ResolveParams(spec);
  Json report;
  report["command"] = "params";
  report["params"] = ToJson(p);
  report["expected_messages_per_user"] = {{"x0", ExpectedMessagesPerUser(p, 0)},
                                          {"x1", ExpectedMessagesPerUser(p, 1)}};
  report["exact_mse_all_ones"] = ExactMse(p, p.n);
  const ConditionReport condition = CheckCondition(p);
  Result result;
  result.output = Render(report, {report["params"]}, common.format);
  if (!condition.ok()) {
    result.code = kFail;
    result.message = ViolationText(condition);
  }
  return result;
}

// --- run ----------------------------------------------------------------------------

struct RunOptions {
  ParamSpec spec;
  bool n_given = false;
  int64_t trials = 1;
  Fidelity fidelity = Fidelity::kMessages;
  std::optional<std::string> input;
  std::optional<std::string> dump_messages;
  // count
  std::optional<int64_t> ones;
  // realsum
  std::optional<int> bits;
  InfeasibleInstance on_infeasible = InfeasibleInstance::kThrow;
  // histogram
  int64_t buckets = 8;
};

inline Json SummarizeErrors(const std::vector<double>& errors) {
  std::vector<double> squared;
  for (double e : errors) squared.push_back(e * e);
  const SampleSummary err = Summarize(errors);
  const SampleSummary sq = Summarize(squared);
  return {{"mean_error", err.mean}, {"mean_error_se", err.standard_error},
          {"mse", sq.mean}, {"mse_se", sq.standard_error}};
}

inline void RequireTrials(int64_t trials) {
  if (trials < 1) throw ParameterError("trials must be >= 1");
}

inline Result CmdRunCount(const RunOptions& options, const Common& common) {
  const uint64_t seed = RequireSeed(common);
  RequireTrials(options.trials);
  std::vector<InputBit> xs;
  ParamSpec spec = options.spec;
  if (options.input) {
    for (int v : ReadValues<int>(*options.input)) xs.push_back(InputBit(v));
    spec.n = ResolveUsers(spec.n, xs.size(), true, options.n_given);
  } else {
    const int64_t ones = options.ones.value_or(spec.n);
    if (ones < 0 || ones > spec.n) throw ParameterError("--ones must lie in [0, n]");
    xs = MakeInputs(ones, spec.n - ones);
  }
  const ProtocolParams p = ResolveParams(spec);
  const ConditionReport condition = CheckCondition(p);
  if (!condition.ok()) return {kFail, "", ViolationText(condition)};

  const RandomSource rng(seed);
  std::vector<Json> rows(static_cast<size_t>(options.trials));
  std::vector<double> errors(rows.size());
  std::vector<uint8_t> dump;
  ParallelFor(options.trials, common.threads, [&](int64_t t) {
    RandomSource trial_rng = rng.Fork(static_cast<uint64_t>(t));
    const CountingRun run = RunCounting(xs, p, trial_rng, options.fidelity);
    int64_t most = 0;
    for (const Contribution& c : run.contributions) most = std::max(most, c.TotalMessages());
    errors[t] = static_cast<double>(run.estimate - run.true_count);
    rows[t] = {{"trial", t},
               {"estimate", run.estimate},
               {"true_count", run.true_count},
               {"error", run.estimate - run.true_count},
               {"v_plus", run.view.v_plus},
               {"v_minus", run.view.v_minus},
               {"mean_messages_per_user", run.MeanMessagesPerUser()},
               {"max_messages_per_user", most}};
  });
  if (options.dump_messages) {
    if (options.fidelity != Fidelity::kMessages) {
      throw ParameterError("--dump-messages needs --fidelity messages");
    }
    // Replays trial 0; every stream is keyed, so this is the same run.
    RandomSource trial_rng = rng.Fork(0);
    const CountingRun run = RunCounting(xs, p, trial_rng, Fidelity::kMessages);
    std::vector<MessageBit> messages;
    for (const Contribution& c : run.contributions) AppendMessages(c, messages);
    RandomSource shuffler_rng = trial_rng.Fork(kShufflerStream);
    std::ofstream out(*options.dump_messages, std::ios::binary);
    const std::vector<uint8_t> bytes = EncodeBatch(Shuffle(run.contributions, shuffler_rng).messages);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("cannot write " + *options.dump_messages);
  }
  Json report;
  report["command"] = "run count";
  report["seed"] = seed;
  report["fidelity"] = FidelityName(options.fidelity);
  report["trials"] = options.trials;
  report["params"] = ToJson(p);
  report["true_count"] = rows.front()["true_count"];
  report["summary"] = SummarizeErrors(errors);
  report["exact_mse"] = ExactMse(p, rows.front()["true_count"].get<int64_t>());
  if (common.format == Format::kCsv) return {kOk, Render(report, rows, common.format), ""};
  report["results"] = rows;
  return {kOk, Render(report, rows, common.format), ""};
}

inline Json ToJson(const BitInstance& b) {
  return {{"bit", b.bit},
          {"place_value", PlaceValue(b.bit)},
          {"budget", b.budget},
          {"public_constant", !b.params.has_value()},
          {"params", b.params ? ToJson(*b.params) : Json(nullptr)}};
}

inline int DefaultBits(int64_t n) {
  return std::max(1, static_cast<int>(std::ceil(std::log2(static_cast<double>(n)))));
}

inline Result CmdRunRealSum(const RunOptions& options, const Common& common) {
  const uint64_t seed = RequireSeed(common);
  RequireTrials(options.trials);
  std::vector<double> xs;
  int64_t n = options.spec.n;
  if (options.input) {
    xs = ReadValues<double>(*options.input);
    n = ResolveUsers(n, xs.size(), true, options.n_given);
  } else {
    if (n < 1) throw ParameterError("n must be >= 1");
    for (int64_t i = 0; i < n; ++i) xs.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(n));
  }
  const int bits = options.bits.value_or(DefaultBits(n));
  const std::vector<BitInstance> plan =
      PlanRealSum(n, options.spec.eps, options.spec.rho, bits, options.on_infeasible);
  double budget_total = 0.0;
  Json bit_reports = Json::array();
  for (const BitInstance& b : plan) {
    budget_total += b.budget;
    bit_reports.push_back(ToJson(b));
  }

  const RandomSource rng(seed);
  const RealSumOptions run_options{options.fidelity, options.on_infeasible};
  std::vector<Json> rows(static_cast<size_t>(options.trials));
  std::vector<double> errors(rows.size());
  ParallelFor(options.trials, common.threads, [&](int64_t t) {
    RandomSource trial_rng = rng.Fork(static_cast<uint64_t>(t));
    const RealSumRun run = RunRealSum(xs, options.spec.eps, options.spec.rho, bits, trial_rng, run_options);
    Json columns = Json::array();
    for (const BitInstance& b : run.instances) columns.push_back(b.count_estimate);
    errors[t] = run.estimate - run.true_sum;
    rows[t] = {{"trial", t},
               {"estimate", run.estimate},
               {"true_sum", run.true_sum},
               {"rounded_sum", run.rounded_sum},
               {"error", run.estimate - run.true_sum},
               {"mean_messages_per_user", run.mean_messages_per_user},
               {"column_estimates", columns}};
  });
  if (options.dump_messages) {
    throw ParameterError("--dump-messages is supported for run histogram and run count");
  }
  Json report;
  report["command"] = "run realsum";
  report["seed"] = seed;
  report["fidelity"] = FidelityName(options.fidelity);
  report["trials"] = options.trials;
  report["n"] = n;
  report["eps"] = options.spec.eps;
  report["rho"] = options.spec.rho;
  report["bits"] = bits;
  report["tag_width"] = TagWidth(bits);
  report["budget_total"] = budget_total;
  report["instances"] = bit_reports;
  report["summary"] = SummarizeErrors(errors);
  report["rmse_bound"] = RealSumRmseBound(xs, plan);
  if (common.format == Format::kJson) report["results"] = rows;
  return {kOk, Render(report, rows, common.format), ""};
}

inline Result CmdRunHistogram(const RunOptions& options, const Common& common) {
  const uint64_t seed = RequireSeed(common);
  RequireTrials(options.trials);
  std::vector<int64_t> xs;
  int64_t n = options.spec.n;
  if (options.input) {
    xs = ReadValues<int64_t>(*options.input);
    n = ResolveUsers(n, xs.size(), true, options.n_given);
  } else {
    if (n < 1) throw ParameterError("n must be >= 1");
    if (options.buckets < 1) throw ParameterError("bucket count must be >= 1");
    for (int64_t i = 0; i < n; ++i) xs.push_back(i % options.buckets);
  }
  const std::vector<int64_t> truth = TrueHistogram(xs, options.buckets);
  const RandomSource rng(seed);
  std::vector<Json> rows(static_cast<size_t>(options.trials));
  std::vector<HistogramRun> runs(rows.size());
  ParallelFor(options.trials, common.threads, [&](int64_t t) {
    RandomSource trial_rng = rng.Fork(static_cast<uint64_t>(t));
    runs[t] = RunHistogram(xs, options.buckets, options.spec.eps, options.spec.rho, trial_rng,
                           options.fidelity);
    rows[t] = {{"trial", t},
               {"counts", runs[t].estimate.counts},
               {"linf_error", runs[t].estimate.LInfError(truth)},
               {"total", runs[t].estimate.Total()},
               {"mean_messages_per_user", runs[t].mean_messages_per_user}};
  });
  if (options.dump_messages) {
    if (options.fidelity != Fidelity::kMessages) {
      throw ParameterError("--dump-messages needs --fidelity messages");
    }
    std::vector<std::vector<InputBit>> columns(
        static_cast<size_t>(options.buckets), std::vector<InputBit>(static_cast<size_t>(n)));
    for (int64_t i = 0; i < n; ++i) columns[xs[i]][i] = InputBit(1);
    const std::vector<std::optional<ProtocolParams>> params(
        static_cast<size_t>(options.buckets), runs.front().params);
    RandomSource trial_rng = rng.Fork(0);
    const InstanceViews views =
        RunTaggedInstances(columns, params, trial_rng, Fidelity::kMessages, true);
    std::ofstream out(*options.dump_messages);
    out << FormatTaggedMessages(views.shuffled);
    if (!out) throw InputError("cannot write " + *options.dump_messages);
  }
  std::vector<double> linf;
  for (const HistogramRun& r : runs) linf.push_back(r.estimate.LInfError(truth));
  const SampleSummary linf_summary = Summarize(linf);
  Json report;
  report["command"] = "run histogram";
  report["seed"] = seed;
  report["fidelity"] = FidelityName(options.fidelity);
  report["trials"] = options.trials;
  report["n"] = n;
  report["buckets"] = options.buckets;
  report["tag_width"] = TagWidth(options.buckets);
  report["budget_per_bucket"] = runs.front().budget_per_bucket;
  report["params"] = ToJson(runs.front().params);
  report["truth"] = truth;
  report["summary"] = {{"mean_linf_error", linf_summary.mean},
                       {"mean_linf_error_se", linf_summary.standard_error}};
  if (common.format == Format::kJson) report["results"] = rows;
  return {kOk, Render(report, rows, common.format), ""};
}

// --- audits ---------------------------------------------------------------------------

struct LemmaOptions {
  ParamSpec spec;
  int64_t geo_i_max = 10000;
  std::optional<int64_t> poi_i_max;
};

inline Result CmdAuditLemmas(const LemmaOptions& options, const Common& common) {
  const ProtocolParams p = ResolveParams(options.spec);
  const InequalityCheck geo = CheckGeoRatio(p.eps_prime, options.geo_i_max);
  const InequalityCheck poi = CheckPoiRatio(p, options.poi_i_max.value_or(DefaultPoiRatioRange(p)));
  const bool pass = geo.holds && poi.holds;
  Json report;
  report["command"] = "audit lemmas";
  report["params"] = ToJson(p);
  report["geo_ratio"] = ToJson(geo);
  report["poi_ratio"] = ToJson(poi);
  report["pass"] = pass;
  std::vector<Json> rows = {{{"check", "geo_ratio"}, {"holds", geo.holds},
                             {"min_slack", Number(geo.min_slack)}, {"worst_index", geo.worst_index},
                             {"i_max", geo.i_max}},
                            {{"check", "poi_ratio"}, {"holds", poi.holds},
                             {"min_slack", Number(poi.min_slack)}, {"worst_index", poi.worst_index},
                             {"i_max", poi.i_max}}};
  return {pass ? kOk : kFail, Render(report, rows, common.format), ""};
}

struct DivergenceOptions {
  ParamSpec spec;
  AuditOptions audit;
};

inline Result CmdAuditDivergence(const DivergenceOptions& options, const Common& common) {
  const ProtocolParams p = ResolveParams(options.spec);
  try {
    const AuditReport audit = DivergenceAudit(p.n, p, options.audit);
    Json report = ToJson(audit);
    report["command"] = "audit divergence";
    std::string message;
    if (audit.support_mismatch) message = "support mismatch: the log ratio is unbounded";
    return {audit.pass ? kOk : kFail, Render(report, {report}, common.format), message};
  } catch (const AuditInconclusiveError& e) {
    Json report;
    report["command"] = "audit divergence";
    report["params"] = ToJson(p);
    report["pass"] = false;
    report["inconclusive"] = true;
    report["reason"] = e.what();
    return {kInconclusive, Render(report, {}, common.format), e.what()};
  }
}

struct MseOptions {
  ParamSpec spec;
  std::optional<int64_t> ones;
  int64_t trials = kMinTrials;
  Fidelity fidelity = Fidelity::kMessages;
};

inline Result CmdAuditMse(const MseOptions& options, const Common& common) {
  const uint64_t seed = RequireSeed(common);
  const ProtocolParams p = ResolveParams(options.spec);
  const ConditionReport condition = CheckCondition(p);
  if (!condition.ok()) return {kFail, "", ViolationText(condition)};
  const int64_t ones = options.ones.value_or(p.n);
  if (ones < 0 || ones > p.n) throw ParameterError("--ones must lie in [0, n]");
  const MseReport mse = MeasureMse(p, {p.n - ones, ones}, options.trials, RandomSource(seed),
                                   options.fidelity, common.threads);
  const double margin = 3.0 * mse.standard_error;
  const bool matches_exact = std::fabs(mse.empirical_mse - mse.exact) <= margin;
  const bool under_bound = mse.empirical_mse <= mse.lemma_bound + margin;
  Json report = ToJson(mse);
  report["command"] = "audit mse";
  report["seed"] = seed;
  report["fidelity"] = FidelityName(options.fidelity);
  report["checks"] = {{"within_3se_of_exact", matches_exact},
                      {"within_lemma_bound_plus_3se", under_bound}};
  report["pass"] = matches_exact && under_bound;
  std::vector<Json> rows;
  if (common.format == Format::kCsv) {
    for (size_t t = 0; t < mse.errors.size(); ++t) {
      rows.push_back({{"trial", t}, {"error", mse.errors[t]}});
    }
  }
  return {matches_exact && under_bound ? kOk : kFail, Render(report, rows, common.format), ""};
}

struct CommOptions {
  ParamSpec spec;
  int x = 1;
  int64_t trials = kMinTrials;
};

inline Result CmdAuditComm(const CommOptions& options, const Common& common) {
  const uint64_t seed = RequireSeed(common);
  const ProtocolParams p = ResolveParams(options.spec);
  const ConditionReport condition = CheckCondition(p);
  if (!condition.ok()) return {kFail, "", ViolationText(condition)};
  const CommReport comm = MeasureComm(p, InputBit(options.x), options.trials, RandomSource(seed),
                                      common.threads);
  const bool matches_exact =
      std::fabs(comm.empirical_mean - comm.exact) <= 3.0 * comm.standard_error;
  const bool under_corrected = comm.exact <= comm.flooding_corrected_bound;
  Json report = ToJson(comm);
  report["command"] = "audit comm";
  report["seed"] = seed;
  report["checks"] = {{"within_3se_of_exact", matches_exact},
                      {"exact_within_flooding_corrected_bound", under_corrected},
                      {"exact_within_lemma_bound", comm.exact <= comm.lemma_bound}};
  report["pass"] = matches_exact && under_corrected;
  std::vector<Json> rows;
  if (common.format == Format::kCsv) {
    for (size_t t = 0; t < comm.counts.size(); ++t) {
      rows.push_back({{"trial", t}, {"messages", comm.counts[t]}});
    }
  }
  return {matches_exact && under_corrected ? kOk : kFail, Render(report, rows, common.format), ""};
}

// --- bench ----------------------------------------------------------------------------

struct BenchOptions {
  ParamSpec spec;
  int64_t trials = 10;
  Fidelity fidelity = Fidelity::kMessages;
};

// Wall-clock timings; unlike every other report this one is not reproducible.
inline Result CmdBench(const BenchOptions& options, const Common& common) {
  const uint64_t seed = RequireSeed(common);
  RequireTrials(options.trials);
  const ProtocolParams p = ResolveParams(options.spec);
  const ConditionReport condition = CheckCondition(p);
  if (!condition.ok()) return {kFail, "", ViolationText(condition)};
  const std::vector<InputBit> xs = MakeInputs(p.n / 2, p.n - p.n / 2);
  const RandomSource rng(seed);
  std::vector<int64_t> messages(static_cast<size_t>(options.trials));
  const auto start = std::chrono::steady_clock::now();
  ParallelFor(options.trials, common.threads, [&](int64_t t) {
    RandomSource trial_rng = rng.Fork(static_cast<uint64_t>(t));
    const CountingRun run = RunCounting(xs, p, trial_rng, options.fidelity);
    messages[t] = run.view.v_plus + run.view.v_minus;
  });
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  int64_t total = 0;
  for (int64_t m : messages) total += m;
  Json report;
  report["command"] = "bench";
  report["seed"] = seed;
  report["fidelity"] = FidelityName(options.fidelity);
  report["threads"] = common.threads;
  report["trials"] = options.trials;
  report["params"] = ToJson(p);
  report["seconds"] = seconds;
  report["seconds_per_run"] = seconds / static_cast<double>(options.trials);
  report["messages"] = total;
  report["messages_per_second"] = seconds > 0 ? static_cast<double>(total) / seconds : 0.0;
  return {kOk, Render(report, {report}, common.format), ""};
}

// Maps library exceptions onto exit codes.
inline Result Guard(const std::function<Result()>& command) {
  try {
    return command();
  } catch (const AuditInconclusiveError& e) {
    return {kInconclusive, "", e.what()};
  } catch (const DegenerateInputError& e) {
    return {kFail, "", e.what()};
  } catch (const InfeasibleParamsError& e) {
    return {kFail, "", e.what()};
  } catch (const ParameterError& e) {
    return {kUsage, "", e.what()};
  } catch (const InputError& e) {
    return {kUsage, "", e.what()};
  }
}

}  // namespace shuffledp::cli

#endif  // SHUFFLEDP_TOOLS_COMMANDS_H_

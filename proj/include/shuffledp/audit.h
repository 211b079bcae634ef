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


// Numerical checks of the protocol's privacy, utility and communication
// guarantees: an exact oracle for the distribution of the analyzer's view,
// a max-divergence audit over a mass-covering grid, the two ratio
// inequalities the privacy argument rests on, and Monte Carlo harnesses for
// MSE and message counts.

#ifndef SHUFFLEDP_AUDIT_H_
#define SHUFFLEDP_AUDIT_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "shuffledp/distributions.h"
#include "shuffledp/errors.h"
#include "shuffledp/parallel.h"
#include "shuffledp/params.h"
#include "shuffledp/protocol.h"
#include "shuffledp/random.h"

namespace shuffledp {

// The view law depends on the inputs only through the number of zeros and
// ones.
struct DatasetSummary {
  int64_t n0 = 0;
  int64_t n1 = 0;

  int64_t n() const { return n0 + n1; }

  static DatasetSummary FromInputs(std::span<const InputBit> xs) {
    DatasetSummary ds;
    for (InputBit x : xs) {
      if (x.value()) {
        ++ds.n1;
      } else {
        ++ds.n0;
      }
    }
    return ds;
  }
};

// Exact PMF of the view (V+, V-) for a dataset.
//
// Writing a0, a1 for the number of zeros and ones whose input-dependent part
// was kept, W for the aggregate flooding count and G+, G- for the aggregate
// geometric noise,
//   V+ = (a0 + a1) s + a1 + W + G+,   V- = (a0 + a1) s + W + G-.
// For a fixed (a0, a1) the (W, G+, G-) part has PMF
//   H(u, v) = p^2 (1-p)^{u+v} sum_{w <= min(u,v)} Poi(lambda)(w) (1-p)^{-2w},
// a finite sum, so the oracle needs no truncation: the prefix sums over w
// are tabulated once and every cell costs one log-sum-exp over (a0, a1).
//
// q may be 0 here (the counterexample without dropping); LogPmf lazily
// grows an internal table and is therefore not safe to call concurrently on
// one instance.
class ViewDistribution {
 public:
  ViewDistribution(DatasetSummary ds, const ProtocolParams& params)
      : ds_(ds), s_(params.s), lambda_(params.lambda) {
    if (ds.n0 < 0 || ds.n1 < 0) throw ParameterError("negative dataset counts");
    if (!(params.q >= 0.0 && params.q < 1.0)) throw ParameterError("q must lie in [0, 1)");
    if (params.s < 0) throw ParameterError("s must be non-negative");
    internal::RequirePositive(params.lambda, "lambda");
    internal::RequirePositive(params.eps_prime, "eps_prime");
    log_p_ = std::log(params.NoiseP());
    log_1mp_ = -params.eps_prime;
    const double keep = 1.0 - params.q;
    for (int64_t a0 = 0; a0 <= ds.n0; ++a0) {
      const double w0 = BinomialLogPmf(ds.n0, keep, a0);
      if (w0 == kNegInf) continue;
      for (int64_t a1 = 0; a1 <= ds.n1; ++a1) {
        const double w1 = BinomialLogPmf(ds.n1, keep, a1);
        if (w1 == kNegInf) continue;
        terms_.push_back({w0 + w1, (a0 + a1) * s_ + a1, (a0 + a1) * s_});
      }
    }
  }

  const DatasetSummary& dataset() const { return ds_; }

  double LogPmf(int64_t i, int64_t j) const {
    LogSumAccumulator acc;
    for (const Term& t : terms_) {
      acc.Add(t.log_weight + LogH(i - t.plus_offset, j - t.minus_offset));
    }
    return acc.Result();
  }

  // Smallest offset any term puts on V+ / V-; the support starts there.
  int64_t MinPlusOffset() const {
    int64_t m = std::numeric_limits<int64_t>::max();
    for (const Term& t : terms_) m = std::min(m, t.plus_offset);
    return m;
  }

 private:
  struct Term {
    double log_weight;
    int64_t plus_offset;
    int64_t minus_offset;
  };

  double LogH(int64_t u, int64_t v) const {
    if (u < 0 || v < 0) return kNegInf;
    const int64_t m = std::min(u, v);
    while (static_cast<int64_t>(prefix_.size()) <= m) {
      const int64_t w = static_cast<int64_t>(prefix_.size());
      const double term = PoiLogPmf(lambda_, w) - 2.0 * static_cast<double>(w) * log_1mp_;
      prefix_.push_back(prefix_.empty() ? term : LogAddExp(prefix_.back(), term));
    }
    return 2.0 * log_p_ + static_cast<double>(u + v) * log_1mp_ + prefix_[m];
  }

  DatasetSummary ds_;
  int64_t s_;
  double lambda_;
  double log_p_ = 0.0;
  double log_1mp_ = 0.0;
  std::vector<Term> terms_;
  mutable std::vector<double> prefix_;
};

inline double ExactViewLogPmf(DatasetSummary ds, const ProtocolParams& params,
                              int64_t i, int64_t j) {
  return ViewDistribution(ds, params).LogPmf(i, j);
}

// --- divergence audit ---------------------------------------------------------

struct AuditOptions {
  double coverage = 1.0 - 1e-9;  // required mass of each view inside the grid
  double mass_floor = 1e-30;     // cells where both PMFs are below are skipped
  double tolerance = 1e-6;       // pass iff sup <= eps + tolerance
  int64_t grid_cap = 4096;       // largest square side tried before giving up
};

struct DirectionalSup {
  double value = kNegInf;
  int64_t i = -1;
  int64_t j = -1;
};

struct AuditReport {
  int64_t n = 0;
  ProtocolParams params;
  double eps_target = 0.0;
  DirectionalSup forward;   // d(V(X) || V(X'))
  DirectionalSup reverse;   // d(V(X') || V(X))
  double sup_abs_log_ratio = 0.0;
  bool support_mismatch = false;
  double mass_covered_x = 0.0;
  double mass_covered_xprime = 0.0;
  int64_t i_max = 0;
  int64_t j_max = 0;
  double excluded_mass_bound = 0.0;
  double tolerance = 0.0;
  double coverage = 0.0;
  bool pass = false;
};

// Audits the neighboring pair X = (1, 0, ..., 0), X' = (0, ..., 0) on a
// square grid [0, M]^2 grown until both views have at least `coverage` mass
// inside it. Cells where both PMFs sit below the mass floor are skipped
// unless exactly one of them is zero. Throws AuditInconclusiveError if M would
// exceed the grid cap.
inline AuditReport DivergenceAudit(int64_t n, const ProtocolParams& params,
                                   const AuditOptions& options = {}) {
  if (n < 1) throw ParameterError("n must be >= 1");
  const ViewDistribution view_x({n - 1, 1}, params);
  const ViewDistribution view_xp({n, 0}, params);

  const GeoDist noise(params.NoiseP());
  int64_t side = n * (params.s + 1) +
                 static_cast<int64_t>(std::ceil(params.lambda + 12.0 * std::sqrt(params.lambda))) +
                 2 * noise.TailCutoff(1e-13) + 16;

  AuditReport report;
  report.n = n;
  report.params = params;
  report.eps_target = params.eps;
  report.tolerance = options.tolerance;
  report.coverage = options.coverage;

  std::vector<double> grid_x;
  std::vector<double> grid_xp;
  for (;;) {
    if (side > options.grid_cap) {
      throw AuditInconclusiveError(
          "view mass coverage not reached within grid cap " +
          std::to_string(options.grid_cap));
    }
    const size_t width = static_cast<size_t>(side + 1);
    grid_x.assign(width * width, kNegInf);
    grid_xp.assign(width * width, kNegInf);
    long double mass_x = 0.0L;
    long double mass_xp = 0.0L;
    for (int64_t i = 0; i <= side; ++i) {
      for (int64_t j = 0; j <= side; ++j) {
        const size_t cell = static_cast<size_t>(i) * width + static_cast<size_t>(j);
        grid_x[cell] = view_x.LogPmf(i, j);
        grid_xp[cell] = view_xp.LogPmf(i, j);
        mass_x += std::exp(static_cast<long double>(grid_x[cell]));
        mass_xp += std::exp(static_cast<long double>(grid_xp[cell]));
      }
    }
    report.mass_covered_x = static_cast<double>(mass_x);
    report.mass_covered_xprime = static_cast<double>(mass_xp);
    if (mass_x >= options.coverage && mass_xp >= options.coverage) break;
    side += side / 2;
  }
  report.i_max = side;
  report.j_max = side;
  report.excluded_mass_bound =
      std::max(0.0, 1.0 - std::min(report.mass_covered_x, report.mass_covered_xprime));

  const double log_floor = std::log(options.mass_floor);
  const size_t width = static_cast<size_t>(side + 1);
  for (int64_t i = 0; i <= side; ++i) {
    for (int64_t j = 0; j <= side; ++j) {
      const size_t cell = static_cast<size_t>(i) * width + static_cast<size_t>(j);
      const double lx = grid_x[cell];
      const double lxp = grid_xp[cell];
      // A cell in one support but not the other has an infinite ratio. The
      // oracle is log-space throughout, so -inf is an exact zero and this
      // check ignores the mass floor.
      const double fwd = lxp == kNegInf ? std::numeric_limits<double>::infinity() : lx - lxp;
      const double rev = lx == kNegInf ? std::numeric_limits<double>::infinity() : lxp - lx;
      if (std::max(lx, lxp) < log_floor && !std::isinf(fwd) && !std::isinf(rev)) continue;
      if (lx != kNegInf && fwd > report.forward.value) report.forward = {fwd, i, j};
      if (lxp != kNegInf && rev > report.reverse.value) report.reverse = {rev, i, j};
    }
  }
  report.sup_abs_log_ratio = std::max(report.forward.value, report.reverse.value);
  report.support_mismatch = std::isinf(report.sup_abs_log_ratio);
  report.pass = report.sup_abs_log_ratio <= params.eps + options.tolerance &&
                report.mass_covered_x >= options.coverage &&
                report.mass_covered_xprime >= options.coverage;
  return report;
}

// Max-divergence between two PMFs on a common finite index set:
// max over supp(p) of ln(p/q); +inf when supp(p) is not inside supp(q).
inline double MaxDivergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InputError("PMFs must share an index set");
  double sup = kNegInf;
  for (size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) continue;
    if (q[k] <= 0.0) return std::numeric_limits<double>::infinity();
    sup = std::max(sup, std::log(p[k] / q[k]));
  }
  return sup;
}

// --- ratio inequalities ---------------------------------------------------------

struct InequalityCheck {
  bool holds = true;
  double min_slack = std::numeric_limits<double>::infinity();
  int64_t worst_index = -1;
  int64_t i_max = 0;
};

// f(i - 1) <= e^{eps'} f(i) for the noise law Geo(1 - e^{-eps'}), checked in
// log-space for i in [0, i_max]. The slack is eps' + ln f(i) - ln f(i - 1);
// the inequality is tight for every i >= 1, so `tolerance` absorbs rounding.
inline InequalityCheck CheckGeoRatio(double eps_prime, int64_t i_max,
                                     double tolerance = 1e-9) {
  internal::RequirePositive(eps_prime, "eps_prime");
  const double p = -std::expm1(-eps_prime);
  InequalityCheck check;
  check.i_max = i_max;
  for (int64_t i = 0; i <= i_max; ++i) {
    const double lhs = GeoLogPmf(p, i - 1);
    if (lhs == kNegInf) continue;
    const double slack = eps_prime + GeoLogPmf(p, i) - lhs;
    if (slack < check.min_slack) {
      check.min_slack = slack;
      check.worst_index = i;
    }
  }
  check.holds = check.min_slack >= -tolerance;
  return check;
}

inline int64_t DefaultPoiRatioRange(const ProtocolParams& params) {
  return static_cast<int64_t>(
      std::ceil(params.lambda + 20.0 * std::sqrt(params.lambda) + params.s));
}

// (e^eps - 1) q f(i + s) + e^{eps - eps'} f(i - 1) >= f(i) for the flooding
// law Poi(lambda), i in [0, i_max]. Slack is ln(lhs) - ln(rhs).
inline InequalityCheck CheckPoiRatio(const ProtocolParams& params, int64_t i_max,
                                     double tolerance = 1e-9) {
  internal::RequirePositive(params.lambda, "lambda");
  internal::RequireProbability(params.q, "q");
  const double log_coeff = std::log(std::expm1(params.eps)) + std::log(params.q);
  const double gap = params.eps - params.eps_prime;
  InequalityCheck check;
  check.i_max = i_max;
  for (int64_t i = 0; i <= i_max; ++i) {
    const double lhs = LogAddExp(log_coeff + PoiLogPmf(params.lambda, i + params.s),
                                 gap + PoiLogPmf(params.lambda, i - 1));
    const double slack = lhs - PoiLogPmf(params.lambda, i);
    if (slack < check.min_slack) {
      check.min_slack = slack;
      check.worst_index = i;
    }
  }
  check.holds = check.min_slack >= -tolerance;
  return check;
}

// --- Monte Carlo harnesses ------------------------------------------------------

inline constexpr int64_t kMinTrials = 1000;

struct SampleSummary {
  double mean = 0.0;
  double variance = 0.0;
  double standard_error = 0.0;
};

// Two-pass mean and unbiased variance, accumulated in index order.
inline SampleSummary Summarize(std::span<const double> values) {
  SampleSummary out;
  if (values.empty()) return out;
  const double count = static_cast<double>(values.size());
  long double sum = 0.0L;
  for (double v : values) sum += v;
  out.mean = static_cast<double>(sum / count);
  long double sq = 0.0L;
  for (double v : values) sq += (v - out.mean) * (v - out.mean);
  out.variance = values.size() > 1 ? static_cast<double>(sq / (count - 1.0)) : 0.0;
  out.standard_error = std::sqrt(out.variance / count);
  return out;
}

struct MseReport {
  ProtocolParams params;
  DatasetSummary dataset;
  int64_t trials = 0;
  double empirical_mse = 0.0;
  double standard_error = 0.0;
  double mean_error = 0.0;
  double mean_error_se = 0.0;
  double lemma_bound = 0.0;  // Var(DLap(eps')) + q n + q^2 n (n - 1)
  double exact = 0.0;        // Var(DLap(eps')) + n1 q (1 - q) + (n1 q)^2
  std::vector<int64_t> errors;  // estimate - true count, per trial
};

inline double MseLemmaBound(const ProtocolParams& params) {
  const double n = static_cast<double>(params.n);
  return DLapVariance(params.eps_prime) + params.q * n + params.q * params.q * n * (n - 1.0);
}

// Runs the full pipeline `trials` times on n1 ones followed by n0 zeros.
// Trial t draws from rng.Fork(t), so results do not depend on `threads`.
inline MseReport MeasureMse(const ProtocolParams& params, DatasetSummary ds,
                            int64_t trials, const RandomSource& rng,
                            Fidelity fidelity = Fidelity::kMessages,
                            int threads = 1) {
  if (trials < kMinTrials) {
    throw ParameterError("MSE measurement needs at least 1000 trials");
  }
  if (ds.n() != params.n) throw InputError("dataset size differs from params.n");
  const std::vector<InputBit> xs = MakeInputs(ds.n1, ds.n0);
  MseReport report;
  report.params = params;
  report.dataset = ds;
  report.trials = trials;
  report.errors.assign(static_cast<size_t>(trials), 0);
  ParallelFor(trials, threads, [&](int64_t t) {
    RandomSource trial_rng = rng.Fork(static_cast<uint64_t>(t));
    const CountingRun run = RunCounting(xs, params, trial_rng, fidelity);
    report.errors[static_cast<size_t>(t)] = run.estimate - run.true_count;
  });
  std::vector<double> squared;
  std::vector<double> signed_errors;
  squared.reserve(report.errors.size());
  signed_errors.reserve(report.errors.size());
  for (int64_t e : report.errors) {
    squared.push_back(static_cast<double>(e) * static_cast<double>(e));
    signed_errors.push_back(static_cast<double>(e));
  }
  const SampleSummary sq = Summarize(squared);
  const SampleSummary err = Summarize(signed_errors);
  report.empirical_mse = sq.mean;
  report.standard_error = sq.standard_error;
  report.mean_error = err.mean;
  report.mean_error_se = err.standard_error;
  report.lemma_bound = MseLemmaBound(params);
  report.exact = ExactMse(params, ds.n1);
  return report;
}

struct CommReport {
  ProtocolParams params;
  int x = 0;
  int64_t trials = 0;
  double empirical_mean = 0.0;
  double standard_error = 0.0;
  double exact = 0.0;
  // 2s + 1 + lambda/n + 2 E[Geo]/n: the stated per-user bound with its
  // O(1/(eps' n)) term instantiated as 2 E[Geo(1 - e^{-eps'})] / n.
  double lemma_bound = 0.0;
  // Same with the flooding term counted for both signs (2 lambda / n). Every
  // user sends z± copies of +1 and of -1, so this is the bound the exact
  // expectation actually satisfies.
  double flooding_corrected_bound = 0.0;
  std::vector<int64_t> counts;  // messages sent, per trial
};

inline double CommLemmaBound(const ProtocolParams& params) {
  const double n = static_cast<double>(params.n);
  const double noise_mean = std::exp(-params.eps_prime) / params.NoiseP();
  return 2.0 * static_cast<double>(params.s) + 1.0 + params.lambda / n + 2.0 * noise_mean / n;
}

inline double CommFloodingCorrectedBound(const ProtocolParams& params) {
  return CommLemmaBound(params) + params.lambda / static_cast<double>(params.n);
}

// Messages sent by a single user holding x, over `trials` independent runs of
// the randomizer (trial t draws from rng.Fork(t)).
inline CommReport MeasureComm(const ProtocolParams& params, InputBit x,
                              int64_t trials, const RandomSource& rng,
                              int threads = 1) {
  if (trials < kMinTrials) {
    throw ParameterError("communication measurement needs at least 1000 trials");
  }
  const Randomizer randomizer(params);
  CommReport report;
  report.params = params;
  report.x = x.value();
  report.trials = trials;
  report.counts.assign(static_cast<size_t>(trials), 0);
  ParallelFor(trials, threads, [&](int64_t t) {
    RandomSource trial_rng = rng.Fork(static_cast<uint64_t>(t));
    report.counts[static_cast<size_t>(t)] = randomizer(x, trial_rng).TotalMessages();
  });
  std::vector<double> values(report.counts.begin(), report.counts.end());
  const SampleSummary summary = Summarize(values);
  report.empirical_mean = summary.mean;
  report.standard_error = summary.standard_error;
  report.exact = ExpectedMessagesPerUser(params, x.value());
  report.lemma_bound = CommLemmaBound(params);
  report.flooding_corrected_bound = CommFloodingCorrectedBound(params);
  return report;
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_AUDIT_H_

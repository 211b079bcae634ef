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


// Real summation and histograms built from independent counting instances.
//
// Real summation rounds each x in [0, 1] to a k-bit fixed-point value and
// runs one counting instance per bit column, with the privacy budget split
// geometrically across bits. Histograms run one counting instance per bucket
// at budget eps/2 on the indicator bits 1[x == b]. In both cases messages
// carry a fixed-width instance tag and the union of all tagged messages goes
// through a single shuffle.

#ifndef SHUFFLEDP_COMPOSITION_H_
#define SHUFFLEDP_COMPOSITION_H_

#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "shuffledp/distributions.h"
#include "shuffledp/errors.h"
#include "shuffledp/params.h"
#include "shuffledp/protocol.h"
#include "shuffledp/random.h"

namespace shuffledp {

// Ratio between consecutive per-bit budgets. Minimizes
// sum_j (place value_j)^2 / eps_j^2 subject to sum_j eps_j = eps.
inline const double kBitBudgetRatio = std::exp2(-2.0 / 3.0);

// eps_j = eps (1 - beta) beta^j / (1 - beta^k), j = 0..k-1. The sum never
// exceeds eps.
inline std::vector<double> SplitBudget(double eps, int bits) {
  internal::RequirePositive(eps, "eps");
  if (bits < 1) throw ParameterError("bits must be >= 1");
  const double beta = kBitBudgetRatio;
  const double norm = -std::expm1(bits * std::log(beta));
  std::vector<double> splits(static_cast<size_t>(bits));
  for (int j = 0; j < bits; ++j) {
    splits[j] = eps * (1.0 - beta) * std::pow(beta, j) / norm;
  }
  if (bits == 1) splits[0] = eps;
  // Rounding may push the sum a few ulps over eps; shave the largest share.
  while (std::accumulate(splits.begin(), splits.end(), 0.0) > eps) {
    splits[0] = std::nextafter(splits[0], 0.0);
  }
  return splits;
}

// Width of the instance tag in bits: ceil(log2(instances)), 0 for one.
inline int TagWidth(int64_t instances) {
  if (instances < 1) throw ParameterError("instance count must be >= 1");
  return instances == 1 ? 0
                        : std::bit_width(static_cast<uint64_t>(instances - 1));
}

struct TaggedMessage {
  uint32_t tag = 0;
  int sign = 1;  // +1 or -1

  friend bool operator==(const TaggedMessage&, const TaggedMessage&) = default;
};

// Wire form: the tag in the high bits, the sign bit (1 for +1) lowest.
inline uint32_t EncodeTagged(const TaggedMessage& m) {
  return (m.tag << 1) | (m.sign > 0 ? 1u : 0u);
}

inline TaggedMessage DecodeTagged(uint32_t word) {
  return TaggedMessage{word >> 1, (word & 1u) ? 1 : -1};
}

// One "tag,sign" line per message.
inline std::string FormatTaggedMessages(std::span<const uint32_t> words) {
  std::ostringstream os;
  for (uint32_t w : words) {
    const TaggedMessage m = DecodeTagged(w);
    os << m.tag << ',' << m.sign << '\n';
  }
  return os.str();
}

// --- fixed-point encoding -------------------------------------------------

// Place value of bit j (most significant first): 2^{-(j+1)}.
inline double PlaceValue(int j) { return std::ldexp(1.0, -(j + 1)); }

// Stochastically rounds x * 2^k to an integer v with E[v] = x 2^k, clamps v
// to 2^k - 1 (only reachable for x > 1 - 2^{-k}) and returns its k binary
// digits, most significant first.
inline std::vector<uint8_t> EncodeReal(double x, int bits, RandomSource& rng) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw InputError("real input must lie in [0, 1], got " + std::to_string(x));
  }
  if (bits < 1 || bits > 52) throw ParameterError("bits must lie in [1, 52]");
  const double scaled = std::ldexp(x, bits);
  const double floor_v = std::floor(scaled);
  uint64_t v = static_cast<uint64_t>(floor_v);
  if (rng.Uniform() < scaled - floor_v) ++v;
  const uint64_t top = (uint64_t{1} << bits) - 1;
  if (v > top) v = top;
  std::vector<uint8_t> out(static_cast<size_t>(bits));
  for (int j = 0; j < bits; ++j) out[j] = (v >> (bits - 1 - j)) & 1u;
  return out;
}

inline double DecodeReal(std::span<const uint8_t> bits) {
  double value = 0.0;
  for (size_t j = 0; j < bits.size(); ++j) {
    if (bits[j]) value += PlaceValue(static_cast<int>(j));
  }
  return value;
}

// sum_j PlaceValue(j) * column_estimates[j].
inline double ReconstructSum(std::span<const double> column_estimates) {
  double sum = 0.0;
  for (size_t j = 0; j < column_estimates.size(); ++j) {
    sum += PlaceValue(static_cast<int>(j)) * column_estimates[j];
  }
  return sum;
}

// --- multi-instance engine ------------------------------------------------

struct InstanceViews {
  std::vector<View> views;                // one per instance
  std::vector<int64_t> messages_per_user; // summed over instances
  std::vector<uint32_t> shuffled;         // tagged wire words, kMessages only
};

// Runs one counting instance per column. columns[t][i] is user i's bit for
// instance t; instances with no params are skipped (no messages). User i of
// instance t draws from rng.Fork(t).Fork(i); the shuffle of the tagged union
// from rng.Fork(kShufflerStream).
inline InstanceViews RunTaggedInstances(
    const std::vector<std::vector<InputBit>>& columns,
    const std::vector<std::optional<ProtocolParams>>& params,
    RandomSource& rng, Fidelity fidelity, bool keep_messages = false) {
  if (columns.size() != params.size()) {
    throw InputError("one parameter set per instance is required");
  }
  const size_t instances = columns.size();
  const size_t users = instances == 0 ? 0 : columns[0].size();
  InstanceViews out;
  out.views.assign(instances, View{});
  out.messages_per_user.assign(users, 0);
  std::vector<uint32_t> words;
  for (size_t t = 0; t < instances; ++t) {
    if (columns[t].size() != users) throw InputError("ragged instance columns");
    if (!params[t]) continue;
    const Randomizer randomizer(*params[t]);
    const RandomSource instance_rng = rng.Fork(t);
    const uint32_t tag = static_cast<uint32_t>(t);
    for (size_t i = 0; i < users; ++i) {
      RandomSource user_rng = instance_rng.Fork(i);
      const Contribution c = randomizer(columns[t][i], user_rng);
      out.messages_per_user[i] += c.TotalMessages();
      if (fidelity == Fidelity::kMessages) {
        words.insert(words.end(), static_cast<size_t>(c.PlusMessages()),
                     EncodeTagged({tag, +1}));
        words.insert(words.end(), static_cast<size_t>(c.MinusMessages()),
                     EncodeTagged({tag, -1}));
      } else {
        out.views[t].v_plus += c.PlusMessages();
        out.views[t].v_minus += c.MinusMessages();
      }
    }
  }
  if (fidelity == Fidelity::kMessages) {
    RandomSource shuffler_rng = rng.Fork(kShufflerStream);
    std::shuffle(words.begin(), words.end(), shuffler_rng.engine());
    for (uint32_t w : words) {
      const TaggedMessage m = DecodeTagged(w);
      if (m.sign > 0) {
        ++out.views[m.tag].v_plus;
      } else {
        ++out.views[m.tag].v_minus;
      }
    }
    if (keep_messages) out.shuffled = std::move(words);
  }
  return out;
}

// --- real summation ---------------------------------------------------------

// What to do with a bit whose budget admits no feasible parameters (q >= 1).
enum class InfeasibleInstance {
  kThrow,
  // Skip the instance and estimate its column count by the public constant
  // n/2. Data-independent, so it costs no privacy.
  kPublicConstant,
};

struct RealSumOptions {
  Fidelity fidelity = Fidelity::kMessages;
  InfeasibleInstance on_infeasible = InfeasibleInstance::kThrow;
};

struct BitInstance {
  int bit = 0;
  double budget = 0.0;
  std::optional<ProtocolParams> params;  // empty for a public-constant bit
  int64_t true_count = 0;
  double count_estimate = 0.0;
};

struct RealSumRun {
  double estimate = 0.0;
  double true_sum = 0.0;     // sum of the raw inputs
  double rounded_sum = 0.0;  // sum after fixed-point rounding
  std::vector<BitInstance> instances;
  double mean_messages_per_user = 0.0;
};

// Per-bit parameters for a real-sum run. Throws InfeasibleParamsError naming
// the bit when the policy is kThrow.
inline std::vector<BitInstance> PlanRealSum(int64_t n, double eps, double rho,
                                            int bits,
                                            InfeasibleInstance on_infeasible) {
  const std::vector<double> budgets = SplitBudget(eps, bits);
  std::vector<BitInstance> plan(static_cast<size_t>(bits));
  for (int j = 0; j < bits; ++j) {
    plan[j].bit = j;
    plan[j].budget = budgets[j];
    try {
      plan[j].params = DeriveParams(budgets[j], rho, n);
    } catch (const std::domain_error& e) {
      if (on_infeasible == InfeasibleInstance::kThrow) {
        throw InfeasibleParamsError("bit " + std::to_string(j) + ": " + e.what());
      }
    }
  }
  return plan;
}

inline RealSumRun RunRealSum(std::span<const double> xs, double eps, double rho,
                             int bits, RandomSource& rng,
                             const RealSumOptions& options = {}) {
  const int64_t n = static_cast<int64_t>(xs.size());
  if (n < 1) throw InputError("real summation needs at least one user");
  for (double x : xs) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw InputError("real input must lie in [0, 1], got " + std::to_string(x));
    }
  }
  RealSumRun run;
  run.instances = PlanRealSum(n, eps, rho, bits, options.on_infeasible);

  // Column-major bits so each instance sees one column.
  std::vector<std::vector<InputBit>> columns(
      static_cast<size_t>(bits), std::vector<InputBit>(static_cast<size_t>(n)));
  const RandomSource encode_rng = rng.Fork(kShufflerStream - 1);
  for (int64_t i = 0; i < n; ++i) {
    RandomSource user_rng = encode_rng.Fork(static_cast<uint64_t>(i));
    const std::vector<uint8_t> digits = EncodeReal(xs[i], bits, user_rng);
    run.true_sum += xs[i];
    run.rounded_sum += DecodeReal(digits);
    for (int j = 0; j < bits; ++j) {
      columns[j][i] = InputBit(digits[j]);
      run.instances[j].true_count += digits[j];
    }
  }
  std::vector<std::optional<ProtocolParams>> params;
  for (const BitInstance& b : run.instances) params.push_back(b.params);
  const InstanceViews views = RunTaggedInstances(columns, params, rng, options.fidelity);

  std::vector<double> column_estimates;
  for (BitInstance& b : run.instances) {
    b.count_estimate = b.params ? static_cast<double>(Analyze(views.views[b.bit]))
                                : static_cast<double>(n) / 2.0;
    column_estimates.push_back(b.count_estimate);
  }
  run.estimate = ReconstructSum(column_estimates);
  run.mean_messages_per_user =
      static_cast<double>(std::accumulate(views.messages_per_user.begin(),
                                          views.messages_per_user.end(), int64_t{0})) /
      static_cast<double>(n);
  return run;
}

// Upper bound on the RMSE of RunRealSum against the raw sum of xs:
//   sqrt(sum_j w_j^2 V_j + (sum_j w_j B_j)^2) + sqrt(n 4^{-k} / 4) + c 2^{-k}
// where V_j = Var(DLap(eps'_j)) + n q_j (1 - q_j) bounds the variance of bit
// j's count error, B_j = q_j n (or n/2 for a public-constant bit) bounds its
// bias, and c counts inputs above 1 - 2^{-k} (the only ones the clamp
// touches). The last two terms cover fixed-point rounding.
inline double RealSumRmseBound(std::span<const double> xs,
                               std::span<const BitInstance> plan) {
  const double n = static_cast<double>(xs.size());
  const int bits = static_cast<int>(plan.size());
  double variance = 0.0;
  double bias = 0.0;
  for (const BitInstance& b : plan) {
    const double w = PlaceValue(b.bit);
    if (b.params) {
      const double q = b.params->q;
      variance += w * w * (DLapVariance(b.params->eps_prime) + n * q * (1.0 - q));
      bias += w * q * n;
    } else {
      bias += w * n / 2.0;
    }
  }
  const double grid = std::ldexp(1.0, -bits);
  double clamped = 0.0;
  for (double x : xs) {
    if (x > 1.0 - grid) clamped += 1.0;
  }
  return std::sqrt(variance + bias * bias) + std::sqrt(n * grid * grid / 4.0) +
         clamped * grid;
}

// --- histogram ----------------------------------------------------------------

struct HistogramEstimate {
  std::vector<double> counts;

  double LInfError(std::span<const int64_t> truth) const {
    if (truth.size() != counts.size()) throw InputError("histogram length mismatch");
    double worst = 0.0;
    for (size_t b = 0; b < counts.size(); ++b) {
      worst = std::max(worst, std::fabs(counts[b] - static_cast<double>(truth[b])));
    }
    return worst;
  }
  double Total() const { return std::accumulate(counts.begin(), counts.end(), 0.0); }
};

struct HistogramRun {
  HistogramEstimate estimate;
  std::vector<int64_t> truth;
  ProtocolParams params;  // shared by every bucket instance
  double budget_per_bucket = 0.0;
  double mean_messages_per_user = 0.0;
};

inline std::vector<int64_t> TrueHistogram(std::span<const int64_t> xs,
                                          int64_t buckets) {
  std::vector<int64_t> truth(static_cast<size_t>(buckets), 0);
  for (int64_t x : xs) {
    if (x < 0 || x >= buckets) {
      throw InputError("bucket value " + std::to_string(x) + " outside [0, " +
                       std::to_string(buckets) + ")");
    }
    ++truth[static_cast<size_t>(x)];
  }
  return truth;
}

// xs holds bucket ids in [0, buckets). Every bucket runs at budget eps/2.
inline HistogramRun RunHistogram(std::span<const int64_t> xs, int64_t buckets,
                                 double eps, double rho, RandomSource& rng,
                                 Fidelity fidelity = Fidelity::kMessages) {
  if (buckets < 1) throw ParameterError("bucket count must be >= 1");
  const int64_t n = static_cast<int64_t>(xs.size());
  if (n < 1) throw InputError("histogram needs at least one user");
  HistogramRun run;
  run.truth = TrueHistogram(xs, buckets);
  run.budget_per_bucket = eps / 2.0;
  run.params = DeriveParams(run.budget_per_bucket, rho, n);

  std::vector<std::vector<InputBit>> columns(
      static_cast<size_t>(buckets), std::vector<InputBit>(static_cast<size_t>(n)));
  for (int64_t i = 0; i < n; ++i) columns[xs[i]][i] = InputBit(1);
  const std::vector<std::optional<ProtocolParams>> params(
      static_cast<size_t>(buckets), run.params);
  const InstanceViews views = RunTaggedInstances(columns, params, rng, fidelity);

  run.estimate.counts.reserve(static_cast<size_t>(buckets));
  for (const View& v : views.views) {
    run.estimate.counts.push_back(static_cast<double>(Analyze(v)));
  }
  run.mean_messages_per_user =
      static_cast<double>(std::accumulate(views.messages_per_user.begin(),
                                          views.messages_per_user.end(), int64_t{0})) /
      static_cast<double>(n);
  return run;
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_COMPOSITION_H_

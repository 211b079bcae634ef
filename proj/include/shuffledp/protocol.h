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


// The counting protocol: the per-user randomizer, the shuffler and the
// analyzer, wired over a simulated channel of one-bit messages.
//
// Each user with input x sends
//   y+ + z+ + z±  copies of +1
//   y- + z- + z±  copies of -1
// where (y+, y-) is (s + x, s) with probability 1 - q and (0, 0) otherwise,
// z+, z- ~ NB(1/n, 1 - e^{-eps'}) and z± ~ Poi(lambda / n). The analyzer
// returns the signed sum of everything it receives.

#ifndef SHUFFLEDP_PROTOCOL_H_
#define SHUFFLEDP_PROTOCOL_H_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "shuffledp/distributions.h"
#include "shuffledp/errors.h"
#include "shuffledp/params.h"
#include "shuffledp/random.h"

namespace shuffledp {

class InputBit {
 public:
  constexpr InputBit() = default;
  explicit InputBit(int x) : x_(x) {
    if (x != 0 && x != 1) {
      throw InputError("input bit must be 0 or 1, got " + std::to_string(x));
    }
  }
  int value() const { return x_; }
  friend bool operator==(InputBit, InputBit) = default;

 private:
  int x_ = 0;
};

// n_ones ones followed by n_zeros zeros.
inline std::vector<InputBit> MakeInputs(int64_t n_ones, int64_t n_zeros) {
  std::vector<InputBit> xs(static_cast<size_t>(n_ones + n_zeros));
  std::fill_n(xs.begin(), n_ones, InputBit(1));
  return xs;
}

// One user's message counts.
struct Contribution {
  int64_t y_plus = 0;
  int64_t y_minus = 0;
  int64_t z_plus = 0;
  int64_t z_minus = 0;
  int64_t z_pm = 0;

  int64_t PlusMessages() const { return y_plus + z_plus + z_pm; }
  int64_t MinusMessages() const { return y_minus + z_minus + z_pm; }
  int64_t TotalMessages() const { return PlusMessages() + MinusMessages(); }
};

// What the analyzer sees: the number of +1 and -1 messages.
struct View {
  int64_t v_plus = 0;
  int64_t v_minus = 0;

  friend bool operator==(const View&, const View&) = default;
};

class Randomizer {
 public:
  explicit Randomizer(const ProtocolParams& params)
      : params_(params),
        noise_p_(params.NoiseP()),
        noise_share_(1.0 / static_cast<double>(params.n)),
        flood_share_(params.lambda / static_cast<double>(params.n)) {
    const ConditionReport report = CheckCondition(params);
    if (!report.ok()) {
      std::string msg = "protocol parameters rejected:";
      for (const Violation& v : report.violations) {
        msg += std::string(" [") + ClauseName(v.clause) + "] " + v.detail;
      }
      throw ParameterError(msg);
    }
  }

  const ProtocolParams& params() const { return params_; }

  Contribution operator()(InputBit x, RandomSource& rng) const {
    Contribution c;
    if (!rng.Bernoulli(params_.q)) {
      c.y_plus = params_.s + x.value();
      c.y_minus = params_.s;
    }
    c.z_plus = SampleNb(noise_share_, noise_p_, rng);
    c.z_minus = SampleNb(noise_share_, noise_p_, rng);
    c.z_pm = SamplePoi(flood_share_, rng);
    return c;
  }

 private:
  ProtocolParams params_;
  double noise_p_;
  double noise_share_;
  double flood_share_;
};

// --- channel ------------------------------------------------------------------

// Wire encoding of a single message: 1 for +1, 0 for -1.
using MessageBit = uint8_t;

inline void AppendMessages(const Contribution& c, std::vector<MessageBit>& out) {
  out.insert(out.end(), static_cast<size_t>(c.PlusMessages()), MessageBit{1});
  out.insert(out.end(), static_cast<size_t>(c.MinusMessages()), MessageBit{0});
}

inline View CountView(std::span<const MessageBit> messages) {
  View view;
  for (MessageBit m : messages) {
    if (m) {
      ++view.v_plus;
    } else {
      ++view.v_minus;
    }
  }
  return view;
}

// Sum of the per-user counts; equal to CountView of any ordering of the
// materialized messages.
inline View TallyView(std::span<const Contribution> contributions) {
  View view;
  for (const Contribution& c : contributions) {
    view.v_plus += c.PlusMessages();
    view.v_minus += c.MinusMessages();
  }
  return view;
}

struct ShuffledBatch {
  std::vector<MessageBit> messages;
  View view;
};

// Concatenates every user's messages and applies a uniformly random
// permutation.
inline ShuffledBatch Shuffle(std::span<const Contribution> contributions,
                             RandomSource& rng) {
  ShuffledBatch batch;
  int64_t total = 0;
  for (const Contribution& c : contributions) total += c.TotalMessages();
  batch.messages.reserve(static_cast<size_t>(total));
  for (const Contribution& c : contributions) AppendMessages(c, batch.messages);
  std::shuffle(batch.messages.begin(), batch.messages.end(), rng.engine());
  batch.view = CountView(batch.messages);
  return batch;
}

// Batch framing for dumps: an 8-byte little-endian message count, then the
// messages packed eight per byte, message i at bit (i % 8) of byte i / 8.
inline std::vector<uint8_t> EncodeBatch(std::span<const MessageBit> messages) {
  const uint64_t count = messages.size();
  std::vector<uint8_t> out(8 + (count + 7) / 8, 0);
  for (int b = 0; b < 8; ++b) out[b] = static_cast<uint8_t>(count >> (8 * b));
  for (uint64_t i = 0; i < count; ++i) {
    if (messages[i]) out[8 + i / 8] |= static_cast<uint8_t>(1u << (i % 8));
  }
  return out;
}

inline std::vector<MessageBit> DecodeBatch(std::span<const uint8_t> bytes) {
  if (bytes.size() < 8) throw InputError("batch shorter than its header");
  uint64_t count = 0;
  for (int b = 0; b < 8; ++b) count |= static_cast<uint64_t>(bytes[b]) << (8 * b);
  if (bytes.size() != 8 + (count + 7) / 8) {
    throw InputError("batch length does not match its message count");
  }
  std::vector<MessageBit> messages(count);
  for (uint64_t i = 0; i < count; ++i) {
    messages[i] = (bytes[8 + i / 8] >> (i % 8)) & 1u;
  }
  return messages;
}

// --- analyzer -------------------------------------------------------------

// Signed sum of the received messages. No -ns offset: with the (s + x, s)
// padding the s terms already cancel.
inline int64_t Analyze(const View& view) { return view.v_plus - view.v_minus; }

// --- end to end -----------------------------------------------------------

enum class Fidelity {
  // Materialize every message and shuffle the union.
  kMessages,
  // Run every randomizer but sum counts instead of materializing messages.
  // Produces the same View as kMessages for the same randomness.
  kTally,
};

struct CountingRun {
  int64_t estimate = 0;
  int64_t true_count = 0;
  View view;
  std::vector<Contribution> contributions;

  int64_t MessagesSent(size_t user) const {
    return contributions[user].TotalMessages();
  }
  double MeanMessagesPerUser() const {
    if (contributions.empty()) return 0.0;
    int64_t total = 0;
    for (const Contribution& c : contributions) total += c.TotalMessages();
    return static_cast<double>(total) / static_cast<double>(contributions.size());
  }
};

// Stream reserved for the shuffler; users draw from rng.Fork(user index).
inline constexpr uint64_t kShufflerStream = std::numeric_limits<uint64_t>::max();

inline CountingRun RunCounting(std::span<const InputBit> xs,
                               const ProtocolParams& params, RandomSource& rng,
                               Fidelity fidelity = Fidelity::kMessages) {
  if (static_cast<int64_t>(xs.size()) != params.n) {
    throw InputError("expected " + std::to_string(params.n) + " inputs, got " +
                     std::to_string(xs.size()));
  }
  const Randomizer randomizer(params);
  CountingRun run;
  run.contributions.reserve(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    RandomSource user_rng = rng.Fork(i);
    run.contributions.push_back(randomizer(xs[i], user_rng));
    run.true_count += xs[i].value();
  }
  if (fidelity == Fidelity::kMessages) {
    RandomSource shuffler_rng = rng.Fork(kShufflerStream);
    run.view = Shuffle(run.contributions, shuffler_rng).view;
  } else {
    run.view = TallyView(run.contributions);
  }
  run.estimate = Analyze(run.view);
  return run;
}

// Derivation-level fast path: draws the estimate straight from its law
//   sum(x) - Bin(n1, q) + DLap(eps')
// without running any randomizer. For large Monte Carlo sweeps only.
inline int64_t SampleEstimateLaw(int64_t n_ones, const ProtocolParams& params,
                                 RandomSource& rng) {
  return n_ones - SampleBinomial(n_ones, params.q, rng) +
         SampleDLap(params.eps_prime, rng);
}

// MSE of the estimate when n_ones users hold a one:
//   Var(DLap(eps')) + n1 q (1 - q) + (n1 q)^2.
inline double ExactMse(const ProtocolParams& params, int64_t n_ones) {
  const double n1 = static_cast<double>(n_ones);
  const double bias = n1 * params.q;
  return DLapVariance(params.eps_prime) + n1 * params.q * (1.0 - params.q) +
         bias * bias;
}

// Expected number of messages sent by one user holding x.
inline double ExpectedMessagesPerUser(const ProtocolParams& params, int x) {
  const double n = static_cast<double>(params.n);
  const double noise_mean = std::exp(-params.eps_prime) / params.NoiseP();
  return (1.0 - params.q) * static_cast<double>(2 * params.s + x) +
         2.0 * noise_mean / n + 2.0 * params.lambda / n;
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_PROTOCOL_H_

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


#include "shuffledp/protocol.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include <boost/math/distributions/poisson.hpp>

#include "gtest/gtest.h"
#include "shuffledp/params.h"
#include "shuffledp/random.h"
#include "stats_testing.h"

namespace shuffledp {
namespace {

using ::shuffledp::testing::ChiSquare;
using ::shuffledp::testing::Histogram;
using ::shuffledp::testing::kAlpha;

ProtocolParams Reference(int64_t n) { return MinimalParams(1.0, 0.5, 0.01, n); }

TEST(InputBitTest, RejectsNonBits) {
  EXPECT_THROW(InputBit(2), InputError);
  EXPECT_THROW(InputBit(-1), InputError);
  EXPECT_EQ(InputBit(1).value(), 1);
  EXPECT_EQ(InputBit().value(), 0);
}

TEST(RandomizerTest, RejectsParamsOutsideCondition) {
  ProtocolParams p = Reference(10);
  p.s = 16;
  EXPECT_THROW(Randomizer{p}, ParameterError);
}

TEST(RandomizerTest, NegligibleDropAlwaysPads) {
  const ProtocolParams p = MinimalParams(1.0, 0.5, 1e-12, 10);
  const Randomizer randomizer(p);
  RandomSource rng(1);
  for (int i = 0; i < 10000; ++i) {
    const Contribution c = randomizer(InputBit(1), rng);
    ASSERT_EQ(c.y_plus, p.s + 1);
    ASSERT_EQ(c.y_minus, p.s);
  }
}

TEST(RandomizerTest, InputPartTakesOnlyTwoShapes) {
  const ProtocolParams p = Reference(10);
  const Randomizer randomizer(p);
  RandomSource rng(2);
  for (int i = 0; i < 20000; ++i) {
    const int x = i % 2;
    const Contribution c = randomizer(InputBit(x), rng);
    const bool kept = c.y_plus == p.s + x && c.y_minus == p.s;
    const bool dropped = c.y_plus == 0 && c.y_minus == 0;
    ASSERT_TRUE(kept || dropped);
    ASSERT_GE(std::min({c.z_plus, c.z_minus, c.z_pm}), 0);
    ASSERT_EQ(c.PlusMessages() - c.MinusMessages(),
              c.y_plus - c.y_minus + c.z_plus - c.z_minus);
  }
}

TEST(RandomizerTest, DropFrequencyMatchesQ) {
  const ProtocolParams p = Reference(100);
  const Randomizer randomizer(p);
  RandomSource rng(3);
  const int64_t kDraws = 1000000;
  int64_t drops = 0;
  std::vector<int64_t> flooding(static_cast<size_t>(kDraws));
  for (int64_t i = 0; i < kDraws; ++i) {
    const Contribution c = randomizer(InputBit(1), rng);
    drops += c.y_plus == 0;
    flooding[static_cast<size_t>(i)] = c.z_pm;
  }
  const double se = std::sqrt(p.q * (1.0 - p.q) / kDraws);
  EXPECT_NEAR(static_cast<double>(drops) / kDraws, p.q, 3.0 * se);

  boost::math::poisson_distribution<double> oracle(p.lambda / p.n);
  std::vector<double> probs;
  for (int k = 0; k <= 20; ++k) probs.push_back(boost::math::pdf(oracle, k));
  const auto result = ChiSquare(Histogram(flooding, 20), probs, kDraws);
  EXPECT_GT(result.p_value, kAlpha) << "chi2=" << result.statistic;
}

// --- shuffler -------------------------------------------------------------------

TEST(ShuffleTest, EmptyInput) {
  RandomSource rng(4);
  const ShuffledBatch batch = Shuffle({}, rng);
  EXPECT_TRUE(batch.messages.empty());
  EXPECT_EQ(batch.view, (View{0, 0}));
}

TEST(ShuffleTest, ViewMatchesMultisetRegardlessOfSeed) {
  const std::vector<Contribution> contributions = {
      {3, 2, 1, 0, 2}, {0, 0, 0, 4, 1}, {2, 2, 0, 0, 0}};
  std::vector<MessageBit> first_order;
  bool orders_differ = false;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    RandomSource rng(seed);
    const ShuffledBatch batch = Shuffle(contributions, rng);
    EXPECT_EQ(batch.view, (View{3 + 1 + 2 + 1 + 2, 2 + 2 + 4 + 1 + 2}));
    EXPECT_EQ(batch.view, TallyView(contributions));
    if (seed == 0) {
      first_order = batch.messages;
    } else {
      orders_differ |= batch.messages != first_order;
    }
  }
  EXPECT_TRUE(orders_differ);
}

// Two +1 and two -1 messages admit six orderings; each should be equally
// likely.
TEST(ShuffleTest, PermutationIsUniform) {
  const std::vector<Contribution> contributions = {{2, 2, 0, 0, 0}};
  std::map<std::vector<MessageBit>, int64_t> counts;
  RandomSource rng(5);
  const int64_t kShuffles = 60000;
  for (int64_t i = 0; i < kShuffles; ++i) ++counts[Shuffle(contributions, rng).messages];
  ASSERT_EQ(counts.size(), 6u);
  std::vector<int64_t> observed;
  for (const auto& [order, count] : counts) observed.push_back(count);
  const auto result = ChiSquare(observed, std::vector<double>(6, 1.0 / 6.0), kShuffles);
  EXPECT_GT(result.p_value, kAlpha);
}

TEST(ShuffleTest, AnalyzerIsPermutationInvariant) {
  RandomSource gen(6);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Contribution> contributions(1 + trial % 7);
    for (Contribution& c : contributions) {
      c = {static_cast<int64_t>(gen.Uniform() * 5), static_cast<int64_t>(gen.Uniform() * 5),
           static_cast<int64_t>(gen.Uniform() * 3), static_cast<int64_t>(gen.Uniform() * 3),
           static_cast<int64_t>(gen.Uniform() * 4)};
    }
    RandomSource a(1000 + trial);
    RandomSource b(5000 + trial);
    ASSERT_EQ(Analyze(Shuffle(contributions, a).view), Analyze(Shuffle(contributions, b).view));
  }
}

// --- wire format ------------------------------------------------------------

TEST(WireFormatTest, BatchRoundTrip) {
  RandomSource rng(7);
  for (size_t length = 0; length < 70; ++length) {
    std::vector<MessageBit> messages(length);
    for (MessageBit& m : messages) m = rng.Bernoulli(0.5) ? 1 : 0;
    const std::vector<uint8_t> bytes = EncodeBatch(messages);
    EXPECT_EQ(bytes.size(), 8 + (length + 7) / 8);
    EXPECT_EQ(DecodeBatch(bytes), messages);
  }
}

TEST(WireFormatTest, BitLayout) {
  const std::vector<MessageBit> messages = {1, 0, 0, 1, 1, 1, 0, 0, 1};
  const std::vector<uint8_t> bytes = EncodeBatch(messages);
  ASSERT_EQ(bytes.size(), 10u);
  EXPECT_EQ(bytes[0], 9);
  EXPECT_EQ(bytes[8], 0b00111001);
  EXPECT_EQ(bytes[9], 0b1);
}

TEST(WireFormatTest, RejectsMalformedBatches) {
  EXPECT_THROW(DecodeBatch(std::vector<uint8_t>(5, 0)), InputError);
  std::vector<uint8_t> bytes = EncodeBatch(std::vector<MessageBit>(16, 1));
  bytes.pop_back();
  EXPECT_THROW(DecodeBatch(bytes), InputError);
}

// --- analyzer ---------------------------------------------------------------

TEST(AnalyzeTest, SignedSum) {
  EXPECT_EQ(Analyze({0, 0}), 0);
  EXPECT_EQ(Analyze({17, 15}), 2);
  RandomSource rng(8);
  for (int i = 0; i < 100; ++i) {
    const int64_t plus = static_cast<int64_t>(rng.Uniform() * 1e6);
    const int64_t minus = static_cast<int64_t>(rng.Uniform() * 1e6);
    EXPECT_EQ(Analyze({plus, minus}), plus - minus);
  }
}

TEST(AnalyzeTest, NoiselessRunRecoversCount) {
  // s = 5, inputs (1, 1, 0), nothing dropped, no noise or flooding.
  const std::vector<Contribution> contributions = {
      {6, 5, 0, 0, 0}, {6, 5, 0, 0, 0}, {5, 5, 0, 0, 0}};
  RandomSource rng(9);
  const ShuffledBatch batch = Shuffle(contributions, rng);
  EXPECT_EQ(batch.view, (View{17, 15}));
  EXPECT_EQ(Analyze(batch.view), 2);
}

// --- end to end ---------------------------------------------------------------

TEST(RunCountingTest, LengthMismatch) {
  const ProtocolParams p = Reference(5);
  RandomSource rng(10);
  const std::vector<InputBit> xs = MakeInputs(2, 2);
  EXPECT_THROW(RunCounting(xs, p, rng), InputError);
}

TEST(RunCountingTest, DecompositionIdentityAndFidelityAgreement) {
  const ProtocolParams p = Reference(20);
  const std::vector<InputBit> xs = MakeInputs(7, 13);
  for (uint64_t seed = 0; seed < 50; ++seed) {
    RandomSource rng_messages(seed);
    RandomSource rng_tally(seed);
    const CountingRun run = RunCounting(xs, p, rng_messages, Fidelity::kMessages);
    const CountingRun tally = RunCounting(xs, p, rng_tally, Fidelity::kTally);
    int64_t input_part = 0;
    int64_t noise_part = 0;
    for (const Contribution& c : run.contributions) {
      input_part += c.y_plus - c.y_minus;
      noise_part += c.z_plus - c.z_minus;
    }
    EXPECT_EQ(run.estimate, input_part + noise_part);
    EXPECT_EQ(run.view, tally.view);
    EXPECT_EQ(run.true_count, 7);
    EXPECT_EQ(run.MessagesSent(0), run.contributions[0].TotalMessages());
  }
}

struct Moments {
  double mean;
  double mean_se;
  double second;  // mean of squares
  double second_se;
};

Moments ErrorMoments(const std::vector<int64_t>& errors) {
  const double n = static_cast<double>(errors.size());
  long double s1 = 0, s2 = 0, s4 = 0;
  for (int64_t e : errors) {
    const long double d = static_cast<long double>(e);
    s1 += d;
    s2 += d * d;
    s4 += d * d * d * d;
  }
  const double m1 = static_cast<double>(s1 / n);
  const double m2 = static_cast<double>(s2 / n);
  const double m4 = static_cast<double>(s4 / n);
  return {m1, std::sqrt((m2 - m1 * m1) / n), m2, std::sqrt((m4 - m2 * m2) / n)};
}

TEST(RunCountingTest, AllZerosEstimateIsDiscreteLaplace) {
  const ProtocolParams p = Reference(10);
  const std::vector<InputBit> xs = MakeInputs(0, 10);
  RandomSource rng(11);
  std::vector<int64_t> errors;
  for (uint64_t t = 0; t < 20000; ++t) {
    RandomSource trial = rng.Fork(t);
    errors.push_back(RunCounting(xs, p, trial, Fidelity::kTally).estimate);
  }
  const Moments m = ErrorMoments(errors);
  EXPECT_NEAR(m.mean, 0.0, 3.0 * m.mean_se);
  EXPECT_NEAR(m.second, DLapVariance(p.eps_prime), 3.0 * m.second_se);
}

TEST(RunCountingTest, AllOnesMseMatchesExactLaw) {
  const ProtocolParams p = Reference(100);
  EXPECT_NEAR(ExactMse(p, 100), 9.825396178065526, 1e-12);
  const std::vector<InputBit> xs = MakeInputs(100, 0);
  RandomSource rng(12);
  std::vector<int64_t> errors;
  for (uint64_t t = 0; t < 5000; ++t) {
    RandomSource trial = rng.Fork(t);
    const CountingRun run = RunCounting(xs, p, trial, Fidelity::kMessages);
    errors.push_back(run.estimate - run.true_count);
  }
  const Moments m = ErrorMoments(errors);
  EXPECT_NEAR(m.mean, -p.q * 100, 3.0 * m.mean_se);
  EXPECT_NEAR(m.second, ExactMse(p, 100), 3.0 * m.second_se);
}

// With n = 1 and a negligible drop probability the error is exactly DLap(eps').
TEST(RunCountingTest, SingleUserErrorIsDiscreteLaplace) {
  const ProtocolParams p = MinimalParams(1.0, 0.5, 1e-9, 1);
  const double geo_p = 1.0 - std::exp(-0.5);
  // Oracle: P(G1 - G2 = d) by direct convolution of geometric PMFs.
  const int kRange = 30;
  std::vector<double> probs;
  for (int d = -kRange; d <= kRange; ++d) {
    double total = 0.0;
    for (int k = std::max(0, -d); k < 400; ++k) {
      total += geo_p * std::pow(1 - geo_p, k + d) * geo_p * std::pow(1 - geo_p, k);
    }
    probs.push_back(total);
  }
  std::vector<int64_t> observed(probs.size(), 0);
  RandomSource rng(13);
  const int64_t kTrials = 40000;
  for (int64_t t = 0; t < kTrials; ++t) {
    const InputBit x(static_cast<int>(t % 2));
    const std::vector<InputBit> xs = {x};
    RandomSource trial = rng.Fork(t);
    const int64_t error = RunCounting(xs, p, trial).estimate - x.value();
    if (error >= -kRange && error <= kRange) ++observed[error + kRange];
  }
  const auto result = ChiSquare(observed, probs, kTrials);
  EXPECT_GT(result.p_value, kAlpha) << "chi2=" << result.statistic;
}

TEST(RunCountingTest, MessageCountsMatchExpectation) {
  const ProtocolParams p = Reference(100);
  EXPECT_NEAR(ExpectedMessagesPerUser(p, 1), 37.22082988165074, 1e-9);
  const Randomizer randomizer(p);
  RandomSource rng(14);
  const int64_t kDraws = 200000;
  long double s1 = 0, s2 = 0;
  for (int64_t i = 0; i < kDraws; ++i) {
    const double m = static_cast<double>(randomizer(InputBit(1), rng).TotalMessages());
    s1 += m;
    s2 += m * m;
  }
  const double mean = static_cast<double>(s1 / kDraws);
  const double se = std::sqrt((static_cast<double>(s2 / kDraws) - mean * mean) / kDraws);
  EXPECT_NEAR(mean, ExpectedMessagesPerUser(p, 1), 3.0 * se);
}

TEST(FastPathTest, MatchesPipelineMoments) {
  const ProtocolParams p = Reference(100);
  RandomSource rng(15);
  std::vector<int64_t> errors;
  for (int i = 0; i < 200000; ++i) errors.push_back(SampleEstimateLaw(60, p, rng) - 60);
  const Moments m = ErrorMoments(errors);
  EXPECT_NEAR(m.mean, -0.6, 3.0 * m.mean_se);
  EXPECT_NEAR(m.second, ExactMse(p, 60), 3.0 * m.second_se);
}

}  // namespace
}  // namespace shuffledp

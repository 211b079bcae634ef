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


#include "shuffledp/distributions.h"

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <boost/math/distributions/geometric.hpp>
#include <boost/math/distributions/negative_binomial.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "gtest/gtest.h"
#include "shuffledp/random.h"
#include "stats_testing.h"

namespace shuffledp {
namespace {

using ::shuffledp::testing::ChiSquare;
using ::shuffledp::testing::Histogram;
using ::shuffledp::testing::kAlpha;

TEST(GeoLogPmfTest, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(GeoLogPmf(0.5, 0), std::log(0.5));
  EXPECT_EQ(GeoLogPmf(0.5, -1), kNegInf);
  // ln(1 - e^{-1/2}) + 3 ln(e^{-1/2}), evaluated at 40 digits.
  EXPECT_NEAR(GeoLogPmf(1.0 - std::exp(-0.5), 3), -2.432752129567188572, 1e-13);
}

TEST(GeoLogPmfTest, RejectsInvalidP) {
  EXPECT_THROW(GeoLogPmf(0.0, 1), ParameterError);
  EXPECT_THROW(GeoLogPmf(1.0, 1), ParameterError);
  EXPECT_THROW(GeoLogPmf(std::nan(""), 1), ParameterError);
}

TEST(NbLogPmfTest, ClosedFormValues) {
  EXPECT_NEAR(NbLogPmf(1.0, 0.3, 2), GeoLogPmf(0.3, 2), 1e-12);
  EXPECT_NEAR(NbLogPmf(0.5, 0.5, 0), 0.5 * std::log(0.5), 1e-12);
  // ln(0.01 * 0.39347^0.01 * 0.60653), evaluated at 40 digits.
  EXPECT_NEAR(NbLogPmf(0.01, 0.39347, 1), -5.114498778200062571, 1e-12);
  EXPECT_EQ(NbLogPmf(0.3, 0.5, -2), kNegInf);
}

TEST(NbLogPmfTest, ShapeOneIsGeometric) {
  for (double p : {0.01, 0.3, 0.39347, 0.9}) {
    for (int64_t k = 0; k <= 100; ++k) {
      EXPECT_NEAR(NbLogPmf(1.0, p, k), GeoLogPmf(p, k), 1e-12) << "p=" << p << " k=" << k;
    }
  }
}

TEST(NbLogPmfTest, RejectsInvalidParameters) {
  EXPECT_THROW(NbLogPmf(0.0, 0.5, 1), ParameterError);
  EXPECT_THROW(NbLogPmf(-1.0, 0.5, 1), ParameterError);
  EXPECT_THROW(NbLogPmf(1.0, 1.5, 1), ParameterError);
}

TEST(PoiLogPmfTest, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(PoiLogPmf(3.5, 0), -3.5);
  EXPECT_DOUBLE_EQ(PoiLogPmf(1.0, 1), -1.0);
  // ln(127^127 e^{-127} / 127!) at 40 digits.
  EXPECT_NEAR(PoiLogPmf(127.0, 127), -3.341688243056911822, 1e-11);
  EXPECT_EQ(PoiLogPmf(2.0, -1), kNegInf);
  EXPECT_THROW(PoiLogPmf(0.0, 1), ParameterError);
}

TEST(DLapVarianceTest, ClosedFormValues) {
  EXPECT_NEAR(DLapVariance(std::log(2.0)), 4.0, 1e-12);
  EXPECT_NEAR(DLapVariance(1.0), 1.841347188415584638, 1e-12);
  EXPECT_NEAR(DLapVariance(0.5), 7.835396178065527530, 1e-11);
  EXPECT_THROW(DLapVariance(0.0), ParameterError);
  EXPECT_THROW(DLapVariance(-1.0), ParameterError);
}

TEST(DLapLogPmfTest, NormalizesAndMatchesGeometricDifference) {
  const double a = 0.7;
  const double p = -std::expm1(-a);
  double total = 0.0;
  for (int64_t x = -200; x <= 200; ++x) total += std::exp(DLapLogPmf(a, x));
  EXPECT_NEAR(total, 1.0, 1e-12);
  // P(z1 - z2 = 2) = sum_k Geo(k + 2) Geo(k).
  double direct = 0.0;
  for (int64_t k = 0; k < 400; ++k) {
    direct += std::exp(GeoLogPmf(p, k + 2) + GeoLogPmf(p, k));
  }
  EXPECT_NEAR(std::exp(DLapLogPmf(a, 2)), direct, 1e-14);
}

// Every PMF sums to 1 - 1e-12 up to its tail cutoff and decays monotonically
// past its mode.
TEST(LogPmfPropertyTest, NormalizationAndTailDecay) {
  struct Case {
    const char* name;
    std::function<double(int64_t)> log_pmf;
  };
  const std::vector<Case> cases = {
      {"geo 0.39", [](int64_t k) { return GeoLogPmf(0.39347, k); }},
      {"geo 0.005", [](int64_t k) { return GeoLogPmf(0.005, k); }},
      {"nb 0.01", [](int64_t k) { return NbLogPmf(0.01, 0.39347, k); }},
      {"nb 3.5", [](int64_t k) { return NbLogPmf(3.5, 0.2, k); }},
      {"poi 1.27", [](int64_t k) { return PoiLogPmf(1.27, k); }},
      {"poi 127", [](int64_t k) { return PoiLogPmf(127.0, k); }},
      {"poi 700", [](int64_t k) { return PoiLogPmf(700.0, k); }},
  };
  for (const Case& c : cases) {
    const int64_t cutoff = UpperTailCutoff(c.log_pmf, 1e-12);
    long double total = 0.0L;
    int64_t mode = 0;
    for (int64_t k = 0; k <= cutoff; ++k) {
      total += std::exp(static_cast<long double>(c.log_pmf(k)));
      if (c.log_pmf(k) > c.log_pmf(mode)) mode = k;
    }
    EXPECT_GE(static_cast<double>(total), 1.0 - 1e-12) << c.name;
    EXPECT_LE(static_cast<double>(total), 1.0 + 1e-12) << c.name;
    for (int64_t k = mode + 1; k <= cutoff + 50; ++k) {
      EXPECT_LE(c.log_pmf(k), c.log_pmf(k - 1)) << c.name << " k=" << k;
    }
  }
}

TEST(GeoDistTest, TailCutoffIsExact) {
  const GeoDist geo(0.39347);
  const int64_t k = geo.TailCutoff(1e-12);
  // P(X > K) = (1 - p)^{K + 1}.
  EXPECT_LT(std::pow(1.0 - 0.39347, k + 1), 1e-12);
  EXPECT_GE(std::pow(1.0 - 0.39347, k), 1e-12);
}

TEST(RandomSourceTest, SameKeySameDraws) {
  RandomSource a(42, 7);
  RandomSource b(42, 7);
  RandomSource c(42, 8);
  bool any_difference = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.Uniform();
    EXPECT_EQ(x, b.Uniform());
    any_difference |= x != c.Uniform();
  }
  EXPECT_TRUE(any_difference);
}

TEST(RandomSourceTest, ForkIgnoresParentHistory) {
  RandomSource a(1, 0);
  RandomSource b(1, 0);
  for (int i = 0; i < 10; ++i) b.Uniform();
  RandomSource fa = a.Fork(3);
  RandomSource fb = b.Fork(3);
  EXPECT_EQ(fa.stream(), fb.stream());
  EXPECT_EQ(fa.Uniform(), fb.Uniform());
  EXPECT_NE(a.Fork(3).stream(), a.Fork(4).stream());
}

TEST(RandomSourceTest, UniformRanges) {
  RandomSource rng(5);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = rng.UniformPositive();
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
  }
}

// --- sampler vs PMF oracles (boost::math supplies the expected PMFs) ---------

template <typename Draw>
std::vector<int64_t> Draws(int64_t count, Draw&& draw) {
  std::vector<int64_t> out(static_cast<size_t>(count));
  for (auto& d : out) d = draw();
  return out;
}

TEST(SamplerTest, NbShapeOneMatchesGeometric) {
  const double p = 0.3;
  RandomSource rng(101);
  const int64_t kDraws = 1000000;
  const auto draws = Draws(kDraws, [&] { return SampleNb(1.0, p, rng); });
  boost::math::geometric_distribution<double> oracle(p);
  std::vector<double> probs;
  for (int k = 0; k <= 60; ++k) probs.push_back(boost::math::pdf(oracle, k));
  const auto result = ChiSquare(Histogram(draws, 60), probs, kDraws);
  EXPECT_GT(result.p_value, kAlpha) << "chi2=" << result.statistic << " df=" << result.df;
}

TEST(SamplerTest, PoissonTinyMeanIsAlmostAlwaysZero) {
  RandomSource rng(102);
  const int64_t kDraws = 1000000;
  int64_t zeros = 0;
  for (int64_t i = 0; i < kDraws; ++i) zeros += SamplePoi(1e-4, rng) == 0;
  const double expected = std::exp(-1e-4);
  const double se = std::sqrt(expected * (1.0 - expected) / kDraws);
  EXPECT_NEAR(static_cast<double>(zeros) / kDraws, expected, 3.0 * se);
}

TEST(SamplerTest, GeometricNearOneIsAlmostAlwaysZero) {
  RandomSource rng(103);
  const int64_t kDraws = 1000000;
  int64_t zeros = 0;
  for (int64_t i = 0; i < kDraws; ++i) zeros += SampleGeo(0.999, rng) == 0;
  const double se = std::sqrt(0.999 * 0.001 / kDraws);
  EXPECT_NEAR(static_cast<double>(zeros) / kDraws, 0.999, 3.0 * se);
}

TEST(SamplerTest, GeometricMatchesPmf) {
  for (double p : {0.05, 0.39347, 0.8}) {
    RandomSource rng(104);
    const int64_t kDraws = 200000;
    const auto draws = Draws(kDraws, [&] { return SampleGeo(p, rng); });
    boost::math::geometric_distribution<double> oracle(p);
    std::vector<double> probs;
    for (int k = 0; k <= 400; ++k) probs.push_back(boost::math::pdf(oracle, k));
    const auto result = ChiSquare(Histogram(draws, 400), probs, kDraws);
    EXPECT_GT(result.p_value, kAlpha) << "p=" << p << " chi2=" << result.statistic;
  }
}

// Covers both the inversion branch (< 30) and the PTRD branch.
TEST(SamplerTest, PoissonMatchesPmfAcrossBranches) {
  for (double lambda : {0.3, 4.0, 29.9, 30.0, 127.0, 1000.0}) {
    RandomSource rng(105);
    const int64_t kDraws = 200000;
    const auto draws = Draws(kDraws, [&] { return SamplePoi(lambda, rng); });
    boost::math::poisson_distribution<double> oracle(lambda);
    const int64_t top = static_cast<int64_t>(lambda + 12.0 * std::sqrt(lambda) + 20.0);
    std::vector<double> probs;
    for (int64_t k = 0; k <= top; ++k) probs.push_back(boost::math::pdf(oracle, k));
    const auto result = ChiSquare(Histogram(draws, top), probs, kDraws);
    EXPECT_GT(result.p_value, kAlpha) << "lambda=" << lambda << " chi2=" << result.statistic
                                      << " df=" << result.df;
  }
}

TEST(SamplerTest, FractionalNbMatchesPmf) {
  for (double r : {0.05, 0.3, 2.5}) {
    const double p = 0.4;
    RandomSource rng(106);
    const int64_t kDraws = 200000;
    const auto draws = Draws(kDraws, [&] { return SampleNb(r, p, rng); });
    boost::math::negative_binomial_distribution<double> oracle(r, p);
    std::vector<double> probs;
    for (int k = 0; k <= 80; ++k) probs.push_back(boost::math::pdf(oracle, k));
    const auto result = ChiSquare(Histogram(draws, 80), probs, kDraws);
    EXPECT_GT(result.p_value, kAlpha) << "r=" << r << " chi2=" << result.statistic;
  }
}

// Summing n draws of the n-divided law reproduces the undivided law.
TEST(DivisibilityTest, NegativeBinomialSharesSumToGeometric) {
  const double p = 1.0 - std::exp(-0.5);
  boost::math::geometric_distribution<double> oracle(p);
  std::vector<double> probs;
  for (int k = 0; k <= 60; ++k) probs.push_back(boost::math::pdf(oracle, k));
  for (int64_t n : {2, 10, 100}) {
    RandomSource rng(200 + n);
    const int64_t kSums = 100000;
    const auto sums = Draws(kSums, [&] {
      int64_t total = 0;
      for (int64_t i = 0; i < n; ++i) total += SampleNb(1.0 / n, p, rng);
      return total;
    });
    const auto result = ChiSquare(Histogram(sums, 60), probs, kSums);
    EXPECT_GT(result.p_value, kAlpha) << "n=" << n << " chi2=" << result.statistic;
  }
}

TEST(DivisibilityTest, PoissonSharesSumToPoisson) {
  const double lambda = 127.0;
  boost::math::poisson_distribution<double> oracle(lambda);
  std::vector<double> probs;
  for (int k = 0; k <= 260; ++k) probs.push_back(boost::math::pdf(oracle, k));
  for (int64_t n : {2, 10, 100}) {
    RandomSource rng(300 + n);
    const int64_t kSums = 100000;
    const auto sums = Draws(kSums, [&] {
      int64_t total = 0;
      for (int64_t i = 0; i < n; ++i) total += SamplePoi(lambda / n, rng);
      return total;
    });
    const auto result = ChiSquare(Histogram(sums, 260), probs, kSums);
    EXPECT_GT(result.p_value, kAlpha) << "n=" << n << " chi2=" << result.statistic;
  }
}

TEST(DLapTest, GeometricDifferenceVarianceMatchesClosedForm) {
  for (double a : {0.5, 1.0, 2.0}) {
    const double p = -std::expm1(-a);
    RandomSource plus_stream(400, 1);
    RandomSource minus_stream(400, 2);
    const int64_t kDraws = 1000000;
    long double m2 = 0.0L;
    long double m4 = 0.0L;
    long double m1 = 0.0L;
    for (int64_t i = 0; i < kDraws; ++i) {
      const double d = static_cast<double>(SampleGeo(p, plus_stream) - SampleGeo(p, minus_stream));
      m1 += d;
      m2 += d * d;
      m4 += d * d * d * d;
    }
    const double mean = static_cast<double>(m1 / kDraws);
    const double var = static_cast<double>(m2 / kDraws) - mean * mean;
    const double fourth = static_cast<double>(m4 / kDraws);
    const double se = std::sqrt((fourth - var * var) / kDraws);
    EXPECT_NEAR(var, DLapVariance(a), 3.0 * se) << "a=" << a;
  }
}

}  // namespace
}  // namespace shuffledp

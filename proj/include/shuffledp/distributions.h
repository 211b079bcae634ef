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


// Log-space PMFs and seeded samplers for the discrete laws used by the
// counting protocol: Geometric, Negative Binomial, Poisson and discrete
// Laplace. All PMFs are evaluated through log-gamma so that parameters in
// the thousands (padding counts, flooding means) never overflow.

#ifndef SHUFFLEDP_DISTRIBUTIONS_H_
#define SHUFFLEDP_DISTRIBUTIONS_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>

#include "shuffledp/errors.h"
#include "shuffledp/random.h"

namespace shuffledp {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln(e^a + e^b) without overflow; either side may be -inf.
inline double LogAddExp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// Streaming log-sum-exp. Keeps a running maximum so that long sums of tiny
// terms stay accurate.
class LogSumAccumulator {
 public:
  void Add(double log_term) {
    if (log_term == kNegInf) return;
    if (log_term <= max_) {
      sum_ += std::exp(log_term - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    }
  }
  double Result() const {
    return max_ == kNegInf ? kNegInf : max_ + std::log(sum_);
  }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

namespace internal {

inline void RequireProbability(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ParameterError(std::string(what) + " must lie in (0, 1), got " +
                         std::to_string(p));
  }
}

inline void RequirePositive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ParameterError(std::string(what) + " must be positive and finite, got " +
                         std::to_string(v));
  }
}

// Poisson draw for mean >= 0 without validation. Inversion below 30,
// Hoermann's PTRD transformed rejection above.
inline int64_t SamplePoissonUnchecked(double lambda, RandomSource& rng) {
  if (lambda <= 0.0) return 0;
  if (lambda < 30.0) {
    for (;;) {
      const double u = rng.Uniform();
      double term = std::exp(-lambda);
      double cumulative = term;
      int64_t k = 0;
      while (u >= cumulative) {
        ++k;
        term *= lambda / static_cast<double>(k);
        cumulative += term;
        if (term < 1e-300) break;
      }
      if (u < cumulative) return k;
    }
  }
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.Uniform() - 0.5;
    const double v = rng.Uniform();
    const double us = 0.5 - std::fabs(u);
    const double kd = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<int64_t>(kd);
    if (kd < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -lambda + kd * loglam - std::lgamma(kd + 1.0)) {
      return static_cast<int64_t>(kd);
    }
  }
}

}  // namespace internal

// --- log-PMFs -------------------------------------------------------------

// ln f_Geo(p)(k) = ln p + k ln(1-p) on k >= 0.
inline double GeoLogPmf(double p, int64_t k) {
  internal::RequireProbability(p, "geometric p");
  if (k < 0) return kNegInf;
  return std::log(p) + static_cast<double>(k) * std::log1p(-p);
}

// ln of C(k+r-1, k) p^r (1-p)^k for real shape r > 0.
inline double NbLogPmf(double r, double p, int64_t k) {
  internal::RequirePositive(r, "negative binomial r");
  internal::RequireProbability(p, "negative binomial p");
  if (k < 0) return kNegInf;
  const double kd = static_cast<double>(k);
  return std::lgamma(kd + r) - std::lgamma(r) - std::lgamma(kd + 1.0) +
         r * std::log(p) + kd * std::log1p(-p);
}

inline double PoiLogPmf(double lambda, int64_t k) {
  internal::RequirePositive(lambda, "poisson lambda");
  if (k < 0) return kNegInf;
  const double kd = static_cast<double>(k);
  return kd * std::log(lambda) - lambda - std::lgamma(kd + 1.0);
}

// ln Bin(trials, prob)(k). prob may be 0 or 1 (point masses).
inline double BinomialLogPmf(int64_t trials, double prob, int64_t k) {
  if (trials < 0) throw ParameterError("binomial trials must be non-negative");
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw ParameterError("binomial prob must lie in [0, 1]");
  }
  if (k < 0 || k > trials) return kNegInf;
  if (prob == 0.0) return k == 0 ? 0.0 : kNegInf;
  if (prob == 1.0) return k == trials ? 0.0 : kNegInf;
  const double n = static_cast<double>(trials);
  const double kd = static_cast<double>(k);
  return std::lgamma(n + 1.0) - std::lgamma(kd + 1.0) -
         std::lgamma(n - kd + 1.0) + kd * std::log(prob) +
         (n - kd) * std::log1p(-prob);
}

// Var(DLap(a)) = 2e^{-a} / (1 - e^{-a})^2.
inline double DLapVariance(double a) {
  internal::RequirePositive(a, "discrete Laplace a");
  const double denom = -std::expm1(-a);
  return 2.0 * std::exp(-a) / (denom * denom);
}

// f_DLap(a)(x) = tanh(a/2) e^{-a|x|}.
inline double DLapLogPmf(double a, int64_t x) {
  internal::RequirePositive(a, "discrete Laplace a");
  return std::log(std::tanh(a / 2.0)) - a * std::fabs(static_cast<double>(x));
}

// --- samplers ---------------------------------------------------------------

inline int64_t SampleGeo(double p, RandomSource& rng) {
  internal::RequireProbability(p, "geometric p");
  const double k = std::floor(std::log(rng.UniformPositive()) / std::log1p(-p));
  return k >= 9.2e18 ? std::numeric_limits<int64_t>::max()
                     : static_cast<int64_t>(k);
}

// Gamma(r, (1-p)/p)-mixed Poisson, valid for any real r > 0.
inline int64_t SampleNb(double r, double p, RandomSource& rng) {
  internal::RequirePositive(r, "negative binomial r");
  internal::RequireProbability(p, "negative binomial p");
  std::gamma_distribution<double> gamma(r, (1.0 - p) / p);
  return internal::SamplePoissonUnchecked(gamma(rng.engine()), rng);
}

inline int64_t SamplePoi(double lambda, RandomSource& rng) {
  internal::RequirePositive(lambda, "poisson lambda");
  return internal::SamplePoissonUnchecked(lambda, rng);
}

inline int64_t SampleBinomial(int64_t trials, double prob, RandomSource& rng) {
  if (trials <= 0 || prob <= 0.0) return 0;
  if (prob >= 1.0) return trials;
  std::binomial_distribution<int64_t> binomial(trials, prob);
  return binomial(rng.engine());
}

// Difference of two independent Geo(1 - e^{-a}) draws.
inline int64_t SampleDLap(double a, RandomSource& rng) {
  internal::RequirePositive(a, "discrete Laplace a");
  const double p = -std::expm1(-a);
  const int64_t plus = SampleGeo(p, rng);
  return plus - SampleGeo(p, rng);
}

// --- distribution types -----------------------------------------------------

class GeoDist {
 public:
  explicit GeoDist(double p) : p_(p) { internal::RequireProbability(p, "geometric p"); }
  double p() const { return p_; }
  double LogPmf(int64_t k) const { return GeoLogPmf(p_, k); }
  int64_t Sample(RandomSource& rng) const { return SampleGeo(p_, rng); }
  double Mean() const { return (1.0 - p_) / p_; }
  double Variance() const { return (1.0 - p_) / (p_ * p_); }
  // Smallest K with P(X > K) < excluded; exact for the geometric law.
  int64_t TailCutoff(double excluded) const {
    const double k = std::ceil(std::log(excluded) / std::log1p(-p_)) - 1.0;
    return std::max<int64_t>(0, static_cast<int64_t>(k));
  }

 private:
  double p_;
};

class NBDist {
 public:
  NBDist(double r, double p) : r_(r), p_(p) {
    internal::RequirePositive(r, "negative binomial r");
    internal::RequireProbability(p, "negative binomial p");
  }
  double r() const { return r_; }
  double p() const { return p_; }
  double LogPmf(int64_t k) const { return NbLogPmf(r_, p_, k); }
  int64_t Sample(RandomSource& rng) const { return SampleNb(r_, p_, rng); }
  double Mean() const { return r_ * (1.0 - p_) / p_; }
  double Variance() const { return r_ * (1.0 - p_) / (p_ * p_); }
  // The n-fold divisor: NB(r, p)_{/n} = NB(r/n, p).
  NBDist Divided(int64_t n) const { return NBDist(r_ / static_cast<double>(n), p_); }

 private:
  double r_;
  double p_;
};

class PoiDist {
 public:
  explicit PoiDist(double lambda) : lambda_(lambda) {
    internal::RequirePositive(lambda, "poisson lambda");
  }
  double lambda() const { return lambda_; }
  double LogPmf(int64_t k) const { return PoiLogPmf(lambda_, k); }
  int64_t Sample(RandomSource& rng) const { return SamplePoi(lambda_, rng); }
  double Mean() const { return lambda_; }
  double Variance() const { return lambda_; }
  PoiDist Divided(int64_t n) const { return PoiDist(lambda_ / static_cast<double>(n)); }

 private:
  double lambda_;
};

class DLapDist {
 public:
  explicit DLapDist(double a) : a_(a) { internal::RequirePositive(a, "discrete Laplace a"); }
  double a() const { return a_; }
  double LogPmf(int64_t x) const { return DLapLogPmf(a_, x); }
  int64_t Sample(RandomSource& rng) const { return SampleDLap(a_, rng); }
  double Variance() const { return DLapVariance(a_); }
  // The geometric law whose difference of two draws is this distribution.
  GeoDist Component() const { return GeoDist(-std::expm1(-a_)); }

 private:
  double a_;
};

// Smallest K such that the mass above K, as seen by summing the PMF from 0,
// is below `excluded`. Works for any law on Z>=0 given its log-PMF. For very
// large means the summed PMF can fall short of 1 by more than `excluded`
// (log-gamma rounding); the scan then stops once terms are decreasing and
// below excluded * 1e-6.
template <typename LogPmf>
int64_t UpperTailCutoff(LogPmf&& log_pmf, double excluded) {
  long double cumulative = 0.0L;
  double previous = kNegInf;
  const double negligible = std::log(excluded) - 6.0 * std::log(10.0);
  for (int64_t k = 0;; ++k) {
    const double term = log_pmf(k);
    cumulative += std::exp(static_cast<long double>(term));
    if (1.0L - cumulative < excluded) return k;
    if (term < previous && term < negligible) return k;
    previous = term;
  }
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_DISTRIBUTIONS_H_

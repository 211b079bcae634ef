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


// Protocol parameters for the pure-DP shuffle counting protocol, the three
// admissibility clauses they must satisfy, and the recipe that picks them
// from a target (eps, rho, n).
//
// The clauses are
//   eps' < eps
//   s      >= 2 ln(1 / ((e^eps - 1) q)) / (eps - eps')
//   lambda >= e^{eps - eps'} / (1 - e^{(eps' - eps)/2}) * s
// and are evaluated in long double with expm1/log so that a gap
// eps - eps' of a few thousandths does not lose digits.

#ifndef SHUFFLEDP_PARAMS_H_
#define SHUFFLEDP_PARAMS_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "shuffledp/distributions.h"
#include "shuffledp/errors.h"

namespace shuffledp {

// Largest privacy budget accepted by DeriveParams.
inline constexpr double kMaxEpsilon = 8.0;

struct ProtocolParams {
  int64_t n = 0;           // number of users
  double eps = 0.0;        // target privacy budget
  double eps_prime = 0.0;  // budget spent on the discrete Laplace noise
  double q = 0.0;          // probability of dropping the input-dependent part
  int64_t s = 0;           // padding count
  double lambda = 0.0;     // flooding mean (aggregate over all users)
  std::optional<double> rho;  // slack, when produced by DeriveParams

  // Parameter of the per-side geometric noise, 1 - e^{-eps'}.
  double NoiseP() const { return -std::expm1(-eps_prime); }
};

enum class Clause {
  kDomain,          // n >= 1, eps, eps' > 0, q in (0,1), s >= 1, lambda > 0
  kEpsPrimeBelowEps,
  kPadding,
  kFlooding,
};

inline const char* ClauseName(Clause c) {
  switch (c) {
    case Clause::kDomain: return "domain";
    case Clause::kEpsPrimeBelowEps: return "eps_prime_below_eps";
    case Clause::kPadding: return "padding_count";
    case Clause::kFlooding: return "flooding_mean";
  }
  return "unknown";
}

struct Violation {
  Clause clause;
  std::string detail;
};

struct ConditionReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool Violates(Clause c) const {
    return std::any_of(violations.begin(), violations.end(),
                       [c](const Violation& v) { return v.clause == c; });
  }
};

// Right-hand side of the padding clause. Non-positive when
// (e^eps - 1) q >= 1; +inf when q == 0.
inline long double PaddingLowerBound(double eps, double eps_prime, double q) {
  const long double gap = static_cast<long double>(eps) - eps_prime;
  const long double log_inv =
      -std::log(std::expm1(static_cast<long double>(eps))) -
      std::log(static_cast<long double>(q));
  return 2.0L * log_inv / gap;
}

// Right-hand side of the flooding clause for padding count s.
inline long double FloodingLowerBound(double eps, double eps_prime, int64_t s) {
  const long double gap = static_cast<long double>(eps) - eps_prime;
  return std::exp(gap) / -std::expm1(-gap / 2.0L) * static_cast<long double>(s);
}

inline bool SatisfiesPadding(double eps, double eps_prime, double q, int64_t s) {
  return static_cast<long double>(s) >= PaddingLowerBound(eps, eps_prime, q);
}

inline bool SatisfiesFlooding(double eps, double eps_prime, int64_t s,
                              double lambda) {
  return static_cast<long double>(lambda) >=
         FloodingLowerBound(eps, eps_prime, s);
}

// Reports every violated clause independently. Violations are data; this
// never throws.
inline ConditionReport CheckCondition(const ProtocolParams& params) {
  ConditionReport report;
  std::ostringstream domain;
  if (params.n < 1) domain << "n must be >= 1; ";
  if (!(params.eps > 0.0) || !std::isfinite(params.eps)) domain << "eps must be positive; ";
  if (!(params.eps_prime > 0.0)) domain << "eps_prime must be positive; ";
  if (!(params.q > 0.0 && params.q < 1.0)) domain << "q must lie in (0, 1); ";
  if (params.s < 1) domain << "s must be >= 1; ";
  if (!(params.lambda > 0.0) || !std::isfinite(params.lambda)) domain << "lambda must be positive; ";
  if (!domain.str().empty()) {
    report.violations.push_back({Clause::kDomain, domain.str()});
  }
  if (!(params.eps_prime < params.eps)) {
    report.violations.push_back(
        {Clause::kEpsPrimeBelowEps, "eps_prime must be strictly below eps"});
    // The remaining clauses divide by eps - eps'.
    return report;
  }
  if (params.q > 0.0 && params.s >= 0 &&
      !SatisfiesPadding(params.eps, params.eps_prime, params.q, params.s)) {
    std::ostringstream os;
    os << "s=" << params.s << " below bound "
       << static_cast<double>(PaddingLowerBound(params.eps, params.eps_prime, params.q));
    report.violations.push_back({Clause::kPadding, os.str()});
  } else if (params.q <= 0.0) {
    report.violations.push_back({Clause::kPadding, "q=0 admits no finite s"});
  }
  if (params.s >= 0 &&
      !SatisfiesFlooding(params.eps, params.eps_prime, params.s, params.lambda)) {
    std::ostringstream os;
    os << "lambda=" << params.lambda << " below bound "
       << static_cast<double>(FloodingLowerBound(params.eps, params.eps_prime, params.s));
    report.violations.push_back({Clause::kFlooding, os.str()});
  }
  return report;
}

// Smallest integer lambda meeting the flooding clause for a given s.
inline double MinimalFlooding(double eps, double eps_prime, int64_t s) {
  double lambda = static_cast<double>(std::ceil(FloodingLowerBound(eps, eps_prime, s)));
  while (!SatisfiesFlooding(eps, eps_prime, s, lambda)) lambda += 1.0;
  while (lambda > 1.0 && SatisfiesFlooding(eps, eps_prime, s, lambda - 1.0)) {
    lambda -= 1.0;
  }
  return lambda;
}

// Smallest admissible s and smallest admissible integer lambda for the given
// (eps, eps', q). Throws ParameterError if eps' >= eps or q is outside (0,1).
inline ProtocolParams MinimalParams(double eps, double eps_prime, double q,
                                    int64_t n) {
  if (!(eps > 0.0 && eps_prime > 0.0 && eps_prime < eps)) {
    throw ParameterError("need 0 < eps_prime < eps");
  }
  internal::RequireProbability(q, "q");
  if (n < 1) throw ParameterError("n must be >= 1");

  ProtocolParams params;
  params.n = n;
  params.eps = eps;
  params.eps_prime = eps_prime;
  params.q = q;

  const long double s_bound = PaddingLowerBound(eps, eps_prime, q);
  if (!(s_bound < 9e18L)) throw ParameterError("padding count bound overflows");
  int64_t s = std::max<int64_t>(1, static_cast<int64_t>(std::ceil(s_bound)));
  while (!SatisfiesPadding(eps, eps_prime, q, s)) ++s;
  while (s > 1 && SatisfiesPadding(eps, eps_prime, q, s - 1)) --s;
  params.s = s;

  params.lambda = MinimalFlooding(eps, eps_prime, s);
  return params;
}

// The parameter recipe:
//   eps' = eps - 0.01 rho min(eps, 1)
//   q    = 0.1 rho Var(DLap(eps)) / n
// with s and lambda the smallest values meeting their clauses (lambda rounded
// up to an integer).
inline ProtocolParams DeriveParams(double eps, double rho, int64_t n) {
  if (!(eps > 0.0 && eps <= kMaxEpsilon)) {
    throw ParameterError("eps must lie in (0, 8], got " + std::to_string(eps));
  }
  if (!(rho > 0.0 && rho <= 0.5)) {
    throw ParameterError("rho must lie in (0, 1/2], got " + std::to_string(rho));
  }
  if (n < 1) throw ParameterError("n must be >= 1");
  if (eps < 1.0 / static_cast<double>(n)) {
    throw DegenerateInputError(
        "eps < 1/n: no protocol beats the constant estimate 0 in this regime");
  }
  const double eps_prime = eps - 0.01 * rho * std::min(eps, 1.0);
  const double q = 0.1 * rho * DLapVariance(eps) / static_cast<double>(n);
  if (!(q < 1.0)) {
    std::ostringstream os;
    os << "derived drop probability q=" << q << " >= 1 for eps=" << eps
       << ", rho=" << rho << ", n=" << n;
    throw InfeasibleParamsError(os.str());
  }
  ProtocolParams params = MinimalParams(eps, eps_prime, q, n);
  params.rho = rho;
  return params;
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_PARAMS_H_

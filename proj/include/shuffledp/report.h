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


// JSON views of parameters and audit results. Keys keep insertion order so
// that reports are byte-stable.

#ifndef SHUFFLEDP_REPORT_H_
#define SHUFFLEDP_REPORT_H_

#include <cmath>

#include <nlohmann/json.hpp>

#include "shuffledp/audit.h"
#include "shuffledp/params.h"

namespace shuffledp {

using Json = nlohmann::ordered_json;

// Non-finite doubles have no JSON spelling; they become null.
inline Json Number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json ToJson(const ConditionReport& report) {
  Json violations = Json::array();
  for (const Violation& v : report.violations) {
    violations.push_back({{"clause", ClauseName(v.clause)}, {"detail", v.detail}});
  }
  return {{"ok", report.ok()}, {"violations", violations}};
}

inline Json ToJson(const ProtocolParams& p) {
  Json j;
  j["n"] = p.n;
  j["eps"] = p.eps;
  j["eps_prime"] = p.eps_prime;
  j["q"] = p.q;
  j["s"] = p.s;
  j["lambda"] = p.lambda;
  j["rho"] = p.rho ? Json(*p.rho) : Json(nullptr);
  j["condition"] = ToJson(CheckCondition(p));
  return j;
}

inline Json ToJson(const DirectionalSup& d) {
  return {{"value", Number(d.value)}, {"unbounded", std::isinf(d.value) && d.value > 0},
          {"i", d.i}, {"j", d.j}};
}

inline Json ToJson(const AuditReport& r) {
  Json j;
  j["sup_abs_log_ratio"] = Number(r.sup_abs_log_ratio);
  j["eps_target"] = r.eps_target;
  j["mass_covered_x"] = r.mass_covered_x;
  j["mass_covered_xprime"] = r.mass_covered_xprime;
  j["grid"] = {{"i_max", r.i_max}, {"j_max", r.j_max}};
  j["pass"] = r.pass;
  j["excluded_mass_bound"] = r.excluded_mass_bound;
  j["support_mismatch"] = r.support_mismatch;
  j["forward"] = ToJson(r.forward);
  j["reverse"] = ToJson(r.reverse);
  j["tolerance"] = r.tolerance;
  j["coverage"] = r.coverage;
  j["n"] = r.n;
  j["params"] = ToJson(r.params);
  return j;
}

inline Json ToJson(const InequalityCheck& c) {
  return {{"holds", c.holds}, {"min_slack", Number(c.min_slack)},
          {"worst_index", c.worst_index}, {"i_max", c.i_max}};
}

inline Json ToJson(const MseReport& r) {
  Json j;
  j["trials"] = r.trials;
  j["n0"] = r.dataset.n0;
  j["n1"] = r.dataset.n1;
  j["empirical_mse"] = r.empirical_mse;
  j["standard_error"] = r.standard_error;
  j["exact"] = r.exact;
  j["lemma_bound"] = r.lemma_bound;
  j["mean_error"] = r.mean_error;
  j["mean_error_se"] = r.mean_error_se;
  j["params"] = ToJson(r.params);
  return j;
}

inline Json ToJson(const CommReport& r) {
  Json j;
  j["trials"] = r.trials;
  j["x"] = r.x;
  j["empirical_mean"] = r.empirical_mean;
  j["standard_error"] = r.standard_error;
  j["exact"] = r.exact;
  j["lemma_bound"] = r.lemma_bound;
  j["flooding_corrected_bound"] = r.flooding_corrected_bound;
  j["params"] = ToJson(r.params);
  return j;
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_REPORT_H_

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

#ifndef SHUFFLEDP_ERRORS_H_
#define SHUFFLEDP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace shuffledp {

// A distribution or protocol parameter is outside its domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Caller-supplied data (inputs, lengths, values) is malformed.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// eps < 1/n: the only sensible estimator is the constant zero.
class DegenerateInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The parameter recipe produced a drop probability q >= 1.
class InfeasibleParamsError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The divergence audit could not reach the requested mass coverage inside
// its grid cap. This is distinct from a failed audit.
class AuditInconclusiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace shuffledp

#endif  // SHUFFLEDP_ERRORS_H_

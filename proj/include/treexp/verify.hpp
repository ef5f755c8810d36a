// Copyright 2026 The treexp Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#ifndef TREEXP_VERIFY_HPP_
#define TREEXP_VERIFY_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace treexp {

// Tolerances of the oracle-equivalence suite.
struct VerifyTolerances {
  double partition = 1e-10;
  double totals = 1e-9;
  double second_order = 1e-8;
  double quantities = 1e-9;
  double baseline = 1e-8;
  double fd_rel = 1e-4;
  double fd_abs = 1e-8;
};

struct VerifyOptions {
  int max_n = 4;
  int trials = 20;
  std::uint64_t seed = 7;
  VerifyTolerances tol;
};

struct VerifyFailure {
  std::uint64_t instance_seed;
  int n;
  std::string property;
  std::string detail;
};

struct PropertyCount {
  int passed = 0;
  int failed = 0;
};

struct VerifyReport {
  int passed = 0;
  int failed = 0;
  std::map<std::string, PropertyCount> by_property;
  std::vector<VerifyFailure> failures;

  bool ok() const { return failed == 0; }
};

// Runs every oracle-equivalence, identity and finite-difference property on
// `trials` random instances with n in [1, max_n], alternating root
// constraints. Instance t uses seed `seed + t`. Throws SizeError when
// max_n > 6.
VerifyReport run_verify(const VerifyOptions& options);

inline constexpr int kMaxVerifyNodes = 6;

}  // namespace treexp

#endif  // TREEXP_VERIFY_HPP_

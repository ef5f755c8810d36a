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

// Linked against the core built with a negated Hessian cross term: the
// verification suite must notice.

#include <gtest/gtest.h>

#include "treexp/verify.hpp"

namespace treexp {
namespace {

TEST(FaultInjection, VerifyDetectsNegatedHessian) {
  VerifyOptions options;
  options.max_n = 4;
  options.trials = 20;
  options.seed = 7;
  const VerifyReport report = run_verify(options);
  EXPECT_FALSE(report.ok());
  EXPECT_GT(report.by_property.at("pairwise_totals_vs_brute").failed, 0);
  EXPECT_GT(report.by_property.at("second_hes_vs_brute").failed, 0);
  // First-order quantities do not touch the Hessian.
  EXPECT_EQ(report.by_property.at("partition_vs_brute").failed, 0);
  EXPECT_EQ(report.by_property.at("edge_totals_vs_brute").failed, 0);
}

}  // namespace
}  // namespace treexp

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

#ifndef TREEXP_TESTS_TEST_SUPPORT_HPP_
#define TREEXP_TESTS_TEST_SUPPORT_HPP_

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "treexp/graph.hpp"
#include "treexp/linalg.hpp"

namespace treexp::testing {

inline WeightedGraph ones(int n, RootConstraint c = RootConstraint::kMultiRoot) {
  return WeightedGraph::Complete(n, c, 1.0);
}

// |actual - expected| <= tol * max(1, |expected|).
inline ::testing::AssertionResult near_rel(double actual, double expected,
                                           double tol) {
  const double err = std::abs(actual - expected);
  if (err <= tol * std::max(1.0, std::abs(expected))) {
    return ::testing::AssertionSuccess();
  }
  return ::testing::AssertionFailure()
         << "actual " << actual << " expected " << expected << " err " << err;
}

// Element-wise relative agreement; entries much smaller than the largest
// expected magnitude are compared against that magnitude instead.
inline ::testing::AssertionResult arrays_near(const std::vector<double>& a,
                                              const std::vector<double>& b,
                                              double tol) {
  if (a.size() != b.size()) {
    return ::testing::AssertionFailure()
           << "size " << a.size() << " vs " << b.size();
  }
  double scale = 0.0;
  for (double v : b) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ref = std::max(std::abs(b[i]), 1e-3 * scale);
    if (std::abs(a[i] - b[i]) > tol * std::max(ref, 1e-300)) {
      return ::testing::AssertionFailure()
             << "index " << i << ": " << a[i] << " vs " << b[i];
    }
  }
  return ::testing::AssertionSuccess();
}

inline std::vector<double> flat(const Matrix& m) {
  return {m.data().begin(), m.data().end()};
}

}  // namespace treexp::testing

#endif  // TREEXP_TESTS_TEST_SUPPORT_HPP_

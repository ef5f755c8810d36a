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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "test_support.hpp"
#include "treexp/error.hpp"
#include "treexp/laplacian.hpp"
#include "treexp/oracle.hpp"
#include "treexp/random.hpp"

namespace treexp {
namespace {

using testing::ones;

std::set<std::vector<int>> head_sets(const std::vector<Tree>& trees) {
  std::set<std::vector<int>> out;
  for (const Tree& t : trees) out.insert({t.heads().begin(), t.heads().end()});
  return out;
}

TEST(EnumerateTrees, HandEnumerationN2) {
  EXPECT_EQ(head_sets(enumerate_trees(ones(2))),
            (std::set<std::vector<int>>{{0, 0}, {0, 1}, {2, 0}}));
  EXPECT_EQ(head_sets(enumerate_trees(ones(2, RootConstraint::kSingleRoot))),
            (std::set<std::vector<int>>{{0, 1}, {2, 0}}));
}

TEST(EnumerateTrees, ArborescenceCounts) {
  EXPECT_EQ(enumerate_trees(ones(3)).size(), 16u);
  for (int n = 1; n <= 6; ++n) {
    const auto multi = enumerate_trees(ones(n)).size();
    const auto single =
        enumerate_trees(ones(n, RootConstraint::kSingleRoot)).size();
    EXPECT_EQ(multi, static_cast<std::size_t>(std::llround(
                         std::pow(n + 1.0, n - 1.0))));
    EXPECT_EQ(single,
              static_cast<std::size_t>(std::llround(std::pow(n, n - 1.0))));
  }
}

TEST(EnumerateTrees, YieldsOnlyValidTrees) {
  for (const auto c : {RootConstraint::kMultiRoot, RootConstraint::kSingleRoot}) {
    for (const Tree& t : enumerate_trees(ones(4, c))) {
      EXPECT_TRUE(t.is_valid(4, c));
    }
  }
}

TEST(EnumerateTrees, ZeroWeightTreesAreStillYielded) {
  WeightedGraph g = ones(2);
  g.set_weight(0, 1, 0.0);
  EXPECT_EQ(enumerate_trees(g).size(), 3u);
}

TEST(EnumerateTrees, SizeBound) {
  EXPECT_THROW(enumerate_trees(ones(9)), SizeError);
}

TEST(TreeWeight, Examples) {
  EXPECT_EQ(tree_weight(ones(3), Tree({0, 1, 1})), 1.0);
  WeightedGraph g = ones(2);
  g.set_weight(0, 1, 2.0);
  g.set_weight(1, 2, 3.0);
  EXPECT_EQ(tree_weight(g, Tree({0, 1})), 6.0);
  g.set_weight(0, 2, 0.0);
  EXPECT_EQ(tree_weight(g, Tree({0, 0})), 0.0);
}

TEST(BruteTotal, Examples) {
  const WeightedGraph g = ones(2);
  EXPECT_EQ(brute_total(g, [](const Tree&) { return std::vector<double>{1.0}; })[0],
            3.0);
  EXPECT_EQ(brute_total(g, [](const Tree& d) {
              return std::vector<double>{static_cast<double>(d.n())};
            })[0],
            6.0);
  const double z = 3.0;
  const double h = brute_total(g, [&](const Tree& d) {
                     return std::vector<double>{-std::log(tree_weight(g, d) / z)};
                   })[0] /
                   z;
  EXPECT_NEAR(h, std::log(3.0), 1e-15);
}

TEST(BruteTotal, MatchesPartitionFunction) {
  Rng rng(3);
  for (int n = 1; n <= 6; ++n) {
    for (const auto c :
         {RootConstraint::kMultiRoot, RootConstraint::kSingleRoot}) {
      const WeightedGraph g = random_graph(rng, n, c);
      EXPECT_TRUE(testing::near_rel(brute_partition_function(g),
                                    partition_function(g), 1e-10));
    }
  }
}

TEST(FiniteDifference, RecoversLinearGradient) {
  const WeightedGraph g = ones(2);
  const auto grad = finite_difference_gradient(
      g, [](const WeightedGraph& h) { return 3.0 * h.weight(0, 1); });
  EXPECT_NEAR(grad[edge_index(2, 0, 1)], 3.0, 1e-8);
  EXPECT_NEAR(grad[edge_index(2, 1, 2)], 0.0, 1e-8);
}

}  // namespace
}  // namespace treexp

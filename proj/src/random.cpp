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

#include "treexp/random.hpp"

#include <algorithm>
#include <numeric>

namespace treexp {

WeightedGraph random_graph(Rng& rng, int n, RootConstraint constraint,
                           double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  WeightedGraph g(n, constraint);
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i != j) g.set_weight(i, j, dist(rng));
    }
  }
  return g;
}

LabeledWeightedGraph random_labeled_graph(Rng& rng, int n, int labels,
                                          RootConstraint constraint,
                                          double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> w(static_cast<std::size_t>(n + 1) * (n + 1) * labels,
                        0.0);
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      for (int y = 0; y < labels; ++y) {
        w[edge_index(n, i, j) * labels + y] = dist(rng);
      }
    }
  }
  return LabeledWeightedGraph(n, labels, std::move(w), constraint);
}

EdgeFunction random_edge_function(Rng& rng, int n, int dim, int density) {
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  EdgeFunction f(n, dim);
  std::vector<int> coords(dim);
  std::iota(coords.begin(), coords.end(), 0);
  const int take = std::min(density, dim);
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      std::shuffle(coords.begin(), coords.end(), rng);
      for (int t = 0; t < take; ++t) f.add(i, j, coords[t], value(rng));
    }
  }
  return f;
}

Tree random_tree(Rng& rng, int n, RootConstraint constraint) {
  std::uniform_int_distribution<int> head(0, n - 1);
  std::vector<int> heads(n);
  while (true) {
    for (int j = 1; j <= n; ++j) {
      // Draw from {0..n} \ {j}.
      int h = head(rng);
      if (h >= j) ++h;
      heads[j - 1] = h;
    }
    Tree t(heads);
    if (t.is_valid(n, constraint)) return t;
  }
}

}  // namespace treexp

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

#include "treexp/laplacian.hpp"

#include <string>

#include "treexp/error.hpp"

namespace treexp {

Laplacian build_laplacian(const WeightedGraph& g) {
  const int n = g.n();
  Laplacian lap{Matrix(n, n), g.constraint(),
                g.single_root() ? kSingleRootReplacedRow : 0};
  Matrix& m = lap.matrix;
  for (int j = 1; j <= n; ++j) {
    double column_sum = 0.0;
    for (int i = 1; i <= n; ++i) {
      if (i == j) continue;
      const double w = g.weight(i, j);
      column_sum += w;
      m(i - 1, j - 1) = -w;
    }
    if (g.single_root()) {
      m(j - 1, j - 1) = column_sum;
    } else {
      m(j - 1, j - 1) = column_sum + g.weight(0, j);
    }
  }
  if (g.single_root()) {
    const int r = kSingleRootReplacedRow - 1;
    for (int j = 1; j <= n; ++j) m(r, j - 1) = g.weight(0, j);
  }
  return lap;
}

double partition_function(const WeightedGraph& g) {
  return determinant(build_laplacian(g).matrix);
}

SignedLogDet log_partition_function(const WeightedGraph& g) {
  return sign_log_determinant(build_laplacian(g).matrix);
}

WeightedGraph collapse_labels(const LabeledWeightedGraph& g) {
  WeightedGraph out(g.n(), g.constraint());
  for (int i = 0; i <= g.n(); ++i) {
    for (int j = 1; j <= g.n(); ++j) {
      if (i == j) continue;
      double w = 0.0;
      for (int y = 0; y < g.labels(); ++y) w += g.weight(i, j, y);
      out.set_weight(i, j, w);
    }
  }
  return out;
}

GammaEntry gamma(RootConstraint constraint, int head, int dep) {
  if (dep == 0 || head == dep) {
    throw StructuralError("gamma of illegal edge " + std::to_string(head) +
                          "->" + std::to_string(dep));
  }
  GammaEntry e;
  if (constraint == RootConstraint::kSingleRoot) {
    if (head == 0) {
      e.cells[e.size++] = {kSingleRootReplacedRow, dep, 1.0};
      return e;
    }
    if (dep != kSingleRootReplacedRow) e.cells[e.size++] = {dep, dep, 1.0};
    if (head != kSingleRootReplacedRow) e.cells[e.size++] = {head, dep, -1.0};
    return e;
  }
  e.cells[e.size++] = {dep, dep, 1.0};
  if (head != 0) e.cells[e.size++] = {head, dep, -1.0};
  return e;
}

Matrix b_matrix(const WeightedGraph& g) {
  return inverse(build_laplacian(g).matrix).transposed();
}

}  // namespace treexp

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

#ifndef TREEXP_LAPLACIAN_HPP_
#define TREEXP_LAPLACIAN_HPP_

#include <array>

#include "treexp/graph.hpp"
#include "treexp/linalg.hpp"

namespace treexp {

// Laplacian over non-root nodes: matrix(i - 1, j - 1) is the cell for
// (head i, dependent j). Under SingleRoot, row `replaced_row` holds the root
// weights instead of column sums.
struct Laplacian {
  Matrix matrix;
  RootConstraint constraint;
  int replaced_row = 0;  // 1 under SingleRoot, 0 (none) otherwise
};

// One nonzero of dL/dw_ij: Laplacian cell (row, col) in 1-based node indices
// with coefficient +1 or -1.
struct GammaCell {
  int row;
  int col;
  double coeff;
};

// The at most two Laplacian cells touched by one edge weight.
struct GammaEntry {
  std::array<GammaCell, 2> cells{};
  int size = 0;

  const GammaCell* begin() const { return cells.data(); }
  const GammaCell* end() const { return cells.data() + size; }
};

inline constexpr int kSingleRootReplacedRow = 1;

Laplacian build_laplacian(const WeightedGraph& g);

// Z = |L|. Zero is a legal result.
double partition_function(const WeightedGraph& g);

// sign and log|Z|; usable where Z itself would overflow.
SignedLogDet log_partition_function(const WeightedGraph& g);

// w_ij = sum_y w_ijy.
WeightedGraph collapse_labels(const LabeledWeightedGraph& g);

GammaEntry gamma(RootConstraint constraint, int head, int dep);
inline GammaEntry gamma(const WeightedGraph& g, int head, int dep) {
  return gamma(g.constraint(), head, dep);
}

// B = L^{-T}. Throws SingularError when Z = 0.
Matrix b_matrix(const WeightedGraph& g);

}  // namespace treexp

#endif  // TREEXP_LAPLACIAN_HPP_

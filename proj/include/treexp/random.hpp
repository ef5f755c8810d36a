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

#ifndef TREEXP_RANDOM_HPP_
#define TREEXP_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "treexp/graph.hpp"

namespace treexp {

using Rng = std::mt19937_64;

// Synthetic weights drawn uniform(lo, hi) on every legal edge.
WeightedGraph random_graph(Rng& rng, int n, RootConstraint constraint,
                           double lo = 0.1, double hi = 1.0);

LabeledWeightedGraph random_labeled_graph(Rng& rng, int n, int labels,
                                          RootConstraint constraint,
                                          double lo = 0.1, double hi = 1.0);

// Every legal edge gets `density` distinct coordinates in [0, dim) with
// values uniform(-1, 1). density >= dim gives dense rows.
EdgeFunction random_edge_function(Rng& rng, int n, int dim, int density);

// Uniform over parent assignments, rejecting until a valid tree appears.
Tree random_tree(Rng& rng, int n, RootConstraint constraint);

}  // namespace treexp

#endif  // TREEXP_RANDOM_HPP_

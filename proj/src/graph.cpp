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

#include "treexp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "treexp/error.hpp"

namespace treexp {
namespace {

void check_weight_table(int n, std::size_t expected, std::size_t actual) {
  if (n < 1) {
    throw StructuralError("graph must have at least one non-root node, got n=" +
                          std::to_string(n));
  }
  if (expected != actual) {
    throw DimensionError("weight table has " + std::to_string(actual) +
                         " entries, expected " + std::to_string(expected));
  }
}

void check_entry(double w, int i, int j) {
  const std::string edge =
      "edge " + std::to_string(i) + "->" + std::to_string(j);
  if (!std::isfinite(w)) {
    throw StructuralError("non-finite weight on " + edge);
  }
  if (w < 0.0) {
    throw StructuralError("negative weight on " + edge);
  }
  if (j == 0 && w != 0.0) {
    throw StructuralError("nonzero root column: " + edge +
                          " enters the root");
  }
  if (i == j && w != 0.0) {
    throw StructuralError("nonzero diagonal: self-loop on node " +
                          std::to_string(i));
  }
}

}  // namespace

WeightedGraph::WeightedGraph(int n, RootConstraint constraint)
    : n_(n),
      constraint_(constraint),
      weights_(n >= 1 ? static_cast<std::size_t>(n + 1) * (n + 1) : 0, 0.0) {
  check_weight_table(n, weights_.size(), weights_.size());
}

WeightedGraph::WeightedGraph(int n, std::vector<double> weights,
                             RootConstraint constraint)
    : n_(n), constraint_(constraint), weights_(std::move(weights)) {
  check_weight_table(n, static_cast<std::size_t>(n + 1) * (n + 1),
                     weights_.size());
}

WeightedGraph WeightedGraph::Complete(int n, RootConstraint constraint,
                                      double w) {
  WeightedGraph g(n, constraint);
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i != j) g.set_weight(i, j, w);
    }
  }
  return g;
}

void WeightedGraph::validate() const {
  for (int i = 0; i <= n_; ++i) {
    for (int j = 0; j <= n_; ++j) check_entry(weight(i, j), i, j);
  }
}

WeightedGraph WeightedGraph::transformed(
    const std::function<double(double)>& f) const {
  WeightedGraph out(n_, constraint_);
  for (int i = 0; i <= n_; ++i) {
    for (int j = 1; j <= n_; ++j) {
      if (i != j) out.set_weight(i, j, f(weight(i, j)));
    }
  }
  return out;
}

LabeledWeightedGraph::LabeledWeightedGraph(int n, int labels,
                                           std::vector<double> weights,
                                           RootConstraint constraint)
    : n_(n),
      labels_(labels),
      constraint_(constraint),
      weights_(std::move(weights)) {
  if (labels < 1) {
    throw StructuralError("labeled graph needs at least one label");
  }
  check_weight_table(n, static_cast<std::size_t>(n + 1) * (n + 1) * labels,
                     weights_.size());
}

void LabeledWeightedGraph::validate() const {
  for (int i = 0; i <= n_; ++i) {
    for (int j = 0; j <= n_; ++j) {
      for (int y = 0; y < labels_; ++y) check_entry(weight(i, j, y), i, j);
    }
  }
}

bool Tree::is_valid(int n, RootConstraint constraint) const {
  if (this->n() != n) return false;
  int root_children = 0;
  for (int j = 1; j <= n; ++j) {
    const int h = head(j);
    if (h < 0 || h > n || h == j) return false;
    if (h == 0) ++root_children;
  }
  if (root_children == 0) return false;
  if (constraint == RootConstraint::kSingleRoot && root_children != 1) {
    return false;
  }
  // Every parent chain must reach the root within n steps.
  for (int j = 1; j <= n; ++j) {
    int v = j;
    int steps = 0;
    while (v != 0 && steps <= n) {
      v = head(v);
      ++steps;
    }
    if (v != 0) return false;
  }
  return true;
}

void Tree::validate(int n, RootConstraint constraint) const {
  if (this->n() != n) {
    throw StructuralError("tree has " + std::to_string(this->n()) +
                          " heads, graph has " + std::to_string(n) + " nodes");
  }
  if (!is_valid(n, constraint)) {
    throw StructuralError(
        constraint == RootConstraint::kSingleRoot
            ? "not a single-root arborescence (cycle, bad head, or root "
              "out-degree != 1)"
            : "not an arborescence (cycle or bad head index)");
  }
}

void SparseVector::add(int coord, double v) {
  auto it = std::lower_bound(index.begin(), index.end(), coord);
  const auto pos = it - index.begin();
  if (it != index.end() && *it == coord) {
    value[pos] += v;
    return;
  }
  index.insert(it, coord);
  value.insert(value.begin() + pos, v);
}

EdgeFunction::EdgeFunction(int n, int dim)
    : n_(n), dim_(dim), rows_(static_cast<std::size_t>(n + 1) * (n + 1)) {
  if (n < 1 || dim < 1) {
    throw DimensionError("edge function needs n >= 1 and dim >= 1");
  }
}

void EdgeFunction::add(int head, int dep, int coord, double value) {
  if (head < 0 || head > n_ || dep < 1 || dep > n_ || head == dep) {
    throw StructuralError("edge function keyed on illegal edge " +
                          std::to_string(head) + "->" + std::to_string(dep));
  }
  if (coord < 0 || coord >= dim_) {
    throw DimensionError("coordinate " + std::to_string(coord) +
                         " outside [0, " + std::to_string(dim_) + ")");
  }
  rows_[static_cast<std::size_t>(head) * (n_ + 1) + dep].add(coord, value);
}

int EdgeFunction::max_density() const {
  std::size_t best = 0;
  for (const auto& r : rows_) best = std::max(best, r.nnz());
  return static_cast<int>(best);
}

EdgeFunction EdgeFunction::ScaledOneHot(const WeightedGraph& g) {
  const int n = g.n();
  EdgeFunction s(n, (n + 1) * (n + 1));
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      const double w = g.weight(i, j);
      if (i == j || w == 0.0) continue;
      s.add(i, j, static_cast<int>(edge_index(n, i, j)), 1.0 / w);
    }
  }
  return s;
}

}  // namespace treexp

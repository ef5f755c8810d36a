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

#ifndef TREEXP_GRAPH_HPP_
#define TREEXP_GRAPH_HPP_

#include <cstddef>
#include <compare>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace treexp {

enum class RootConstraint { kMultiRoot, kSingleRoot };

// Dense edge-weight table over a root (index 0) and non-root nodes 1..n.
// weight(i, j) is the weight of the edge i -> j. Column 0 and the diagonal are
// structurally zero; validate() enforces that and non-negativity.
class WeightedGraph {
 public:
  WeightedGraph(int n, RootConstraint constraint);
  // `weights` is row-major with (n + 1) * (n + 1) entries.
  WeightedGraph(int n, std::vector<double> weights, RootConstraint constraint);

  // Every legal edge gets weight `w`.
  static WeightedGraph Complete(int n, RootConstraint constraint,
                                double w = 1.0);

  int n() const { return n_; }
  int stride() const { return n_ + 1; }
  RootConstraint constraint() const { return constraint_; }
  bool single_root() const {
    return constraint_ == RootConstraint::kSingleRoot;
  }

  double weight(int head, int dep) const {
    return weights_[static_cast<std::size_t>(head) * stride() + dep];
  }
  void set_weight(int head, int dep, double w) {
    weights_[static_cast<std::size_t>(head) * stride() + dep] = w;
  }
  std::span<const double> weights() const { return weights_; }

  // Throws StructuralError naming the first violated invariant.
  void validate() const;

  // Same structure, every weight replaced by f(w).
  WeightedGraph transformed(const std::function<double(double)>& f) const;

 private:
  int n_;
  RootConstraint constraint_;
  std::vector<double> weights_;
};

// Multi-graph with |labels| parallel edges per ordered pair. Stored as
// weights[(head * (n + 1) + dep) * labels + y].
class LabeledWeightedGraph {
 public:
  LabeledWeightedGraph(int n, int labels, std::vector<double> weights,
                       RootConstraint constraint);

  int n() const { return n_; }
  int labels() const { return labels_; }
  RootConstraint constraint() const { return constraint_; }
  double weight(int head, int dep, int label) const {
    return weights_[(static_cast<std::size_t>(head) * (n_ + 1) + dep) *
                        labels_ +
                    label];
  }
  std::span<const double> weights() const { return weights_; }

  void validate() const;

 private:
  int n_;
  int labels_;
  RootConstraint constraint_;
  std::vector<double> weights_;
};

// One arborescence as a head assignment for nodes 1..n.
class Tree {
 public:
  Tree() = default;
  // heads[j - 1] is the head of node j.
  explicit Tree(std::vector<int> heads) : heads_(std::move(heads)) {}

  int n() const { return static_cast<int>(heads_.size()); }
  int head(int dep) const { return heads_[dep - 1]; }
  std::span<const int> heads() const { return heads_; }

  // Throws StructuralError unless this is an arborescence over n nodes that
  // honors `constraint`.
  void validate(int n, RootConstraint constraint) const;
  bool is_valid(int n, RootConstraint constraint) const;

  friend bool operator==(const Tree&, const Tree&) = default;
  friend auto operator<=>(const Tree&, const Tree&) = default;

 private:
  std::vector<int> heads_;
};

// Sparse vector in R^dim with sorted, unique coordinates.
struct SparseVector {
  std::vector<int> index;
  std::vector<double> value;

  std::size_t nnz() const { return index.size(); }
  bool empty() const { return index.empty(); }
  void add(int coord, double v);
};

// Per-edge sparse vector table r: edges -> R^dim. Absent edges are zero.
class EdgeFunction {
 public:
  EdgeFunction(int n, int dim);

  int n() const { return n_; }
  int dim() const { return dim_; }

  // Accumulates `value` into coordinate `coord` of the row for i -> j.
  void add(int head, int dep, int coord, double value);
  const SparseVector& row(int head, int dep) const {
    return rows_[static_cast<std::size_t>(head) * (n_ + 1) + dep];
  }
  // R': the largest number of nonzeros of any row.
  int max_density() const;

  // One-hot edge indicators scaled by 1/w_ij, with coordinate
  // head * (n + 1) + dep; rows of zero-weight edges stay empty.
  static EdgeFunction ScaledOneHot(const WeightedGraph& g);

 private:
  int n_;
  int dim_;
  std::vector<SparseVector> rows_;
};

// Dense (n + 1) x (n + 1) per-edge table, e.g. gradients with respect to w.
using EdgeTable = std::vector<double>;

inline std::size_t edge_index(int n, int head, int dep) {
  return static_cast<std::size_t>(head) * (n + 1) + dep;
}

}  // namespace treexp

#endif  // TREEXP_GRAPH_HPP_

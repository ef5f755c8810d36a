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

#ifndef TREEXP_ORACLE_HPP_
#define TREEXP_ORACLE_HPP_

#include <functional>
#include <vector>

#include "treexp/graph.hpp"

namespace treexp {

// Largest n the exhaustive oracles accept.
inline constexpr int kMaxEnumerationNodes = 8;

// Every arborescence of the complete graph over g's nodes that satisfies g's
// root constraint, zero-weight edges included. Throws SizeError if n > 8.
std::vector<Tree> enumerate_trees(const WeightedGraph& g);

// Calls `visit` for each arborescence without materializing the list.
void for_each_tree(int n, RootConstraint constraint,
                   const std::function<void(const Tree&)>& visit);

// Product of the n edge weights of d.
double tree_weight(const WeightedGraph& g, const Tree& d);

using TreeFunction = std::function<std::vector<double>(const Tree&)>;

// sum_d w(d) f(d) over enumerated trees. All f(d) must share one length.
std::vector<double> brute_total(const WeightedGraph& g, const TreeFunction& f);

// sum_d w(d) over enumerated trees.
double brute_partition_function(const WeightedGraph& g);

// Labeled normalizer by enumerating head and label assignments.
double brute_labeled_partition_function(const LabeledWeightedGraph& g);

// Labeled edge marginals p(i -> j with label y), same layout as the labeled
// weight table.
std::vector<double> brute_labeled_edge_marginals(const LabeledWeightedGraph& g);

// Definitional totals and quantities, each by summing over every tree. These
// share nothing with the determinant path and serve as test oracles.

// (n + 1)^2 table of summed weights of trees containing i -> j.
std::vector<double> brute_edge_totals(const WeightedGraph& g);
// (n + 1)^4 table of summed weights of trees containing both edges.
std::vector<double> brute_pairwise_totals(const WeightedGraph& g);
// sum_d w(d) r(d) and sum_d w(d) r(d) s(d)^T (row-major R x S).
std::vector<double> brute_first_total(const WeightedGraph& g,
                                      const EdgeFunction& r);
std::vector<double> brute_second_total(const WeightedGraph& g,
                                       const EdgeFunction& r,
                                       const EdgeFunction& s);

double brute_entropy(const WeightedGraph& g);
double brute_kl_divergence(const WeightedGraph& p, const WeightedGraph& q);
double brute_expected_attachment(const WeightedGraph& g, const Tree& gold);
double brute_ge_objective(const WeightedGraph& g, const EdgeFunction& features,
                          const std::vector<double>& target);
double brute_renyi_entropy(const WeightedGraph& g, double alpha);
double brute_lp_norm(const WeightedGraph& g, double k);
// Number of trees with strictly positive weight.
long brute_support_size(const WeightedGraph& g);

// Central finite differences of f with respect to every legal edge weight,
// step h = rel_step * max(1, w_ij). Returns an (n + 1)^2 table.
std::vector<double> finite_difference_gradient(
    const WeightedGraph& g, const std::function<double(const WeightedGraph&)>& f,
    double rel_step = 1e-6);

}  // namespace treexp

#endif  // TREEXP_ORACLE_HPP_

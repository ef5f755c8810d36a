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

#ifndef TREEXP_QUANTITIES_HPP_
#define TREEXP_QUANTITIES_HPP_

#include <optional>
#include <vector>

#include "treexp/expectations.hpp"
#include "treexp/graph.hpp"

namespace treexp {

// Value of a quantity and, on request, its gradient with respect to the raw
// edge weights w_ij as a dense (n + 1)^2 table. Entries for structurally
// absent edges (into the root, self-loops) are zero. For the log-weight
// parameterization multiply entry (i, j) by w_ij.
struct QuantityResult {
  double value = 0.0;
  std::optional<EdgeTable> gradient;
};

// Generalized-expectation target: F sparse edge features and f* in R^F.
struct GESpec {
  EdgeFunction features;
  std::vector<double> target;
};

enum class Gradient { kSkip, kCompute };

// E[UAS] against `gold`. r does not depend on w, so the gradient is a single
// second-order total with one-hot s.
QuantityResult expected_attachment(
    const WeightedGraph& g, const Tree& gold,
    Gradient gradient = Gradient::kSkip,
    SecondOrderAlgorithm algorithm = SecondOrderAlgorithm::kSecond);

// H(p) = E[-log p(d)] in O(N^3). Zero-weight edges contribute 0 log 0 := 0
// and get a zero gradient entry.
QuantityResult shannon_entropy(
    const WeightedGraph& g, Gradient gradient = Gradient::kSkip,
    SecondOrderAlgorithm algorithm = SecondOrderAlgorithm::kSecond);

// Same value as shannon_entropy via one extra determinant per node, O(N^4).
// Kept as the benchmark baseline.
double shannon_entropy_baseline_n4(const WeightedGraph& g);

// KL(p || q) for two graphs over the same nodes and root constraint. Gradient
// is with respect to p's weights. Throws SupportError when q is zero on an
// edge p supports.
QuantityResult kl_divergence(
    const WeightedGraph& p, const WeightedGraph& q,
    Gradient gradient = Gradient::kSkip,
    SecondOrderAlgorithm algorithm = SecondOrderAlgorithm::kSecond);

// Expected features E[f(d)] = f_bar / Z.
std::vector<double> expected_features(const WeightedGraph& g,
                                      const EdgeFunction& features);

// 1/2 ||E[f] - f*||^2.
QuantityResult ge_objective(
    const WeightedGraph& g, const GESpec& spec,
    Gradient gradient = Gradient::kSkip,
    SecondOrderAlgorithm algorithm = SecondOrderAlgorithm::kSecond);

// (1 / (1 - alpha)) log sum_d p(d)^alpha, alpha >= 0, alpha != 1.
double renyi_entropy(const WeightedGraph& g, double alpha);

// (sum_d p(d)^k)^(1/k), k > 0.
double lp_norm(const WeightedGraph& g, double k);

}  // namespace treexp

#endif  // TREEXP_QUANTITIES_HPP_

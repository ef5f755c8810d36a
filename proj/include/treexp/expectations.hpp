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

#ifndef TREEXP_EXPECTATIONS_HPP_
#define TREEXP_EXPECTATIONS_HPP_

#include <cstddef>
#include <vector>

#include "treexp/graph.hpp"
#include "treexp/laplacian.hpp"
#include "treexp/linalg.hpp"

namespace treexp {

// Totals slightly below zero from round-off are clamped to zero; anything
// below -kClampFloor * Z raises NumericalError.
inline constexpr double kClampFloor = 1e-9;

// Clamp a normalized total (total / Z) that must be non-negative.
double clamp_nonnegative(double normalized, const char* what);

// The O(N^3) state every derivative formula shares: one LU of the Laplacian,
// B = L^{-T}, and the edge marginals w_ij * dlogZ/dw_ij.
//
// Everything here lives at expectation scale (totals divided by Z), so Z may
// overflow a double without affecting marginals or second-order results.
class DerivativeCache {
 public:
  // Throws SingularError when Z = 0.
  explicit DerivativeCache(const WeightedGraph& g);

  const WeightedGraph& graph() const { return g_; }
  int n() const { return g_.n(); }

  int z_sign() const { return logdet_.sign; }
  double log_abs_z() const { return logdet_.log_abs; }
  // Z itself; +-inf if it overflows.
  double z() const;

  // B entry for 1-based node indices.
  double b(int row, int col) const { return b_(row - 1, col - 1); }
  const Matrix& b_matrix() const { return b_; }

  const GammaEntry& gamma(int head, int dep) const {
    return gammas_[edge_index(n(), head, dep)];
  }

  // (dZ/dw_ij) / Z = sum over Gamma(i,j) of coeff * B.
  double grad_log_z(int head, int dep) const {
    return grad_log_z_[edge_index(n(), head, dep)];
  }
  // w_ij_bar / Z, clamped.
  double marginal(int head, int dep) const {
    return marginals_[edge_index(n(), head, dep)];
  }
  const EdgeTable& marginals() const { return marginals_; }

  // (d2Z / dw_ij dw_kl) / Z.
  double hessian_log_scale(int i, int j, int k, int l) const;

  // w_ij,kl_bar / Z, clamped; exactly zero when (i,j) == (k,l).
  double pairwise_marginal(int i, int j, int k, int l) const {
    if (i == k && j == l) return 0.0;
    const double w = g_.weight(i, j) * g_.weight(k, l);
    if (w == 0.0) return 0.0;
    return clamp_nonnegative(w * hessian_log_scale(i, j, k, l),
                             "pairwise total");
  }

 private:
  WeightedGraph g_;
  SignedLogDet logdet_;
  Matrix b_;
  std::vector<GammaEntry> gammas_;
  EdgeTable grad_log_z_;
  EdgeTable marginals_;
};

// Visits every ordered pair of legal edges with its pairwise marginal, in
// row-major edge order. The Hessian is never materialized.
template <class Visitor>
void stream_pairwise_marginals(const DerivativeCache& cache, Visitor&& visit) {
  const int n = cache.n();
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      for (int k = 0; k <= n; ++k) {
        for (int l = 1; l <= n; ++l) {
          if (k == l) continue;
          visit(i, j, k, l, cache.pairwise_marginal(i, j, k, l));
        }
      }
    }
  }
}

struct EdgeTotals {
  int n = 0;
  double z = 0.0;
  EdgeTable totals;  // (n + 1)^2, totals[edge_index(n, i, j)] = w_ij_bar

  double at(int head, int dep) const { return totals[edge_index(n, head, dep)]; }
};

struct PairwiseTotals {
  int n = 0;
  std::vector<double> totals;  // (n + 1)^4

  double at(int i, int j, int k, int l) const {
    const std::size_t e = static_cast<std::size_t>(n + 1) * (n + 1);
    return totals[edge_index(n, i, j) * e + edge_index(n, k, l)];
  }
};

// t_bar for t(d) = r(d) s(d)^T, R x S.
struct SecondOrderResult {
  Matrix t_bar;
};

enum class SecondOrderAlgorithm {
  kSecond,     // unified r-hat / s-hat refactoring, O(N^3 (R' + S') + ...)
  kSecondHes,  // streams the Hessian of Z, O(N^4 R' S')
  kSecondVjp,  // R Hessian-vector products, O(R (N^3 + N^2 R') + N^2 R S')
};

EdgeTotals edge_totals(const WeightedGraph& g);
PairwiseTotals pairwise_totals(const WeightedGraph& g);

std::vector<double> first_total(const WeightedGraph& g, const EdgeFunction& r);
SecondOrderResult second_total(const WeightedGraph& g, const EdgeFunction& r,
                               const EdgeFunction& s);
SecondOrderResult second_total_hes(const WeightedGraph& g,
                                   const EdgeFunction& r,
                                   const EdgeFunction& s);
SecondOrderResult second_total_vjp(const WeightedGraph& g,
                                   const EdgeFunction& r,
                                   const EdgeFunction& s);
SecondOrderResult second_total(const WeightedGraph& g, const EdgeFunction& r,
                               const EdgeFunction& s,
                               SecondOrderAlgorithm algorithm);

// d r_bar_coord / dw_ij for every edge, via one Hessian-vector product.
EdgeTable first_total_gradient(const WeightedGraph& g, const EdgeFunction& r,
                               int coord);

// The pieces of the unified algorithm, exposed so the refactoring can be
// checked term by term: t_bar = f_bar + r_bar s_bar^T / Z - Z * hat_sum.
struct SecondDecomposition {
  double z;
  std::vector<double> r_bar;
  std::vector<double> s_bar;
  Matrix f_bar;
  Matrix hat_sum;  // sum_{j',l'} r_hat_{j'l'} s_hat_{j'l'}^T
};
SecondDecomposition second_decomposition(const WeightedGraph& g,
                                         const EdgeFunction& r,
                                         const EdgeFunction& s);

// Expectation-scale kernels (results divided by Z) over a shared cache.
std::vector<double> first_expectation(const DerivativeCache& cache,
                                      const EdgeFunction& r);
Matrix second_expectation(const DerivativeCache& cache, const EdgeFunction& r,
                          const EdgeFunction& s,
                          SecondOrderAlgorithm algorithm);
EdgeTable first_expectation_gradient(const DerivativeCache& cache,
                                     const EdgeFunction& r, int coord);

// p(i -> j with label y) = (w_ijy / w_ij) p(i -> j), 0/0 := 0. Laid out like
// LabeledWeightedGraph::weights().
std::vector<double> labeled_edge_marginals(const LabeledWeightedGraph& g);

}  // namespace treexp

#endif  // TREEXP_EXPECTATIONS_HPP_

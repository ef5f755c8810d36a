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

#include "treexp/expectations.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "treexp/error.hpp"

namespace treexp {
namespace {

// Sign of the cross term of d2|L| / dL_ab dL_a'b'. The fault-injection build
// flips it so the verifier can be shown to catch a broken Hessian.
#ifdef TREEXP_FAULT_NEGATE_HESSIAN
constexpr double kCrossTermSign = +1.0;
#else
constexpr double kCrossTermSign = -1.0;
#endif

bool legal_edge(int i, int j) { return j != 0 && i != j; }

// Per-coordinate view of an edge function: for coordinate n, the (edge,
// value) pairs with a nonzero entry.
struct CoordEntry {
  int head;
  int dep;
  double value;
};

std::vector<std::vector<CoordEntry>> by_coordinate(const EdgeFunction& r) {
  std::vector<std::vector<CoordEntry>> out(r.dim());
  const int n = r.n();
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      const SparseVector& row = r.row(i, j);
      for (std::size_t t = 0; t < row.nnz(); ++t) {
        out[row.index[t]].push_back({i, j, row.value[t]});
      }
    }
  }
  return out;
}

void check_compatible(const DerivativeCache& cache, const EdgeFunction& f,
                      const char* name) {
  if (f.n() != cache.n()) {
    throw DimensionError(std::string("edge function ") + name + " has n=" +
                         std::to_string(f.n()) + ", graph has n=" +
                         std::to_string(cache.n()));
  }
}

// One Hessian-vector product: (d r_bar_coord / dw_ij) / Z for every edge,
// contracting the d2Z structure against the coordinate through B only.
EdgeTable hvp_gradient(const DerivativeCache& cache,
                       const std::vector<CoordEntry>& entries) {
  const int n = cache.n();
  const WeightedGraph& g = cache.graph();
  const Matrix& b = cache.b_matrix();

  EdgeTable r_coord(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
  double rho = 0.0;  // r_bar_coord / Z
  Matrix x(n, n);
  for (const CoordEntry& e : entries) {
    r_coord[edge_index(n, e.head, e.dep)] += e.value;
    rho += cache.marginal(e.head, e.dep) * e.value;
    const double wv = g.weight(e.head, e.dep) * e.value;
    if (wv == 0.0) continue;
    for (const GammaCell& cell : cache.gamma(e.head, e.dep)) {
      auto brow = b.row(cell.row - 1);
      auto xrow = x.row(cell.col - 1);
      const double scale = cell.coeff * wv;
      for (int col = 0; col < n; ++col) xrow[col] += scale * brow[col];
    }
  }
  const Matrix y = b * x;

  EdgeTable grad(r_coord.size(), 0.0);
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      double second = 0.0;
      for (const GammaCell& cell : cache.gamma(i, j)) {
        second += cell.coeff * (cache.b(cell.row, cell.col) * rho -
                                y(cell.row - 1, cell.col - 1));
      }
      grad[edge_index(n, i, j)] =
          cache.grad_log_z(i, j) * r_coord[edge_index(n, i, j)] + second;
    }
  }
  return grad;
}

// Per-column accumulator for r-hat / s-hat: rows are the free node index,
// columns the union support of the rows feeding this column.
struct HatBlock {
  std::vector<int> coords;
  Matrix values;

  int local(int coord) const {
    return static_cast<int>(
        std::lower_bound(coords.begin(), coords.end(), coord) -
        coords.begin());
  }
};

// Builds one block per Laplacian column c = 1..n from the edges into c. For
// every edge (i, c) and cell (a, c) of its Gamma, adds coeff * w * B(a, free)
// * f_ic into row `free`.
std::vector<HatBlock> accumulate_hats(const DerivativeCache& cache,
                                      const EdgeFunction& f) {
  const int n = cache.n();
  const WeightedGraph& g = cache.graph();
  std::vector<HatBlock> blocks(n + 1);
  for (int c = 1; c <= n; ++c) {
    HatBlock& blk = blocks[c];
    for (int i = 0; i <= n; ++i) {
      if (i == c || g.weight(i, c) == 0.0) continue;
      const auto& idx = f.row(i, c).index;
      blk.coords.insert(blk.coords.end(), idx.begin(), idx.end());
    }
    std::sort(blk.coords.begin(), blk.coords.end());
    blk.coords.erase(std::unique(blk.coords.begin(), blk.coords.end()),
                     blk.coords.end());
    blk.values = Matrix(n, static_cast<int>(blk.coords.size()));
    if (blk.coords.empty()) continue;

    for (int i = 0; i <= n; ++i) {
      if (i == c) continue;
      const double w = g.weight(i, c);
      const SparseVector& row = f.row(i, c);
      if (w == 0.0 || row.empty()) continue;
      std::vector<int> locals(row.nnz());
      for (std::size_t t = 0; t < row.nnz(); ++t) {
        locals[t] = blk.local(row.index[t]);
      }
      for (const GammaCell& cell : cache.gamma(i, c)) {
        const double scale = cell.coeff * w;
        for (int free = 1; free <= n; ++free) {
          const double bw = scale * cache.b(cell.row, free);
          if (bw == 0.0) continue;
          auto out = blk.values.row(free - 1);
          for (std::size_t t = 0; t < row.nnz(); ++t) {
            out[locals[t]] += bw * row.value[t];
          }
        }
      }
    }
  }
  return blocks;
}

// sum_{j',l'} r_hat_{j'l'} s_hat_{j'l'}^T where r_hat_{j'l'} lives in the
// r-block of column l' (row j') and s_hat_{j'l'} in the s-block of column j'
// (row l').
Matrix hat_contraction(const DerivativeCache& cache, const EdgeFunction& r,
                       const EdgeFunction& s) {
  const int n = cache.n();
  const std::vector<HatBlock> r_hat = accumulate_hats(cache, r);
  const std::vector<HatBlock> s_hat = accumulate_hats(cache, s);
  Matrix out(r.dim(), s.dim());
  for (int lp = 1; lp <= n; ++lp) {
    const HatBlock& rb = r_hat[lp];
    if (rb.coords.empty()) continue;
    for (int jp = 1; jp <= n; ++jp) {
      const HatBlock& sb = s_hat[jp];
      if (sb.coords.empty()) continue;
      auto rrow = rb.values.row(jp - 1);
      auto srow = sb.values.row(lp - 1);
      for (std::size_t u = 0; u < rb.coords.size(); ++u) {
        const double ru = rrow[u];
        if (ru == 0.0) continue;
        auto orow = out.row(rb.coords[u]);
        for (std::size_t v = 0; v < sb.coords.size(); ++v) {
          orow[sb.coords[v]] += ru * srow[v];
        }
      }
    }
  }
  return out;
}

// sum_ij mu_ij r_ij s_ij^T.
Matrix diagonal_term(const DerivativeCache& cache, const EdgeFunction& r,
                     const EdgeFunction& s) {
  const int n = cache.n();
  Matrix out(r.dim(), s.dim());
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      const double mu = cache.marginal(i, j);
      if (mu == 0.0) continue;
      const SparseVector& ri = r.row(i, j);
      const SparseVector& si = s.row(i, j);
      for (std::size_t a = 0; a < ri.nnz(); ++a) {
        auto orow = out.row(ri.index[a]);
        const double m = mu * ri.value[a];
        for (std::size_t c = 0; c < si.nnz(); ++c) {
          orow[si.index[c]] += m * si.value[c];
        }
      }
    }
  }
  return out;
}

Matrix second_unified(const DerivativeCache& cache, const EdgeFunction& r,
                      const EdgeFunction& s) {
  const std::vector<double> r_bar = first_expectation(cache, r);
  const std::vector<double> s_bar = first_expectation(cache, s);
  Matrix t = diagonal_term(cache, r, s);
  const Matrix hats = hat_contraction(cache, r, s);
  for (int a = 0; a < t.rows(); ++a) {
    auto trow = t.row(a);
    auto hrow = hats.row(a);
    for (int c = 0; c < t.cols(); ++c) {
      trow[c] += r_bar[a] * s_bar[c] - hrow[c];
    }
  }
  return t;
}

Matrix second_hes(const DerivativeCache& cache, const EdgeFunction& r,
                  const EdgeFunction& s) {
  const int n = cache.n();
  const WeightedGraph& g = cache.graph();
  Matrix t = diagonal_term(cache, r, s);
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i == j || g.weight(i, j) == 0.0) continue;
      const SparseVector& rij = r.row(i, j);
      if (rij.empty()) continue;
      for (int k = 0; k <= n; ++k) {
        for (int l = 1; l <= n; ++l) {
          if (k == l || g.weight(k, l) == 0.0) continue;
          const SparseVector& skl = s.row(k, l);
          if (skl.empty()) continue;
          const double pm = cache.pairwise_marginal(i, j, k, l);
          if (pm == 0.0) continue;
          for (std::size_t a = 0; a < rij.nnz(); ++a) {
            auto trow = t.row(rij.index[a]);
            const double m = pm * rij.value[a];
            for (std::size_t c = 0; c < skl.nnz(); ++c) {
              trow[skl.index[c]] += m * skl.value[c];
            }
          }
        }
      }
    }
  }
  return t;
}

Matrix second_vjp(const DerivativeCache& cache, const EdgeFunction& r,
                  const EdgeFunction& s) {
  const int n = cache.n();
  const WeightedGraph& g = cache.graph();
  const auto coords = by_coordinate(r);
  Matrix t(r.dim(), s.dim());
  for (int coord = 0; coord < r.dim(); ++coord) {
    if (coords[coord].empty()) continue;
    const EdgeTable jac = hvp_gradient(cache, coords[coord]);
    auto trow = t.row(coord);
    for (int i = 0; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        if (i == j) continue;
        const SparseVector& sij = s.row(i, j);
        const double jw = jac[edge_index(n, i, j)] * g.weight(i, j);
        if (jw == 0.0) continue;
        for (std::size_t c = 0; c < sij.nnz(); ++c) {
          trow[sij.index[c]] += jw * sij.value[c];
        }
      }
    }
  }
  return t;
}

SecondOrderResult scaled(Matrix m, double z) {
  for (int a = 0; a < m.rows(); ++a) {
    for (double& v : m.row(a)) v *= z;
  }
  return {std::move(m)};
}

}  // namespace

double clamp_nonnegative(double normalized, const char* what) {
  if (normalized >= 0.0) return normalized;
  if (normalized > -kClampFloor) return 0.0;
  throw NumericalError(std::string(what) + " is negative beyond round-off (" +
                       std::to_string(normalized) + " * Z)");
}

DerivativeCache::DerivativeCache(const WeightedGraph& g) : g_(g) {
  const int n = g.n();
  const LUFactors lu = lu_factor(build_laplacian(g).matrix);
  logdet_ = sign_log_determinant(lu);
  if (logdet_.sign == 0) {
    throw SingularError("Z = 0: no arborescence has positive weight");
  }
  b_ = inverse_transposed(lu);

  const std::size_t edges = static_cast<std::size_t>(n + 1) * (n + 1);
  gammas_.assign(edges, GammaEntry{});
  grad_log_z_.assign(edges, 0.0);
  marginals_.assign(edges, 0.0);
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      const std::size_t e = edge_index(n, i, j);
      gammas_[e] = treexp::gamma(g.constraint(), i, j);
      double d = 0.0;
      for (const GammaCell& cell : gammas_[e]) {
        d += cell.coeff * b(cell.row, cell.col);
      }
      grad_log_z_[e] = d;
      marginals_[e] = clamp_nonnegative(g.weight(i, j) * d, "edge total");
    }
  }
}

double DerivativeCache::z() const {
  return logdet_.sign * std::exp(logdet_.log_abs);
}

double DerivativeCache::hessian_log_scale(int i, int j, int k, int l) const {
  // Evaluate in a fixed edge order so (ij, kl) and (kl, ij) agree bitwise.
  if (edge_index(n(), k, l) < edge_index(n(), i, j)) {
    std::swap(i, k);
    std::swap(j, l);
  }
  double h = 0.0;
  for (const GammaCell& p : gamma(i, j)) {
    for (const GammaCell& q : gamma(k, l)) {
      const double direct = b(p.row, p.col) * b(q.row, q.col);
      const double cross = b(p.row, q.col) * b(q.row, p.col);
      h += p.coeff * q.coeff * (direct + kCrossTermSign * cross);
    }
  }
  return h;
}

EdgeTotals edge_totals(const WeightedGraph& g) {
  const DerivativeCache cache(g);
  EdgeTotals out{g.n(), cache.z(), cache.marginals()};
  for (double& v : out.totals) v *= out.z;
  return out;
}

PairwiseTotals pairwise_totals(const WeightedGraph& g) {
  const DerivativeCache cache(g);
  const int n = g.n();
  const std::size_t e = static_cast<std::size_t>(n + 1) * (n + 1);
  PairwiseTotals out{n, std::vector<double>(e * e, 0.0)};
  const double z = cache.z();
  stream_pairwise_marginals(cache, [&](int i, int j, int k, int l, double pm) {
    out.totals[edge_index(n, i, j) * e + edge_index(n, k, l)] = z * pm;
  });
  return out;
}

std::vector<double> first_expectation(const DerivativeCache& cache,
                                      const EdgeFunction& r) {
  check_compatible(cache, r, "r");
  const int n = cache.n();
  std::vector<double> out(r.dim(), 0.0);
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      const double mu = cache.marginal(i, j);
      if (mu == 0.0) continue;
      const SparseVector& row = r.row(i, j);
      for (std::size_t t = 0; t < row.nnz(); ++t) {
        out[row.index[t]] += mu * row.value[t];
      }
    }
  }
  return out;
}

Matrix second_expectation(const DerivativeCache& cache, const EdgeFunction& r,
                          const EdgeFunction& s,
                          SecondOrderAlgorithm algorithm) {
  check_compatible(cache, r, "r");
  check_compatible(cache, s, "s");
  switch (algorithm) {
    case SecondOrderAlgorithm::kSecond:
      return second_unified(cache, r, s);
    case SecondOrderAlgorithm::kSecondHes:
      return second_hes(cache, r, s);
    case SecondOrderAlgorithm::kSecondVjp:
      return second_vjp(cache, r, s);
  }
  throw DomainError("unknown second-order algorithm");
}

EdgeTable first_expectation_gradient(const DerivativeCache& cache,
                                     const EdgeFunction& r, int coord) {
  check_compatible(cache, r, "r");
  if (coord < 0 || coord >= r.dim()) {
    throw DimensionError("coordinate out of range");
  }
  return hvp_gradient(cache, by_coordinate(r)[coord]);
}

std::vector<double> first_total(const WeightedGraph& g, const EdgeFunction& r) {
  const DerivativeCache cache(g);
  std::vector<double> out = first_expectation(cache, r);
  const double z = cache.z();
  for (double& v : out) v *= z;
  return out;
}

SecondOrderResult second_total(const WeightedGraph& g, const EdgeFunction& r,
                               const EdgeFunction& s,
                               SecondOrderAlgorithm algorithm) {
  const DerivativeCache cache(g);
  return scaled(second_expectation(cache, r, s, algorithm), cache.z());
}

SecondOrderResult second_total(const WeightedGraph& g, const EdgeFunction& r,
                               const EdgeFunction& s) {
  return second_total(g, r, s, SecondOrderAlgorithm::kSecond);
}

SecondOrderResult second_total_hes(const WeightedGraph& g,
                                   const EdgeFunction& r,
                                   const EdgeFunction& s) {
  return second_total(g, r, s, SecondOrderAlgorithm::kSecondHes);
}

SecondOrderResult second_total_vjp(const WeightedGraph& g,
                                   const EdgeFunction& r,
                                   const EdgeFunction& s) {
  return second_total(g, r, s, SecondOrderAlgorithm::kSecondVjp);
}

EdgeTable first_total_gradient(const WeightedGraph& g, const EdgeFunction& r,
                               int coord) {
  const DerivativeCache cache(g);
  EdgeTable grad = first_expectation_gradient(cache, r, coord);
  const double z = cache.z();
  for (double& v : grad) v *= z;
  return grad;
}

SecondDecomposition second_decomposition(const WeightedGraph& g,
                                         const EdgeFunction& r,
                                         const EdgeFunction& s) {
  const DerivativeCache cache(g);
  check_compatible(cache, r, "r");
  check_compatible(cache, s, "s");
  const double z = cache.z();
  SecondDecomposition out{z, first_expectation(cache, r),
                          first_expectation(cache, s),
                          diagonal_term(cache, r, s),
                          hat_contraction(cache, r, s)};
  for (double& v : out.r_bar) v *= z;
  for (double& v : out.s_bar) v *= z;
  out.f_bar = scaled(std::move(out.f_bar), z).t_bar;
  return out;
}

std::vector<double> labeled_edge_marginals(const LabeledWeightedGraph& g) {
  const WeightedGraph collapsed = collapse_labels(g);
  const DerivativeCache cache(collapsed);
  const int n = g.n();
  const int labels = g.labels();
  std::vector<double> out(g.weights().size(), 0.0);
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (!legal_edge(i, j)) continue;
      const double w = collapsed.weight(i, j);
      if (w == 0.0) continue;
      const double mu = cache.marginal(i, j);
      for (int y = 0; y < labels; ++y) {
        out[edge_index(n, i, j) * labels + y] = g.weight(i, j, y) / w * mu;
      }
    }
  }
  return out;
}

}  // namespace treexp

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

#include "treexp/quantities.hpp"

#include <cmath>
#include <string>

#include "treexp/error.hpp"
#include "treexp/laplacian.hpp"

namespace treexp {
namespace {

// w^power with 0^power := 0 for every power >= 0, so that zero-weight edges
// stay outside the support.
double support_pow(double w, double power) {
  return w == 0.0 ? 0.0 : std::pow(w, power);
}

void require_positive(const DerivativeCache& cache) {
  if (cache.z_sign() <= 0) {
    throw SingularError("Z <= 0: distribution is not normalizable");
  }
}

double require_positive_log_z(const WeightedGraph& g) {
  const SignedLogDet z = log_partition_function(g);
  if (z.sign <= 0) {
    throw SingularError("Z <= 0: distribution is not normalizable");
  }
  return z.log_abs;
}

// Gradient of E = r_bar / Z for an r that may depend on w:
//   dE/dw = t / Z + first_order / Z - E * dlogZ/dw,
// where t = Second(r, one-hot / w) and first_order = sum_ij w_bar_ij dr_ij/dw.
// `first_order_over_z` is already divided by Z.
EdgeTable expectation_gradient(const DerivativeCache& cache,
                               const EdgeFunction& r, double expectation,
                               const EdgeTable& first_order_over_z,
                               SecondOrderAlgorithm algorithm) {
  const WeightedGraph& g = cache.graph();
  const int n = g.n();
  const EdgeFunction s = EdgeFunction::ScaledOneHot(g);
  const Matrix t = second_expectation(cache, r, s, algorithm);
  EdgeTable grad(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      const std::size_t e = edge_index(n, i, j);
      const double first = first_order_over_z.empty() ? 0.0
                                                      : first_order_over_z[e];
      grad[e] = t(0, static_cast<int>(e)) + first -
                expectation * cache.grad_log_z(i, j);
    }
  }
  return grad;
}

void zero_unsupported(const WeightedGraph& g, EdgeTable& grad) {
  const int n = g.n();
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i != j && g.weight(i, j) == 0.0) grad[edge_index(n, i, j)] = 0.0;
    }
  }
}

double sum_of_marginals(const DerivativeCache& cache) {
  double total = 0.0;
  for (double m : cache.marginals()) total += m;
  return total;
}

}  // namespace

QuantityResult expected_attachment(const WeightedGraph& g, const Tree& gold,
                                   Gradient gradient,
                                   SecondOrderAlgorithm algorithm) {
  gold.validate(g.n(), g.constraint());
  const DerivativeCache cache(g);
  require_positive(cache);
  const int n = g.n();
  EdgeFunction r(n, 1);
  for (int j = 1; j <= n; ++j) r.add(gold.head(j), j, 0, 1.0 / n);

  QuantityResult out;
  out.value = first_expectation(cache, r)[0];
  if (gradient == Gradient::kCompute) {
    out.gradient = expectation_gradient(cache, r, out.value, {}, algorithm);
  }
  return out;
}

QuantityResult shannon_entropy(const WeightedGraph& g, Gradient gradient,
                               SecondOrderAlgorithm algorithm) {
  const DerivativeCache cache(g);
  require_positive(cache);
  const int n = g.n();
  const double log_z = cache.log_abs_z();

  // r_ij = (1/N) log Z - log w_ij; zero-weight edges carry no mass.
  QuantityResult out;
  out.value = 0.0;
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      const double w = g.weight(i, j);
      if (i == j || w == 0.0) continue;
      out.value += cache.marginal(i, j) * (log_z / n - std::log(w));
    }
  }
  if (gradient == Gradient::kCompute) {
    EdgeFunction r(n, 1);
    for (int i = 0; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        const double w = g.weight(i, j);
        if (i == j || w == 0.0) continue;
        r.add(i, j, 0, log_z / n - std::log(w));
      }
    }
    // dr_ij/dw = (1 / (N Z)) dZ/dw - e_ij / w_ij.
    const double mass = sum_of_marginals(cache) / n;
    EdgeTable first(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
    for (int i = 0; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        if (i == j) continue;
        const double w = g.weight(i, j);
        double v = mass * cache.grad_log_z(i, j);
        if (w != 0.0) v -= cache.marginal(i, j) / w;
        first[edge_index(n, i, j)] = v;
      }
    }
    EdgeTable grad =
        expectation_gradient(cache, r, out.value, first, algorithm);
    zero_unsupported(g, grad);
    out.gradient = std::move(grad);
  }
  return out;
}

double shannon_entropy_baseline_n4(const WeightedGraph& g) {
  const int n = g.n();
  const double log_z = require_positive_log_z(g);
  const Laplacian lap = build_laplacian(g);

  // Column j of the Laplacian is linear in the weights of the edges into j,
  // and every tree uses exactly one of them, so substituting w log w into
  // that column yields sum_d w(d) log w_{head(j) j}.
  double expected_log_weight = 0.0;
  for (int j = 1; j <= n; ++j) {
    WeightedGraph column = g;
    for (int i = 0; i <= n; ++i) {
      const double w = g.weight(i, j);
      if (i == j) continue;
      column.set_weight(i, j, w == 0.0 ? 0.0 : w * std::log(w));
    }
    Matrix m = lap.matrix;
    const Matrix substituted = build_laplacian(column).matrix;
    for (int row = 0; row < n; ++row) m(row, j - 1) = substituted(row, j - 1);
    const SignedLogDet d = sign_log_determinant(m);
    if (d.sign != 0) expected_log_weight += d.sign * std::exp(d.log_abs - log_z);
  }
  return log_z - expected_log_weight;
}

QuantityResult kl_divergence(const WeightedGraph& p, const WeightedGraph& q,
                             Gradient gradient,
                             SecondOrderAlgorithm algorithm) {
  if (p.n() != q.n() || p.constraint() != q.constraint()) {
    throw DimensionError(
        "KL requires p and q over the same nodes and root constraint");
  }
  const DerivativeCache cache(p);
  require_positive(cache);
  const int n = p.n();
  const double log_zp = cache.log_abs_z();

  // q may itself have Z_q = 0 only if absolute continuity already fails.
  const SignedLogDet zq = log_partition_function(q);

  constexpr double kSupportThreshold = 1e-12;
  EdgeFunction r(n, 1);
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i == j || p.weight(i, j) == 0.0) continue;
      if (q.weight(i, j) == 0.0) {
        if (cache.marginal(i, j) > kSupportThreshold) {
          throw SupportError("q has zero weight on edge " + std::to_string(i) +
                             "->" + std::to_string(j) + " supported by p");
        }
      }
    }
  }
  if (zq.sign <= 0) {
    throw SupportError("q admits no tree of positive weight");
  }
  const double log_zq = zq.log_abs;
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      const double w = p.weight(i, j);
      const double qw = q.weight(i, j);
      if (i == j || w == 0.0 || qw == 0.0) continue;
      r.add(i, j, 0, std::log(w / qw) + (log_zq - log_zp) / n);
    }
  }

  // KL is non-negative; round-off below zero is clamped like other totals.
  const double raw = first_expectation(cache, r)[0];
  QuantityResult out;
  out.value = clamp_nonnegative(raw, "KL divergence");
  if (gradient == Gradient::kCompute) {
    // dr_ij/dw = e_ij / w_ij - (1 / (N Z)) dZ/dw.
    const double mass = sum_of_marginals(cache) / n;
    EdgeTable first(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
    for (int i = 0; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        if (i == j) continue;
        const double w = p.weight(i, j);
        double v = -mass * cache.grad_log_z(i, j);
        if (w != 0.0 && q.weight(i, j) != 0.0) v += cache.marginal(i, j) / w;
        first[edge_index(n, i, j)] = v;
      }
    }
    EdgeTable grad =
        expectation_gradient(cache, r, raw, first, algorithm);
    zero_unsupported(p, grad);
    out.gradient = std::move(grad);
  }
  return out;
}

std::vector<double> expected_features(const WeightedGraph& g,
                                      const EdgeFunction& features) {
  const DerivativeCache cache(g);
  require_positive(cache);
  return first_expectation(cache, features);
}

QuantityResult ge_objective(const WeightedGraph& g, const GESpec& spec,
                            Gradient gradient,
                            SecondOrderAlgorithm algorithm) {
  if (static_cast<int>(spec.target.size()) != spec.features.dim()) {
    throw DimensionError("GE target has " + std::to_string(spec.target.size()) +
                         " entries, features have dimension " +
                         std::to_string(spec.features.dim()));
  }
  const DerivativeCache cache(g);
  require_positive(cache);
  const int n = g.n();
  const std::vector<double> expected = first_expectation(cache, spec.features);

  std::vector<double> residual(expected.size());
  QuantityResult out;
  for (std::size_t f = 0; f < expected.size(); ++f) {
    residual[f] = expected[f] - spec.target[f];
    out.value += 0.5 * residual[f] * residual[f];
  }
  if (gradient == Gradient::kCompute) {
    // d GE = sum_f res_f dE[f_f]; contract f with the residual so Second runs
    // with R = 1. res is held constant, so r does not depend on w.
    EdgeFunction contracted(n, 1);
    double res_dot_expected = 0.0;
    for (std::size_t f = 0; f < expected.size(); ++f) {
      res_dot_expected += residual[f] * expected[f];
    }
    for (int i = 0; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        if (i == j) continue;
        const SparseVector& row = spec.features.row(i, j);
        double v = 0.0;
        for (std::size_t t = 0; t < row.nnz(); ++t) {
          v += row.value[t] * residual[row.index[t]];
        }
        if (!row.empty()) contracted.add(i, j, 0, v);
      }
    }
    out.gradient = expectation_gradient(cache, contracted, res_dot_expected,
                                        {}, algorithm);
  }
  return out;
}

double renyi_entropy(const WeightedGraph& g, double alpha) {
  if (!std::isfinite(alpha) || alpha < 0.0 || alpha == 1.0) {
    throw DomainError("Renyi entropy needs alpha >= 0 and alpha != 1, got " +
                      std::to_string(alpha) +
                      " (use shannon_entropy for alpha = 1)");
  }
  const double log_z = require_positive_log_z(g);
  const double log_q =
      require_positive_log_z(g.transformed([alpha](double w) {
        return support_pow(w, alpha);
      }));
  return (log_q - alpha * log_z) / (1.0 - alpha);
}

double lp_norm(const WeightedGraph& g, double k) {
  if (!std::isfinite(k) || k <= 0.0) {
    throw DomainError("l_k norm needs k > 0, got " + std::to_string(k));
  }
  const double log_z = require_positive_log_z(g);
  const double log_q = require_positive_log_z(
      g.transformed([k](double w) { return support_pow(w, k); }));
  return std::exp((log_q - k * log_z) / k);
}

}  // namespace treexp

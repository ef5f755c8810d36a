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

#include "treexp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "treexp/error.hpp"
#include "treexp/expectations.hpp"
#include "treexp/laplacian.hpp"
#include "treexp/oracle.hpp"
#include "treexp/quantities.hpp"
#include "treexp/random.hpp"

namespace treexp {
namespace {

// "" on pass, otherwise a description of the worst offending entry.
using Outcome = std::string;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

Outcome compare_scalar(double actual, double expected, double rtol,
                       double atol = 0.0) {
  const double err = std::abs(actual - expected);
  if (err <= rtol * std::abs(expected) + atol) return {};
  return "actual " + fmt(actual) + " vs expected " + fmt(expected);
}

// Entrywise relative comparison; entries much smaller than the array's scale
// are compared against 1e-3 of that scale instead of their own magnitude.
Outcome compare_arrays(std::span<const double> actual,
                       std::span<const double> expected, double rtol) {
  if (actual.size() != expected.size()) return "size mismatch";
  double scale = 0.0;
  for (double v : expected) scale = std::max(scale, std::abs(v));
  const double floor = std::max(1e-3 * scale, 1e-300);
  for (std::size_t k = 0; k < actual.size(); ++k) {
    const double err = std::abs(actual[k] - expected[k]);
    if (!(err <= rtol * std::max(std::abs(expected[k]), floor))) {
      return "entry " + std::to_string(k) + ": actual " + fmt(actual[k]) +
             " vs expected " + fmt(expected[k]);
    }
  }
  return {};
}

Outcome compare_gradient(const WeightedGraph& g, const EdgeTable& analytic,
                         const EdgeTable& numeric,
                         const VerifyTolerances& tol) {
  const int n = g.n();
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      const std::size_t e = edge_index(n, i, j);
      const double a = analytic[e];
      const double f = numeric[e];
      const bool ok = std::abs(a) < tol.fd_abs
                          ? std::abs(f - a) <= tol.fd_abs
                          : std::abs(f - a) <= tol.fd_rel * std::abs(a);
      if (!ok) {
        return "edge " + std::to_string(i) + "->" + std::to_string(j) +
               ": analytic " + fmt(a) + " vs finite difference " + fmt(f);
      }
    }
  }
  return {};
}

class Checker {
 public:
  Checker(VerifyReport& report, std::uint64_t seed, int n)
      : report_(report), seed_(seed), n_(n) {}

  void check(const std::string& property,
             const std::function<Outcome()>& body) {
    Outcome outcome;
    try {
      outcome = body();
    } catch (const std::exception& e) {
      outcome = std::string("exception: ") + e.what();
    }
    PropertyCount& count = report_.by_property[property];
    if (outcome.empty()) {
      ++count.passed;
      ++report_.passed;
    } else {
      ++count.failed;
      ++report_.failed;
      report_.failures.push_back({seed_, n_, property, outcome});
    }
  }

 private:
  VerifyReport& report_;
  std::uint64_t seed_;
  int n_;
};

void verify_instance(Checker& c, Rng& rng, int n, RootConstraint constraint,
                     const VerifyTolerances& tol) {
  const WeightedGraph g = random_graph(rng, n, constraint);
  const WeightedGraph q = random_graph(rng, n, constraint);
  const int dim_r = 4;
  const int dim_s = 3;
  const EdgeFunction r = random_edge_function(rng, n, dim_r, 2);
  const EdgeFunction s = random_edge_function(rng, n, dim_s, dim_s);
  const Tree gold = random_tree(rng, n, constraint);
  const EdgeFunction features = random_edge_function(rng, n, 6, 2);
  std::vector<double> target(6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double& t : target) t = unit(rng);
  const GESpec ge{features, target};

  const double z_brute = brute_partition_function(g);

  c.check("partition_vs_brute", [&] {
    return compare_scalar(partition_function(g), z_brute, tol.partition);
  });
  c.check("arborescence_count", [&] {
    const double expected =
        constraint == RootConstraint::kMultiRoot
            ? std::pow(n + 1.0, n - 1.0)
            : std::pow(static_cast<double>(n), n - 1.0);
    return compare_scalar(
        partition_function(WeightedGraph::Complete(n, constraint)), expected,
        tol.partition);
  });
  c.check("edge_totals_vs_brute", [&] {
    return compare_arrays(edge_totals(g).totals, brute_edge_totals(g),
                          tol.totals);
  });
  c.check("pairwise_totals_vs_brute", [&] {
    return compare_arrays(pairwise_totals(g).totals, brute_pairwise_totals(g),
                          tol.totals);
  });
  c.check("pairwise_symmetry_and_diagonal", [&]() -> Outcome {
    const PairwiseTotals p = pairwise_totals(g);
    for (int i = 0; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        if (i == j) continue;
        if (p.at(i, j, i, j) != 0.0) return "nonzero diagonal pair";
        for (int k = 0; k <= n; ++k) {
          for (int l = 1; l <= n; ++l) {
            if (k != l && p.at(i, j, k, l) != p.at(k, l, i, j)) {
              return "asymmetric pair";
            }
          }
        }
      }
    }
    return {};
  });
  c.check("marginal_identities", [&]() -> Outcome {
    const EdgeTotals t = edge_totals(g);
    const PairwiseTotals p = pairwise_totals(g);
    double all = 0.0;
    for (int j = 1; j <= n; ++j) {
      double col = 0.0;
      for (int i = 0; i <= n; ++i) col += i == j ? 0.0 : t.at(i, j);
      all += col;
      if (auto o = compare_scalar(col, t.z, tol.totals); !o.empty()) {
        return "column sum: " + o;
      }
    }
    if (auto o = compare_scalar(all, n * t.z, tol.totals); !o.empty()) {
      return "total sum: " + o;
    }
    for (int i = 0; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        if (i == j) continue;
        double sum = 0.0;
        for (int k = 0; k <= n; ++k) {
          for (int l = 1; l <= n; ++l) sum += k == l ? 0.0 : p.at(i, j, k, l);
        }
        if (auto o = compare_scalar(sum, (n - 1) * t.at(i, j), tol.totals,
                                    1e-12 * t.z);
            !o.empty()) {
          return "pair sum: " + o;
        }
      }
    }
    return {};
  });
  c.check("first_total_vs_brute", [&] {
    return compare_arrays(first_total(g, r), brute_first_total(g, r),
                          tol.totals);
  });

  const std::vector<double> t_brute = brute_second_total(g, r, s);
  c.check("second_vs_brute", [&] {
    return compare_arrays(second_total(g, r, s).t_bar.data(), t_brute,
                          tol.second_order);
  });
  c.check("second_hes_vs_brute", [&] {
    return compare_arrays(second_total_hes(g, r, s).t_bar.data(), t_brute,
                          tol.second_order);
  });
  c.check("second_vjp_vs_brute", [&] {
    return compare_arrays(second_total_vjp(g, r, s).t_bar.data(), t_brute,
                          tol.second_order);
  });
  c.check("second_algorithms_agree", [&]() -> Outcome {
    const Matrix unified = second_total(g, r, s).t_bar;
    if (auto o = compare_arrays(second_total_hes(g, r, s).t_bar.data(),
                                unified.data(), tol.second_order);
        !o.empty()) {
      return "hes: " + o;
    }
    if (auto o = compare_arrays(second_total_vjp(g, r, s).t_bar.data(),
                                unified.data(), tol.second_order);
        !o.empty()) {
      return "vjp: " + o;
    }
    return {};
  });
  c.check("hvp_jacobian_fd", [&] {
    const EdgeTable analytic = first_total_gradient(g, r, 0);
    const EdgeTable numeric = finite_difference_gradient(
        g, [&](const WeightedGraph& h) { return first_total(h, r)[0]; });
    return compare_gradient(g, analytic, numeric, tol);
  });
  c.check("grad_z_fd", [&] {
    const EdgeTotals t = edge_totals(g);
    EdgeTable analytic(t.totals.size(), 0.0);
    for (int i = 0; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        if (i != j) analytic[edge_index(n, i, j)] = t.at(i, j) / g.weight(i, j);
      }
    }
    return compare_gradient(g, analytic,
                            finite_difference_gradient(g, partition_function),
                            tol);
  });

  const double h_brute = brute_entropy(g);
  c.check("entropy_vs_brute", [&] {
    return compare_scalar(shannon_entropy(g).value, h_brute, tol.quantities,
                          1e-15);
  });
  c.check("entropy_baseline_agrees", [&] {
    return compare_scalar(shannon_entropy_baseline_n4(g),
                          shannon_entropy(g).value, tol.baseline, 1e-15);
  });
  c.check("entropy_bounds", [&]() -> Outcome {
    const double h = shannon_entropy(g).value;
    const double bound = std::log(static_cast<double>(brute_support_size(g)));
    if (h < -1e-12 || h > bound + 1e-12) {
      return "H = " + fmt(h) + " outside [0, " + fmt(bound) + "]";
    }
    return {};
  });
  c.check("entropy_grad_fd", [&] {
    const QuantityResult res = shannon_entropy(g, Gradient::kCompute);
    return compare_gradient(
        g, *res.gradient,
        finite_difference_gradient(
            g, [](const WeightedGraph& h) { return shannon_entropy(h).value; }),
        tol);
  });

  c.check("kl_vs_brute", [&] {
    return compare_scalar(kl_divergence(g, q).value, brute_kl_divergence(g, q),
                          tol.quantities, 1e-15);
  });
  c.check("kl_self_zero_and_nonnegative", [&]() -> Outcome {
    const double self = kl_divergence(g, g).value;
    if (std::abs(self) > 1e-10) return "KL(p||p) = " + fmt(self);
    const double kl = kl_divergence(g, q).value;
    if (kl < -1e-12) return "KL(p||q) = " + fmt(kl);
    return {};
  });
  c.check("gibbs_consistency", [&] {
    // Cross-entropy via its own decomposition r_ij = (1/N) log Z_q - log q_ij.
    const DerivativeCache cache(g);
    const double log_zq = log_partition_function(q).log_abs;
    EdgeFunction ce(n, 1);
    for (int i = 0; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        if (i != j) ce.add(i, j, 0, log_zq / n - std::log(q.weight(i, j)));
      }
    }
    const double cross = first_expectation(cache, ce)[0];
    return compare_scalar(cross - shannon_entropy(g).value,
                          kl_divergence(g, q).value, tol.second_order, 1e-14);
  });
  c.check("kl_grad_fd", [&] {
    const QuantityResult res = kl_divergence(g, q, Gradient::kCompute);
    return compare_gradient(g, *res.gradient,
                            finite_difference_gradient(
                                g,
                                [&](const WeightedGraph& h) {
                                  return kl_divergence(h, q).value;
                                }),
                            tol);
  });

  c.check("attachment_vs_brute", [&] {
    return compare_scalar(expected_attachment(g, gold).value,
                          brute_expected_attachment(g, gold), tol.quantities);
  });
  c.check("risk_grad_fd", [&] {
    const QuantityResult res = expected_attachment(g, gold, Gradient::kCompute);
    return compare_gradient(g, *res.gradient,
                            finite_difference_gradient(
                                g,
                                [&](const WeightedGraph& h) {
                                  return expected_attachment(h, gold).value;
                                }),
                            tol);
  });

  c.check("ge_vs_brute", [&] {
    return compare_scalar(ge_objective(g, ge).value,
                          brute_ge_objective(g, features, target),
                          tol.quantities);
  });
  c.check("ge_grad_fd", [&] {
    const QuantityResult res = ge_objective(g, ge, Gradient::kCompute);
    return compare_gradient(g, *res.gradient,
                            finite_difference_gradient(
                                g,
                                [&](const WeightedGraph& h) {
                                  return ge_objective(h, ge).value;
                                }),
                            tol);
  });
  c.check("ge_gradient_routes_agree", [&] {
    const QuantityResult fast = ge_objective(g, ge, Gradient::kCompute);
    const QuantityResult hes = ge_objective(g, ge, Gradient::kCompute,
                                            SecondOrderAlgorithm::kSecondHes);
    return compare_arrays(*fast.gradient, *hes.gradient, tol.second_order);
  });

  for (double alpha : {0.0, 0.5, 2.0}) {
    c.check("renyi_vs_brute", [&] {
      return compare_scalar(renyi_entropy(g, alpha),
                            brute_renyi_entropy(g, alpha), tol.quantities,
                            1e-15);
    });
  }
  for (double k : {1.0, 2.0, 3.0}) {
    c.check("lp_norm_vs_brute", [&] {
      return compare_scalar(lp_norm(g, k), brute_lp_norm(g, k), tol.quantities);
    });
  }

  if (n <= 4) {
    const int labels = 2 + n % 2;
    const LabeledWeightedGraph lg =
        random_labeled_graph(rng, n, labels, constraint);
    c.check("labeled_partition_vs_brute", [&] {
      return compare_scalar(partition_function(collapse_labels(lg)),
                            brute_labeled_partition_function(lg),
                            tol.partition);
    });
    c.check("labeled_marginals_vs_brute", [&] {
      return compare_arrays(labeled_edge_marginals(lg),
                            brute_labeled_edge_marginals(lg), tol.totals);
    });
  }
}

}  // namespace

VerifyReport run_verify(const VerifyOptions& options) {
  if (options.max_n < 1 || options.max_n > kMaxVerifyNodes) {
    throw SizeError("verify needs 1 <= max_n <= " +
                    std::to_string(kMaxVerifyNodes) + ", got " +
                    std::to_string(options.max_n));
  }
  if (options.trials < 0) throw DomainError("trials must be non-negative");
  VerifyReport report;
  for (int t = 0; t < options.trials; ++t) {
    const std::uint64_t seed = options.seed + static_cast<std::uint64_t>(t);
    const int n = 1 + (t / 2) % options.max_n;
    const RootConstraint constraint =
        t % 2 == 0 ? RootConstraint::kMultiRoot : RootConstraint::kSingleRoot;
    Rng rng(seed);
    Checker checker(report, seed, n);
    verify_instance(checker, rng, n, constraint, options.tol);
  }
  return report;
}

}  // namespace treexp

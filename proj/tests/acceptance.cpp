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

// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "treexp/expectations.hpp"
#include "treexp/laplacian.hpp"
#include "treexp/oracle.hpp"
#include "treexp/quantities.hpp"
#include "treexp/random.hpp"

namespace treexp {
namespace {

constexpr RootConstraint kBoth[] = {RootConstraint::kMultiRoot,
                                    RootConstraint::kSingleRoot};

RootConstraint alternate(int t) { return kBoth[t % 2]; }

// Tracks the worst error seen against a tolerance.
struct Tally {
  explicit Tally(double tolerance) : tol(tolerance) {}

  double tol;
  double worst = 0.0;
  int checks = 0;
  int failures = 0;
  std::string first_failure;

  void observe(double err, const std::string& where) {
    ++checks;
    worst = std::max(worst, err);
    if (!(err <= tol)) {
      if (failures++ == 0) first_failure = where;
    }
  }
  bool ok() const { return failures == 0 && checks > 0; }
};

double rel_err(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::abs(b);
}

// Worst element-wise relative error; entries whose expected value is exactly
// zero must be matched to within `tol` of the largest expected magnitude.
double array_rel_err(const std::vector<double>& a, const std::vector<double>& b) {
  double scale = 0.0;
  for (double v : b) scale = std::max(scale, std::abs(v));
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ref = b[i] != 0.0 ? std::abs(b[i]) : scale;
    if (a[i] != b[i]) worst = std::max(worst, std::abs(a[i] - b[i]) / ref);
  }
  return worst;
}

std::vector<double> flat(const Matrix& m) { return {m.data().begin(), m.data().end()}; }

std::string describe(const char* what, int seed, int n) {
  return std::string(what) + " seed=" + std::to_string(seed) + " n=" +
         std::to_string(n);
}

bool report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %d. %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  return ok;
}

std::string summary(const Tally& t) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%d checks, worst error %.3g (tol %.0e)", t.checks,
                t.worst, t.tol);
  std::string s = buf;
  if (!t.ok()) s += ", first failure: " + t.first_failure;
  return s;
}

// 1. Z against enumeration.
bool oracle_equivalence_z() {
  Tally tally{1e-10};
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 6;
    const RootConstraint c = kBoth[(t / 6) % 2];
    Rng rng(1000 + t);
    const WeightedGraph g = random_graph(rng, n, c);
    tally.observe(rel_err(partition_function(g), brute_partition_function(g)),
                  describe("unlabeled", 1000 + t, n));
  }
  int seed = 2000;
  for (int n = 1; n <= 4; ++n) {
    for (int labels = 1; labels <= 3; ++labels) {
      for (const auto c : kBoth) {
        Rng rng(++seed);
        const LabeledWeightedGraph g = random_labeled_graph(rng, n, labels, c);
        tally.observe(rel_err(partition_function(collapse_labels(g)),
                              brute_labeled_partition_function(g)),
                      describe("labeled", seed, n));
      }
    }
  }
  return report(1, "Oracle equivalence (Z)", tally.ok(), summary(tally));
}

// 2. Closed-form arborescence counts.
bool arborescence_counts() {
  Tally tally{1e-10};
  for (int n = 1; n <= 6; ++n) {
    tally.observe(rel_err(partition_function(WeightedGraph::Complete(
                              n, RootConstraint::kMultiRoot)),
                          std::pow(n + 1.0, n - 1.0)),
                  "multi n=" + std::to_string(n));
    tally.observe(rel_err(partition_function(WeightedGraph::Complete(
                              n, RootConstraint::kSingleRoot)),
                          std::pow(static_cast<double>(n), n - 1.0)),
                  "single n=" + std::to_string(n));
  }
  return report(2, "Arborescence counts", tally.ok(), summary(tally));
}

// 3. Edge and pairwise totals against enumeration; self-pairs exactly zero.
bool totals_vs_oracle() {
  Tally tally{1e-9};
  int nonzero_diagonal = 0;
  for (int t = 0; t < 30; ++t) {
    const int n = 1 + t % 5;
    Rng rng(3000 + t);
    const WeightedGraph g = random_graph(rng, n, alternate(t / 5));
    tally.observe(array_rel_err(edge_totals(g).totals, brute_edge_totals(g)),
                  describe("edge", 3000 + t, n));
    const PairwiseTotals p = pairwise_totals(g);
    tally.observe(array_rel_err(p.totals, brute_pairwise_totals(g)),
                  describe("pairwise", 3000 + t, n));
    for (int i = 0; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        if (i != j && p.at(i, j, i, j) != 0.0) ++nonzero_diagonal;
      }
    }
  }
  std::string detail = summary(tally) + ", nonzero self-pairs " +
                       std::to_string(nonzero_diagonal);
  return report(3, "Totals vs oracle", tally.ok() && nonzero_diagonal == 0,
                detail);
}

// 4. second_total, second_total_hes and second_total_vjp agree.
bool three_algorithm_agreement() {
  Tally tally{1e-8};
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + t % 5;
    Rng rng(4000 + t);
    const WeightedGraph g = random_graph(rng, n, alternate(t / 5));
    const bool dense = (t / 10) % 2 == 1;
    const int dim_r = 2 + t % 4, dim_s = 1 + t % 3;
    const EdgeFunction r = random_edge_function(rng, n, dim_r, dense ? dim_r : 1);
    const EdgeFunction s = random_edge_function(rng, n, dim_s, dense ? dim_s : 1);
    const auto hes = flat(second_total_hes(g, r, s).t_bar);
    tally.observe(array_rel_err(flat(second_total(g, r, s).t_bar), hes),
                  describe("second vs hes", 4000 + t, n));
    tally.observe(array_rel_err(flat(second_total_vjp(g, r, s).t_bar), hes),
                  describe("vjp vs hes", 4000 + t, n));
  }
  return report(4, "Three-algorithm agreement", tally.ok(), summary(tally));
}

// 5. Analytic gradients against central finite differences.
bool gradient_suite() {
  constexpr double kRel = 1e-4, kAbs = 1e-8;
  std::map<std::string, std::pair<int, int>> counts;  // checks, failures
  std::string first_failure;
  auto compare = [&](const std::string& name, int seed, const EdgeTable& analytic,
                     const std::vector<double>& fd) {
    auto& [checks, failures] = counts[name];
    for (std::size_t e = 0; e < fd.size(); ++e) {
      ++checks;
      const bool ok = std::abs(analytic[e]) < kAbs
                          ? std::abs(fd[e] - analytic[e]) <= kAbs
                          : std::abs(fd[e] - analytic[e]) <= kRel * std::abs(analytic[e]);
      if (!ok && failures++ == 0 && first_failure.empty()) {
        first_failure = name + " seed=" + std::to_string(seed);
      }
    }
  };
  constexpr int n = 5;
  for (int t = 0; t < 20; ++t) {
    const int seed = 5000 + t;
    Rng rng(seed);
    const RootConstraint c = alternate(t);
    const WeightedGraph g = random_graph(rng, n, c);

    const EdgeTotals totals = edge_totals(g);
    EdgeTable grad_z(totals.totals.size(), 0.0);
    const DerivativeCache cache(g);
    for (int i = 0; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        if (i != j) grad_z[edge_index(n, i, j)] = cache.z() * cache.grad_log_z(i, j);
      }
    }
    compare("Z", seed, grad_z, finite_difference_gradient(g, partition_function));

    compare("entropy", seed, *shannon_entropy(g, Gradient::kCompute).gradient,
            finite_difference_gradient(
                g, [](const WeightedGraph& h) { return shannon_entropy(h).value; }));

    const WeightedGraph q = random_graph(rng, n, c);
    compare("kl", seed, *kl_divergence(g, q, Gradient::kCompute).gradient,
            finite_difference_gradient(g, [&](const WeightedGraph& h) {
              return kl_divergence(h, q).value;
            }));

    const Tree gold = random_tree(rng, n, c);
    compare("risk", seed, *expected_attachment(g, gold, Gradient::kCompute).gradient,
            finite_difference_gradient(g, [&](const WeightedGraph& h) {
              return expected_attachment(h, gold).value;
            }));

    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> target(20);
    for (double& v : target) v = u(rng);
    const GESpec spec{random_edge_function(rng, n, 20, 3), target};
    compare("ge", seed, *ge_objective(g, spec, Gradient::kCompute).gradient,
            finite_difference_gradient(g, [&](const WeightedGraph& h) {
              return ge_objective(h, spec).value;
            }));
  }
  bool ok = true;
  std::string detail;
  for (const auto& [name, c] : counts) {
    ok = ok && c.second == 0;
    detail += name + " " + std::to_string(c.first - c.second) + "/" +
              std::to_string(c.first) + " ";
  }
  detail += "coordinates within rel 1e-4 / abs 1e-8";
  if (!first_failure.empty()) detail += ", first failure: " + first_failure;
  return report(5, "Gradient suite", ok, detail);
}

// 6. Quantity values against enumeration; KL sanity.
bool quantity_values() {
  Tally tally{1e-9};
  int kl_violations = 0;
  for (int t = 0; t < 30; ++t) {
    const int n = 1 + t % 5;
    const int seed = 6000 + t;
    Rng rng(seed);
    const RootConstraint c = alternate(t / 5);
    const WeightedGraph g = random_graph(rng, n, c);
    const WeightedGraph q = random_graph(rng, n, c);
    const Tree gold = random_tree(rng, n, c);
    const EdgeFunction feats = random_edge_function(rng, n, 6, 2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> target(6);
    for (double& v : target) v = u(rng);
    // Entropy is exactly 0 at n = 1; compare relative to max(|x|, 1) there.
    auto check = [&](const char* what, double a, double b) {
      const double err = b == 0.0 ? std::abs(a) : rel_err(a, b);
      tally.observe(err, describe(what, seed, n));
    };
    check("entropy", shannon_entropy(g).value, brute_entropy(g));
    const double kl = kl_divergence(g, q).value;
    check("kl", kl, brute_kl_divergence(g, q));
    check("attachment", expected_attachment(g, gold).value,
          brute_expected_attachment(g, gold));
    check("ge", ge_objective(g, GESpec{feats, target}).value,
          brute_ge_objective(g, feats, target));
    for (double alpha : {0.0, 0.5, 2.0}) {
      check("renyi", renyi_entropy(g, alpha), brute_renyi_entropy(g, alpha));
    }
    for (double k : {1.0, 2.0, 3.0}) {
      check("lp", lp_norm(g, k), brute_lp_norm(g, k));
    }
    if (kl < 0.0) ++kl_violations;
    if (kl_divergence(g, g).value != 0.0 &&
        std::abs(kl_divergence(g, g).value) > 1e-12) {
      ++kl_violations;
    }
  }
  return report(6, "Quantity values vs oracle", tally.ok() && kl_violations == 0,
                summary(tally) + ", KL sign/self violations " +
                    std::to_string(kl_violations));
}

// 7. Complexity trends from the CLI benchmark.
struct BenchTable {
  std::map<int, std::map<std::string, double>> ms;
  std::string error;
};

BenchTable run_bench(const std::string& csv_path) {
  BenchTable table;
  const std::string cmd = std::string(TREEXP_CLI_PATH) +
                          " bench --sizes 16,32,64,128 --reps 5 --seed 1 --out " +
                          csv_path + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  if (status != 0) {
    table.error = "bench exited with status " + std::to_string(status);
    return table;
  }
  std::ifstream in(csv_path);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::stringstream s(line);
    std::string n, algo, ms;
    std::getline(s, n, ',');
    std::getline(s, algo, ',');
    std::getline(s, ms, ',');
    table.ms[std::stoi(n)][algo] = std::stod(ms);
  }
  return table;
}

bool complexity_trends(const std::string& csv_path) {
  const auto start = std::chrono::steady_clock::now();
  const BenchTable b = run_bench(csv_path);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!b.error.empty()) return report(7, "Complexity trends", false, b.error);
  auto ratio = [&](int n, const char* slow, const char* fast) {
    return b.ms.at(n).at(slow) / b.ms.at(n).at(fast);
  };
  const double e32 = ratio(32, "entropy_baseline", "entropy");
  const double e64 = ratio(64, "entropy_baseline", "entropy");
  const double e128 = ratio(128, "entropy_baseline", "entropy");
  const double g32 = ratio(32, "ge_hes", "ge_second");
  const double g64 = ratio(64, "ge_hes", "ge_second");
  const double g128 = ratio(128, "ge_hes", "ge_second");
  const bool entropy_ok = e64 > 2.0 && e128 > e32;
  const bool ge_ok = g32 > 1.0 && g64 > g32 && g128 > g64;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "entropy speed-up 32/64/128 = %.2fx/%.2fx/%.2fx; "
                "ge speed-up 32/64/128 = %.2fx/%.2fx/%.2fx; bench %.0f s (%s)",
                e32, e64, e128, g32, g64, g128, seconds, csv_path.c_str());
  return report(7, "Complexity trends", entropy_ok && ge_ok && seconds < 300, buf);
}

// 8. The unified refactoring equals the materialized Hessian contraction.
bool decomposition_identity() {
  Tally tally{1e-8};
  for (int t = 0; t < 25; ++t) {
    const int n = 2 + t % 4;
    const int seed = 8000 + t;
    Rng rng(seed);
    const WeightedGraph g = random_graph(rng, n, alternate(t));
    const EdgeFunction r = random_edge_function(rng, n, 3, 1 + t % 3);
    const EdgeFunction s = random_edge_function(rng, n, 4, 1 + t % 4);

    const SecondDecomposition d = second_decomposition(g, r, s);
    Matrix refactored = d.f_bar;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 4; ++b) {
        refactored(a, b) += d.r_bar[a] * d.s_bar[b] / d.z - d.z * d.hat_sum(a, b);
      }
    }

    // Direct contraction of the materialized first and second derivatives.
    const EdgeTotals single = edge_totals(g);
    const PairwiseTotals pairs = pairwise_totals(g);
    Matrix direct(3, 4);
    auto contract = [&](const SparseVector& x, const SparseVector& y, double w) {
      for (std::size_t p = 0; p < x.nnz(); ++p) {
        for (std::size_t q = 0; q < y.nnz(); ++q) {
          direct(x.index[p], y.index[q]) += w * x.value[p] * y.value[q];
        }
      }
    };
    for (int i = 0; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        if (i == j) continue;
        contract(r.row(i, j), s.row(i, j), single.at(i, j));
        for (int k = 0; k <= n; ++k) {
          for (int l = 1; l <= n; ++l) {
            if (k != l) contract(r.row(i, j), s.row(k, l), pairs.at(i, j, k, l));
          }
        }
      }
    }
    tally.observe(array_rel_err(flat(refactored), flat(direct)),
                  describe("decomposition", seed, n));
  }
  return report(8, "Refactoring identity", tally.ok(), summary(tally));
}

}  // namespace
}  // namespace treexp

int main(int argc, char** argv) {
  const std::string csv = argc > 1 ? argv[1] : "acceptance_bench.csv";
  bool ok = true;
  ok &= treexp::oracle_equivalence_z();
  ok &= treexp::arborescence_counts();
  ok &= treexp::totals_vs_oracle();
  ok &= treexp::three_algorithm_agreement();
  ok &= treexp::gradient_suite();
  ok &= treexp::quantity_values();
  ok &= treexp::complexity_trends(csv);
  ok &= treexp::decomposition_identity();
  std::printf("%s\n", ok ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED");
  return ok ? 0 : 1;
}

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

#include "treexp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "treexp/error.hpp"

namespace treexp {
namespace {

void check_size(int n) {
  if (n > kMaxEnumerationNodes) {
    throw SizeError("enumeration is limited to n <= " +
                    std::to_string(kMaxEnumerationNodes) + ", got n=" +
                    std::to_string(n));
  }
}

}  // namespace

void for_each_tree(int n, RootConstraint constraint,
                   const std::function<void(const Tree&)>& visit) {
  check_size(n);
  // Odometer over all n^n assignments heads[j-1] in {0..n} \ {j}.
  std::vector<int> heads(n, 0);
  while (true) {
    Tree candidate(heads);
    if (candidate.is_valid(n, constraint)) visit(candidate);

    int pos = 0;
    while (pos < n) {
      int next = heads[pos] + 1;
      if (next == pos + 1) ++next;  // skip the self-loop
      if (next <= n) {
        heads[pos] = next;
        break;
      }
      heads[pos] = 0;
      ++pos;
    }
    if (pos == n) break;
  }
}

std::vector<Tree> enumerate_trees(const WeightedGraph& g) {
  std::vector<Tree> trees;
  for_each_tree(g.n(), g.constraint(),
                [&](const Tree& d) { trees.push_back(d); });
  return trees;
}

double tree_weight(const WeightedGraph& g, const Tree& d) {
  double w = 1.0;
  for (int j = 1; j <= g.n(); ++j) w *= g.weight(d.head(j), j);
  return w;
}

std::vector<double> brute_total(const WeightedGraph& g, const TreeFunction& f) {
  std::vector<double> total;
  bool first = true;
  for_each_tree(g.n(), g.constraint(), [&](const Tree& d) {
    const double w = tree_weight(g, d);
    const std::vector<double> v = f(d);
    if (first) {
      total.assign(v.size(), 0.0);
      first = false;
    } else if (v.size() != total.size()) {
      throw DimensionError("tree function changed output length");
    }
    for (std::size_t k = 0; k < v.size(); ++k) {
      // 0 * inf would poison the sum for unsupported trees.
      if (w != 0.0) total[k] += w * v[k];
    }
  });
  return total;
}

double brute_partition_function(const WeightedGraph& g) {
  double z = 0.0;
  for_each_tree(g.n(), g.constraint(),
                [&](const Tree& d) { z += tree_weight(g, d); });
  return z;
}

double brute_labeled_partition_function(const LabeledWeightedGraph& g) {
  const int n = g.n();
  const int labels = g.labels();
  double z = 0.0;
  for_each_tree(n, g.constraint(), [&](const Tree& d) {
    std::vector<int> label(n, 0);
    while (true) {
      double w = 1.0;
      for (int j = 1; j <= n; ++j) w *= g.weight(d.head(j), j, label[j - 1]);
      z += w;
      int pos = 0;
      while (pos < n && ++label[pos] == labels) label[pos++] = 0;
      if (pos == n) break;
    }
  });
  return z;
}

std::vector<double> brute_labeled_edge_marginals(const LabeledWeightedGraph& g) {
  const int n = g.n();
  const int labels = g.labels();
  std::vector<double> out(g.weights().size(), 0.0);
  double z = 0.0;
  for_each_tree(n, g.constraint(), [&](const Tree& d) {
    std::vector<int> label(n, 0);
    while (true) {
      double w = 1.0;
      for (int j = 1; j <= n; ++j) w *= g.weight(d.head(j), j, label[j - 1]);
      z += w;
      for (int j = 1; j <= n; ++j) {
        out[edge_index(n, d.head(j), j) * labels + label[j - 1]] += w;
      }
      int pos = 0;
      while (pos < n && ++label[pos] == labels) label[pos++] = 0;
      if (pos == n) break;
    }
  });
  for (double& v : out) v /= z;
  return out;
}

std::vector<double> brute_edge_totals(const WeightedGraph& g) {
  const int n = g.n();
  std::vector<double> out(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
  for_each_tree(n, g.constraint(), [&](const Tree& d) {
    const double w = tree_weight(g, d);
    for (int j = 1; j <= n; ++j) out[edge_index(n, d.head(j), j)] += w;
  });
  return out;
}

std::vector<double> brute_pairwise_totals(const WeightedGraph& g) {
  const int n = g.n();
  const std::size_t e = static_cast<std::size_t>(n + 1) * (n + 1);
  std::vector<double> out(e * e, 0.0);
  for_each_tree(n, g.constraint(), [&](const Tree& d) {
    const double w = tree_weight(g, d);
    for (int j = 1; j <= n; ++j) {
      for (int l = 1; l <= n; ++l) {
        if (j == l) continue;
        out[edge_index(n, d.head(j), j) * e + edge_index(n, d.head(l), l)] +=
            w;
      }
    }
  });
  return out;
}

namespace {

std::vector<double> tree_sum(const EdgeFunction& f, const Tree& d) {
  std::vector<double> v(f.dim(), 0.0);
  for (int j = 1; j <= d.n(); ++j) {
    const SparseVector& row = f.row(d.head(j), j);
    for (std::size_t t = 0; t < row.nnz(); ++t) v[row.index[t]] += row.value[t];
  }
  return v;
}

}  // namespace

std::vector<double> brute_first_total(const WeightedGraph& g,
                                      const EdgeFunction& r) {
  return brute_total(g, [&](const Tree& d) { return tree_sum(r, d); });
}

std::vector<double> brute_second_total(const WeightedGraph& g,
                                       const EdgeFunction& r,
                                       const EdgeFunction& s) {
  return brute_total(g, [&](const Tree& d) {
    const std::vector<double> rv = tree_sum(r, d);
    const std::vector<double> sv = tree_sum(s, d);
    std::vector<double> t(rv.size() * sv.size());
    for (std::size_t a = 0; a < rv.size(); ++a) {
      for (std::size_t b = 0; b < sv.size(); ++b) t[a * sv.size() + b] = rv[a] * sv[b];
    }
    return t;
  });
}

double brute_entropy(const WeightedGraph& g) {
  const double z = brute_partition_function(g);
  double h = 0.0;
  for_each_tree(g.n(), g.constraint(), [&](const Tree& d) {
    const double p = tree_weight(g, d) / z;
    if (p > 0.0) h -= p * std::log(p);
  });
  return h;
}

double brute_kl_divergence(const WeightedGraph& p, const WeightedGraph& q) {
  const double zp = brute_partition_function(p);
  const double zq = brute_partition_function(q);
  double kl = 0.0;
  for_each_tree(p.n(), p.constraint(), [&](const Tree& d) {
    const double pd = tree_weight(p, d) / zp;
    if (pd == 0.0) return;
    const double qd = tree_weight(q, d) / zq;
    kl += pd * std::log(pd / qd);
  });
  return kl;
}

double brute_expected_attachment(const WeightedGraph& g, const Tree& gold) {
  const double z = brute_partition_function(g);
  double e = 0.0;
  for_each_tree(g.n(), g.constraint(), [&](const Tree& d) {
    int correct = 0;
    for (int j = 1; j <= g.n(); ++j) correct += d.head(j) == gold.head(j);
    e += tree_weight(g, d) / z * correct / g.n();
  });
  return e;
}

double brute_ge_objective(const WeightedGraph& g, const EdgeFunction& features,
                          const std::vector<double>& target) {
  const double z = brute_partition_function(g);
  const std::vector<double> total = brute_first_total(g, features);
  double ge = 0.0;
  for (std::size_t f = 0; f < total.size(); ++f) {
    const double res = total[f] / z - target[f];
    ge += 0.5 * res * res;
  }
  return ge;
}

double brute_renyi_entropy(const WeightedGraph& g, double alpha) {
  const double z = brute_partition_function(g);
  double sum = 0.0;
  for_each_tree(g.n(), g.constraint(), [&](const Tree& d) {
    const double p = tree_weight(g, d) / z;
    if (p > 0.0) sum += std::pow(p, alpha);
  });
  return std::log(sum) / (1.0 - alpha);
}

double brute_lp_norm(const WeightedGraph& g, double k) {
  const double z = brute_partition_function(g);
  double sum = 0.0;
  for_each_tree(g.n(), g.constraint(), [&](const Tree& d) {
    const double p = tree_weight(g, d) / z;
    if (p > 0.0) sum += std::pow(p, k);
  });
  return std::pow(sum, 1.0 / k);
}

long brute_support_size(const WeightedGraph& g) {
  long count = 0;
  for_each_tree(g.n(), g.constraint(), [&](const Tree& d) {
    if (tree_weight(g, d) > 0.0) ++count;
  });
  return count;
}

std::vector<double> finite_difference_gradient(
    const WeightedGraph& g, const std::function<double(const WeightedGraph&)>& f,
    double rel_step) {
  const int n = g.n();
  std::vector<double> grad(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
  WeightedGraph probe = g;
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      const double w = g.weight(i, j);
      const double h = rel_step * std::max(1.0, w);
      probe.set_weight(i, j, w + h);
      const double up = f(probe);
      probe.set_weight(i, j, w - h);
      const double down = f(probe);
      probe.set_weight(i, j, w);
      grad[edge_index(n, i, j)] = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

}  // namespace treexp

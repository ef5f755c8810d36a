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

#include "treexp/treexp.h"

#include <algorithm>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "treexp/error.hpp"
#include "treexp/expectations.hpp"
#include "treexp/graph.hpp"
#include "treexp/laplacian.hpp"
#include "treexp/oracle.hpp"
#include "treexp/quantities.hpp"
#include "treexp/random.hpp"
#include "treexp/verify.hpp"

struct treexp_graph {
  treexp::WeightedGraph graph;
};

struct treexp_edge_function {
  treexp::EdgeFunction function;
};

namespace {

thread_local std::string g_last_error;

treexp_status fail(treexp_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `body`, translating library exceptions into status codes.
template <class Body>
treexp_status guarded(Body&& body) {
  try {
    body();
    return TREEXP_OK;
  } catch (const treexp::StructuralError& e) {
    return fail(TREEXP_ERR_STRUCTURAL, e.what());
  } catch (const treexp::SizeError& e) {
    return fail(TREEXP_ERR_SIZE, e.what());
  } catch (const treexp::DimensionError& e) {
    return fail(TREEXP_ERR_DIMENSION, e.what());
  } catch (const treexp::SingularError& e) {
    return fail(TREEXP_ERR_SINGULAR, e.what());
  } catch (const treexp::SupportError& e) {
    return fail(TREEXP_ERR_SUPPORT, e.what());
  } catch (const treexp::DomainError& e) {
    return fail(TREEXP_ERR_DOMAIN, e.what());
  } catch (const treexp::NumericalError& e) {
    return fail(TREEXP_ERR_NUMERICAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(TREEXP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TREEXP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(TREEXP_ERR_INTERNAL, "unknown exception");
  }
}

#define TREEXP_REQUIRE(cond, what)                           \
  do {                                                       \
    if (!(cond)) return fail(TREEXP_ERR_INVALID_ARGUMENT, what); \
  } while (0)

treexp::RootConstraint to_constraint(treexp_root root) {
  return root == TREEXP_SINGLE_ROOT ? treexp::RootConstraint::kSingleRoot
                                    : treexp::RootConstraint::kMultiRoot;
}

treexp::SecondOrderAlgorithm to_algorithm(treexp_algorithm a) {
  switch (a) {
    case TREEXP_SECOND_HES:
      return treexp::SecondOrderAlgorithm::kSecondHes;
    case TREEXP_SECOND_VJP:
      return treexp::SecondOrderAlgorithm::kSecondVjp;
    case TREEXP_SECOND:
    default:
      return treexp::SecondOrderAlgorithm::kSecond;
  }
}

bool valid_root(treexp_root root) {
  return root == TREEXP_MULTI_ROOT || root == TREEXP_SINGLE_ROOT;
}

bool valid_algorithm(treexp_algorithm a) {
  return a == TREEXP_SECOND || a == TREEXP_SECOND_HES ||
         a == TREEXP_SECOND_VJP;
}

void copy_out(const std::vector<double>& v, double* out) {
  std::copy(v.begin(), v.end(), out);
}

void emit(const treexp::QuantityResult& r, double* value, double* gradient) {
  *value = r.value;
  if (gradient != nullptr && r.gradient) copy_out(*r.gradient, gradient);
}

treexp::Gradient want(const double* gradient) {
  return gradient != nullptr ? treexp::Gradient::kCompute
                             : treexp::Gradient::kSkip;
}

}  // namespace

extern "C" {

const char* treexp_version(void) { return "1.0.0"; }

const char* treexp_last_error(void) { return g_last_error.c_str(); }

const char* treexp_status_name(treexp_status status) {
  switch (status) {
    case TREEXP_OK:
      return "ok";
    case TREEXP_ERR_STRUCTURAL:
      return "structural";
    case TREEXP_ERR_SIZE:
      return "size";
    case TREEXP_ERR_DIMENSION:
      return "dimension";
    case TREEXP_ERR_SINGULAR:
      return "singular";
    case TREEXP_ERR_SUPPORT:
      return "support";
    case TREEXP_ERR_DOMAIN:
      return "domain";
    case TREEXP_ERR_NUMERICAL:
      return "numerical";
    case TREEXP_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case TREEXP_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

treexp_status treexp_graph_create(int n, treexp_root root,
                                  const double* weights, treexp_graph** out) {
  TREEXP_REQUIRE(weights != nullptr && out != nullptr, "null argument");
  TREEXP_REQUIRE(valid_root(root), "unknown root constraint");
  TREEXP_REQUIRE(n >= 1, "n must be at least 1");
  *out = nullptr;
  return guarded([&] {
    const std::size_t size = static_cast<std::size_t>(n + 1) * (n + 1);
    treexp::WeightedGraph g(n, std::vector<double>(weights, weights + size),
                            to_constraint(root));
    g.validate();
    *out = new treexp_graph{std::move(g)};
  });
}

treexp_status treexp_graph_create_labeled(int n, int labels, treexp_root root,
                                          const double* weights,
                                          treexp_graph** out) {
  TREEXP_REQUIRE(weights != nullptr && out != nullptr, "null argument");
  TREEXP_REQUIRE(valid_root(root), "unknown root constraint");
  TREEXP_REQUIRE(n >= 1 && labels >= 1, "n and labels must be at least 1");
  *out = nullptr;
  return guarded([&] {
    const std::size_t size =
        static_cast<std::size_t>(n + 1) * (n + 1) * labels;
    treexp::LabeledWeightedGraph lg(
        n, labels, std::vector<double>(weights, weights + size),
        to_constraint(root));
    lg.validate();
    *out = new treexp_graph{treexp::collapse_labels(lg)};
  });
}

void treexp_graph_destroy(treexp_graph* g) { delete g; }

int treexp_graph_n(const treexp_graph* g) {
  return g == nullptr ? 0 : g->graph.n();
}

treexp_root treexp_graph_root(const treexp_graph* g) {
  return g != nullptr && g->graph.single_root() ? TREEXP_SINGLE_ROOT
                                                : TREEXP_MULTI_ROOT;
}

treexp_status treexp_random_weights(uint64_t seed, int n, double* weights) {
  TREEXP_REQUIRE(weights != nullptr, "null argument");
  TREEXP_REQUIRE(n >= 1, "n must be at least 1");
  return guarded([&] {
    treexp::Rng rng(seed);
    const treexp::WeightedGraph g =
        treexp::random_graph(rng, n, treexp::RootConstraint::kMultiRoot);
    std::copy(g.weights().begin(), g.weights().end(), weights);
  });
}

treexp_status treexp_edge_function_create(int n, int dim,
                                          treexp_edge_function** out) {
  TREEXP_REQUIRE(out != nullptr, "null argument");
  *out = nullptr;
  return guarded(
      [&] { *out = new treexp_edge_function{treexp::EdgeFunction(n, dim)}; });
}

void treexp_edge_function_destroy(treexp_edge_function* f) { delete f; }

treexp_status treexp_edge_function_add(treexp_edge_function* f, int head,
                                       int dep, int coord, double value) {
  TREEXP_REQUIRE(f != nullptr, "null argument");
  return guarded([&] { f->function.add(head, dep, coord, value); });
}

int treexp_edge_function_dim(const treexp_edge_function* f) {
  return f == nullptr ? 0 : f->function.dim();
}

treexp_status treexp_partition_function(const treexp_graph* g, double* z) {
  TREEXP_REQUIRE(g != nullptr && z != nullptr, "null argument");
  return guarded([&] { *z = treexp::partition_function(g->graph); });
}

treexp_status treexp_log_partition_function(const treexp_graph* g, int* sign,
                                            double* log_abs) {
  TREEXP_REQUIRE(g != nullptr && sign != nullptr && log_abs != nullptr,
                 "null argument");
  return guarded([&] {
    const treexp::SignedLogDet d = treexp::log_partition_function(g->graph);
    *sign = d.sign;
    *log_abs = d.log_abs;
  });
}

treexp_status treexp_brute_partition_function(const treexp_graph* g,
                                              double* z) {
  TREEXP_REQUIRE(g != nullptr && z != nullptr, "null argument");
  return guarded([&] { *z = treexp::brute_partition_function(g->graph); });
}

treexp_status treexp_partition_gradient(const treexp_graph* g,
                                        double* gradient) {
  TREEXP_REQUIRE(g != nullptr && gradient != nullptr, "null argument");
  return guarded([&] {
    const treexp::DerivativeCache cache(g->graph);
    const int n = g->graph.n();
    const double z = cache.z();
    std::fill(gradient, gradient + (n + 1) * (n + 1), 0.0);
    for (int i = 0; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        if (i != j) {
          gradient[treexp::edge_index(n, i, j)] = z * cache.grad_log_z(i, j);
        }
      }
    }
  });
}

treexp_status treexp_edge_totals(const treexp_graph* g, double* z,
                                 double* totals) {
  TREEXP_REQUIRE(g != nullptr && totals != nullptr, "null argument");
  return guarded([&] {
    const treexp::EdgeTotals t = treexp::edge_totals(g->graph);
    if (z != nullptr) *z = t.z;
    copy_out(t.totals, totals);
  });
}

treexp_status treexp_edge_marginals(const treexp_graph* g, double* marginals) {
  TREEXP_REQUIRE(g != nullptr && marginals != nullptr, "null argument");
  return guarded([&] {
    const treexp::DerivativeCache cache(g->graph);
    copy_out(cache.marginals(), marginals);
  });
}

treexp_status treexp_pairwise_totals(const treexp_graph* g, double* totals) {
  TREEXP_REQUIRE(g != nullptr && totals != nullptr, "null argument");
  return guarded(
      [&] { copy_out(treexp::pairwise_totals(g->graph).totals, totals); });
}

treexp_status treexp_first_total(const treexp_graph* g,
                                 const treexp_edge_function* r, double* out) {
  TREEXP_REQUIRE(g != nullptr && r != nullptr && out != nullptr,
                 "null argument");
  return guarded(
      [&] { copy_out(treexp::first_total(g->graph, r->function), out); });
}

treexp_status treexp_second_total(const treexp_graph* g,
                                  const treexp_edge_function* r,
                                  const treexp_edge_function* s,
                                  treexp_algorithm algorithm, double* out) {
  TREEXP_REQUIRE(g != nullptr && r != nullptr && s != nullptr && out != nullptr,
                 "null argument");
  TREEXP_REQUIRE(valid_algorithm(algorithm), "unknown algorithm");
  return guarded([&] {
    const treexp::SecondOrderResult t = treexp::second_total(
        g->graph, r->function, s->function, to_algorithm(algorithm));
    std::copy(t.t_bar.data().begin(), t.t_bar.data().end(), out);
  });
}

treexp_status treexp_entropy(const treexp_graph* g, double* value,
                             double* gradient) {
  TREEXP_REQUIRE(g != nullptr && value != nullptr, "null argument");
  return guarded([&] {
    emit(treexp::shannon_entropy(g->graph, want(gradient)), value, gradient);
  });
}

treexp_status treexp_entropy_baseline(const treexp_graph* g, double* value) {
  TREEXP_REQUIRE(g != nullptr && value != nullptr, "null argument");
  return guarded(
      [&] { *value = treexp::shannon_entropy_baseline_n4(g->graph); });
}

treexp_status treexp_kl_divergence(const treexp_graph* p, const treexp_graph* q,
                                   double* value, double* gradient) {
  TREEXP_REQUIRE(p != nullptr && q != nullptr && value != nullptr,
                 "null argument");
  return guarded([&] {
    emit(treexp::kl_divergence(p->graph, q->graph, want(gradient)), value,
         gradient);
  });
}

treexp_status treexp_expected_attachment(const treexp_graph* g,
                                         const int* gold_heads, double* value,
                                         double* gradient) {
  TREEXP_REQUIRE(g != nullptr && gold_heads != nullptr && value != nullptr,
                 "null argument");
  return guarded([&] {
    const treexp::Tree gold(
        std::vector<int>(gold_heads, gold_heads + g->graph.n()));
    emit(treexp::expected_attachment(g->graph, gold, want(gradient)), value,
         gradient);
  });
}

treexp_status treexp_ge_objective(const treexp_graph* g,
                                  const treexp_edge_function* features,
                                  const double* target,
                                  treexp_algorithm algorithm, double* value,
                                  double* gradient) {
  TREEXP_REQUIRE(g != nullptr && features != nullptr && target != nullptr &&
                     value != nullptr,
                 "null argument");
  TREEXP_REQUIRE(valid_algorithm(algorithm), "unknown algorithm");
  return guarded([&] {
    const int dim = features->function.dim();
    const treexp::GESpec spec{features->function,
                              std::vector<double>(target, target + dim)};
    emit(treexp::ge_objective(g->graph, spec, want(gradient),
                              to_algorithm(algorithm)),
         value, gradient);
  });
}

treexp_status treexp_renyi_entropy(const treexp_graph* g, double alpha,
                                   double* value) {
  TREEXP_REQUIRE(g != nullptr && value != nullptr, "null argument");
  return guarded([&] { *value = treexp::renyi_entropy(g->graph, alpha); });
}

treexp_status treexp_lp_norm(const treexp_graph* g, double k, double* value) {
  TREEXP_REQUIRE(g != nullptr && value != nullptr, "null argument");
  return guarded([&] { *value = treexp::lp_norm(g->graph, k); });
}

treexp_status treexp_verify(int max_n, int trials, uint64_t seed,
                            treexp_report_fn report, void* user, int* passed,
                            int* failures) {
  TREEXP_REQUIRE(failures != nullptr, "null argument");
  return guarded([&] {
    treexp::VerifyOptions options;
    options.max_n = max_n;
    options.trials = trials;
    options.seed = seed;
    const treexp::VerifyReport r = treexp::run_verify(options);
    if (report != nullptr) {
      for (const auto& f : r.failures) {
        const std::string line = "FAIL " + f.property + " seed=" +
                                 std::to_string(f.instance_seed) + " n=" +
                                 std::to_string(f.n) + ": " + f.detail;
        report(line.c_str(), user);
      }
      for (const auto& [name, count] : r.by_property) {
        const std::string line = name + ": " + std::to_string(count.passed) +
                                 " passed, " + std::to_string(count.failed) +
                                 " failed";
        report(line.c_str(), user);
      }
    }
    if (passed != nullptr) *passed = r.passed;
    *failures = r.failed;
  });
}

}  // extern "C"

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

/*
 * C interface to treexp: expectations under edge-factored distributions over
 * spanning arborescences.
 *
 * Graphs and edge functions are opaque handles owned by the caller and
 * released with the matching *_destroy function. Every fallible call returns
 * a treexp_status; on failure treexp_last_error() describes the problem
 * (thread-local, valid until the next failing call on the same thread).
 *
 * Weight tables are row-major (n + 1) x (n + 1) arrays with the root at
 * index 0: entry [i * (n + 1) + j] is the weight of edge i -> j. Gradients use
 * the same layout.
 */
#ifndef TREEXP_TREEXP_H_
#define TREEXP_TREEXP_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TREEXP_API __declspec(dllexport)
#else
#define TREEXP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum treexp_status {
  TREEXP_OK = 0,
  TREEXP_ERR_STRUCTURAL = 1,
  TREEXP_ERR_SIZE = 2,
  TREEXP_ERR_DIMENSION = 3,
  TREEXP_ERR_SINGULAR = 4,
  TREEXP_ERR_SUPPORT = 5,
  TREEXP_ERR_DOMAIN = 6,
  TREEXP_ERR_NUMERICAL = 7,
  TREEXP_ERR_INVALID_ARGUMENT = 8,
  TREEXP_ERR_INTERNAL = 9
} treexp_status;

typedef enum treexp_root {
  TREEXP_MULTI_ROOT = 0,
  TREEXP_SINGLE_ROOT = 1
} treexp_root;

typedef enum treexp_algorithm {
  TREEXP_SECOND = 0,
  TREEXP_SECOND_HES = 1,
  TREEXP_SECOND_VJP = 2
} treexp_algorithm;

typedef struct treexp_graph treexp_graph;
typedef struct treexp_edge_function treexp_edge_function;

TREEXP_API const char* treexp_version(void);
TREEXP_API const char* treexp_last_error(void);
/* Stable lowercase name of a status, e.g. "singular". */
TREEXP_API const char* treexp_status_name(treexp_status status);

/* ---- graphs ---------------------------------------------------------- */

/* Copies and validates `weights` ((n + 1)^2 entries). */
TREEXP_API treexp_status treexp_graph_create(int n, treexp_root root,
                                             const double* weights,
                                             treexp_graph** out);
/* Collapses labeled weights ((n + 1)^2 * labels entries, label fastest). */
TREEXP_API treexp_status treexp_graph_create_labeled(int n, int labels,
                                                     treexp_root root,
                                                     const double* weights,
                                                     treexp_graph** out);
TREEXP_API void treexp_graph_destroy(treexp_graph* g);
TREEXP_API int treexp_graph_n(const treexp_graph* g);
TREEXP_API treexp_root treexp_graph_root(const treexp_graph* g);

/* Seeded uniform(0.1, 1.0) weights on every legal edge into `weights`. */
TREEXP_API treexp_status treexp_random_weights(uint64_t seed, int n,
                                               double* weights);

/* ---- edge functions -------------------------------------------------- */

TREEXP_API treexp_status treexp_edge_function_create(
    int n, int dim, treexp_edge_function** out);
TREEXP_API void treexp_edge_function_destroy(treexp_edge_function* f);
/* Accumulates `value` into coordinate `coord` of edge head -> dep. */
TREEXP_API treexp_status treexp_edge_function_add(treexp_edge_function* f,
                                                  int head, int dep, int coord,
                                                  double value);
TREEXP_API int treexp_edge_function_dim(const treexp_edge_function* f);

/* ---- partition function and totals ----------------------------------- */

TREEXP_API treexp_status treexp_partition_function(const treexp_graph* g,
                                                   double* z);
/* sign in {-1, 0, 1}; log_abs = log|Z| (-inf when sign == 0). */
TREEXP_API treexp_status treexp_log_partition_function(const treexp_graph* g,
                                                       int* sign,
                                                       double* log_abs);
/* Z by enumerating every tree; n <= 8. */
TREEXP_API treexp_status treexp_brute_partition_function(const treexp_graph* g,
                                                         double* z);
/* dZ/dw_ij ((n + 1)^2 entries). */
TREEXP_API treexp_status treexp_partition_gradient(const treexp_graph* g,
                                                   double* gradient);
/* Edge totals ((n + 1)^2 entries) and Z. `z` may be NULL. */
TREEXP_API treexp_status treexp_edge_totals(const treexp_graph* g, double* z,
                                            double* totals);
/* Edge marginals total / Z ((n + 1)^2 entries). */
TREEXP_API treexp_status treexp_edge_marginals(const treexp_graph* g,
                                               double* marginals);
/* Pairwise totals ((n + 1)^4 entries, index (e1 * (n + 1)^2 + e2)). */
TREEXP_API treexp_status treexp_pairwise_totals(const treexp_graph* g,
                                                double* totals);
/* First-order total r_bar (R entries). */
TREEXP_API treexp_status treexp_first_total(const treexp_graph* g,
                                            const treexp_edge_function* r,
                                            double* out);
/* Second-order total t_bar (R x S row-major). */
TREEXP_API treexp_status treexp_second_total(const treexp_graph* g,
                                             const treexp_edge_function* r,
                                             const treexp_edge_function* s,
                                             treexp_algorithm algorithm,
                                             double* out);

/* ---- quantities ------------------------------------------------------ */
/* `gradient` may be NULL; otherwise it receives (n + 1)^2 entries of
 * d value / d w_ij. */

TREEXP_API treexp_status treexp_entropy(const treexp_graph* g, double* value,
                                        double* gradient);
TREEXP_API treexp_status treexp_entropy_baseline(const treexp_graph* g,
                                                 double* value);
TREEXP_API treexp_status treexp_kl_divergence(const treexp_graph* p,
                                              const treexp_graph* q,
                                              double* value, double* gradient);
/* gold_heads[j - 1] is the gold head of node j. */
TREEXP_API treexp_status treexp_expected_attachment(const treexp_graph* g,
                                                    const int* gold_heads,
                                                    double* value,
                                                    double* gradient);
/* target has dim(features) entries. */
TREEXP_API treexp_status treexp_ge_objective(
    const treexp_graph* g, const treexp_edge_function* features,
    const double* target, treexp_algorithm algorithm, double* value,
    double* gradient);
TREEXP_API treexp_status treexp_renyi_entropy(const treexp_graph* g,
                                              double alpha, double* value);
TREEXP_API treexp_status treexp_lp_norm(const treexp_graph* g, double k,
                                        double* value);

/* ---- verification ---------------------------------------------------- */

/* Receives one line per failed property, then a summary line per property. */
typedef void (*treexp_report_fn)(const char* line, void* user);

/* Runs the oracle and finite-difference suite; max_n <= 6. `failures` gets
 * the number of failed checks (0 means everything passed). */
TREEXP_API treexp_status treexp_verify(int max_n, int trials, uint64_t seed,
                                       treexp_report_fn report, void* user,
                                       int* passed, int* failures);

#ifdef __cplusplus
}
#endif

#endif /* TREEXP_TREEXP_H_ */

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

// Command-line front end over the treexp C API: instance generation,
// quantity computation, oracle verification and benchmarking.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "treexp/treexp.h"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUserError = 2;

// Exit code and payload for a failed computation.
struct CommandError {
  int exit_code;
  std::string status;
  std::string message;
};

struct GraphDeleter {
  void operator()(treexp_graph* g) const { treexp_graph_destroy(g); }
};
struct EdgeFunctionDeleter {
  void operator()(treexp_edge_function* f) const {
    treexp_edge_function_destroy(f);
  }
};
using GraphPtr = std::unique_ptr<treexp_graph, GraphDeleter>;
using EdgeFunctionPtr =
    std::unique_ptr<treexp_edge_function, EdgeFunctionDeleter>;

void check(treexp_status status) {
  if (status == TREEXP_OK) return;
  const int code =
      status == TREEXP_ERR_INTERNAL ? kExitFailure : kExitUserError;
  throw CommandError{code, treexp_status_name(status), treexp_last_error()};
}

[[noreturn]] void invalid(const std::string& message) {
  throw CommandError{kExitUserError, "invalid_instance", message};
}

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- instance files --------------------------------------------------------

struct GEBlock {
  struct Triplet {
    int head, dep, coord;
    double value;
  };
  std::vector<Triplet> features;
  std::vector<double> target;
};

struct Instance {
  int n = 0;
  treexp_root root = TREEXP_MULTI_ROOT;
  std::vector<double> weights;
  int labels = 0;
  std::vector<double> labeled_weights;
  std::optional<std::vector<int>> gold;
  std::optional<std::vector<double>> q_weights;
  std::optional<GEBlock> ge;
};

std::vector<double> flatten_square(const Json& rows, int n,
                                   const char* field) {
  const std::size_t side = static_cast<std::size_t>(n) + 1;
  if (!rows.is_array() || rows.size() != side) {
    invalid(std::string(field) + " must have n + 1 rows");
  }
  std::vector<double> out;
  out.reserve(side * side);
  for (const Json& row : rows) {
    if (!row.is_array() || row.size() != side) {
      invalid(std::string(field) + " rows must have n + 1 entries");
    }
    for (const Json& v : row) out.push_back(v.get<double>());
  }
  return out;
}

Json nest_square(const std::vector<double>& flat, int n) {
  Json rows = Json::array();
  for (int i = 0; i <= n; ++i) {
    Json row = Json::array();
    for (int j = 0; j <= n; ++j) row.push_back(flat[i * (n + 1) + j]);
    rows.push_back(std::move(row));
  }
  return rows;
}

treexp_root parse_root(const std::string& s) {
  if (s == "multi") return TREEXP_MULTI_ROOT;
  if (s == "single") return TREEXP_SINGLE_ROOT;
  invalid("root_constraint must be \"single\" or \"multi\"");
}

const char* root_name(treexp_root root) {
  return root == TREEXP_SINGLE_ROOT ? "single" : "multi";
}

Instance parse_instance(const Json& j) {
  Instance inst;
  try {
    inst.n = j.at("n").get<int>();
    if (inst.n < 1) invalid("n must be at least 1");
    inst.root = parse_root(j.at("root_constraint").get<std::string>());
    if (j.contains("labeled_weights")) {
      inst.labels = j.at("labels").get<int>();
      if (inst.labels < 1) invalid("labels must be at least 1");
      const Json& lw = j.at("labeled_weights");
      const std::size_t side = static_cast<std::size_t>(inst.n) + 1;
      if (!lw.is_array() || lw.size() != side) {
        invalid("labeled_weights must have n + 1 rows");
      }
      for (const Json& row : lw) {
        if (!row.is_array() || row.size() != side) {
          invalid("labeled_weights rows must have n + 1 entries");
        }
        for (const Json& cell : row) {
          if (!cell.is_array() ||
              cell.size() != static_cast<std::size_t>(inst.labels)) {
            invalid("labeled_weights cells must have `labels` entries");
          }
          for (const Json& v : cell) {
            inst.labeled_weights.push_back(v.get<double>());
          }
        }
      }
    }
    if (j.contains("weights")) {
      inst.weights = flatten_square(j.at("weights"), inst.n, "weights");
    } else if (inst.labels == 0) {
      invalid("missing weights");
    }
    if (j.contains("gold")) inst.gold = j.at("gold").get<std::vector<int>>();
    if (j.contains("q_weights")) {
      inst.q_weights = flatten_square(j.at("q_weights"), inst.n, "q_weights");
    }
    if (j.contains("ge")) {
      GEBlock ge;
      ge.target = j.at("ge").at("target").get<std::vector<double>>();
      for (const Json& t : j.at("ge").at("features")) {
        if (!t.is_array() || t.size() != 4) {
          invalid("ge features must be [head, dep, coord, value] triplets");
        }
        ge.features.push_back({t[0].get<int>(), t[1].get<int>(),
                               t[2].get<int>(), t[3].get<double>()});
      }
      inst.ge = std::move(ge);
    }
  } catch (const Json::exception& e) {
    invalid(e.what());
  }
  return inst;
}

Json serialize_instance(const Instance& inst, std::uint64_t seed) {
  Json j;
  j["seed"] = seed;
  j["n"] = inst.n;
  j["root_constraint"] = root_name(inst.root);
  j["weights"] = nest_square(inst.weights, inst.n);
  if (inst.gold) j["gold"] = *inst.gold;
  if (inst.q_weights) j["q_weights"] = nest_square(*inst.q_weights, inst.n);
  if (inst.ge) {
    Json features = Json::array();
    for (const auto& t : inst.ge->features) {
      features.push_back(Json::array({t.head, t.dep, t.coord, t.value}));
    }
    j["ge"] = {{"features", features}, {"target", inst.ge->target}};
  }
  return j;
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    invalid(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CommandError{kExitFailure, "io", "cannot write " + path};
  out << text;
  if (!out) throw CommandError{kExitFailure, "io", "cannot write " + path};
}

GraphPtr make_graph(int n, treexp_root root, const std::vector<double>& w) {
  treexp_graph* g = nullptr;
  check(treexp_graph_create(n, root, w.data(), &g));
  return GraphPtr(g);
}

GraphPtr make_graph(const Instance& inst) {
  if (!inst.labeled_weights.empty()) {
    treexp_graph* g = nullptr;
    check(treexp_graph_create_labeled(inst.n, inst.labels, inst.root,
                                      inst.labeled_weights.data(), &g));
    return GraphPtr(g);
  }
  return make_graph(inst.n, inst.root, inst.weights);
}

EdgeFunctionPtr make_features(const GEBlock& ge, int n) {
  treexp_edge_function* f = nullptr;
  check(treexp_edge_function_create(n, static_cast<int>(ge.target.size()),
                                    &f));
  EdgeFunctionPtr owned(f);
  for (const auto& t : ge.features) {
    check(treexp_edge_function_add(f, t.head, t.dep, t.coord, t.value));
  }
  return owned;
}

// ---- deterministic extras for generated instances ------------------------

std::vector<int> random_gold(std::mt19937_64& rng, int n, treexp_root root) {
  // Attach nodes in random order; each attaches to the root or an earlier node.
  std::vector<int> order(n);
  for (int j = 0; j < n; ++j) order[j] = j + 1;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> heads(n, 0);
  for (int t = 1; t < n; ++t) {
    const int lo = root == TREEXP_SINGLE_ROOT ? 0 : -1;
    std::uniform_int_distribution<int> pick(lo, t - 1);
    const int p = pick(rng);
    heads[order[t] - 1] = p < 0 ? 0 : order[p];
  }
  return heads;
}

GEBlock random_ge(std::mt19937_64& rng, int n, int dim, int density) {
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::vector<int> coords(dim);
  for (int c = 0; c < dim; ++c) coords[c] = c;
  GEBlock ge;
  for (int i = 0; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      std::shuffle(coords.begin(), coords.end(), rng);
      for (int t = 0; t < std::min(density, dim); ++t) {
        ge.features.push_back({i, j, coords[t], value(rng)});
      }
    }
  }
  for (int c = 0; c < dim; ++c) ge.target.push_back(value(rng));
  return ge;
}

std::vector<double> random_weights(std::uint64_t seed, int n) {
  std::vector<double> w(static_cast<std::size_t>(n + 1) * (n + 1));
  check(treexp_random_weights(seed, n, w.data()));
  return w;
}

Instance generate(std::uint64_t seed, int n, treexp_root root, bool extras) {
  Instance inst;
  inst.n = n;
  inst.root = root;
  inst.weights = random_weights(seed, n);
  if (extras) {
    std::mt19937_64 rng(seed);
    rng.discard(1);
    inst.gold = random_gold(rng, n, root);
    inst.q_weights = random_weights(rng(), n);
    inst.ge = random_ge(rng, n, 4, 2);
  }
  return inst;
}

// ---- commands ------------------------------------------------------------

struct Output {
  double value = 0.0;
  std::optional<std::vector<double>> gradient;
  std::optional<std::vector<double>> values;  // array-valued results
};

std::string render(const Output& out) {
  std::ostringstream s;
  s << "{\"value\": " << format_double(out.value);
  auto array = [&](const char* key, const std::vector<double>& v) {
    s << ", \"" << key << "\": [";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s << ", ";
      s << format_double(v[i]);
    }
    s << "]";
  };
  if (out.values) array("values", *out.values);
  if (out.gradient) array("gradient", *out.gradient);
  s << "}";
  return s.str();
}

struct ComputeArgs {
  std::string quantity;
  std::string in;
  std::string q_path;
  bool grad = false;
  double alpha = 2.0;
  double k = 2.0;
  std::string algorithm = "second";
};

treexp_algorithm parse_algorithm(const std::string& s) {
  if (s == "hes") return TREEXP_SECOND_HES;
  if (s == "vjp") return TREEXP_SECOND_VJP;
  return TREEXP_SECOND;
}

Output compute(const ComputeArgs& a) {
  const Instance inst = parse_instance(read_json(a.in));
  const GraphPtr g = make_graph(inst);
  const std::size_t edges = static_cast<std::size_t>(inst.n + 1) * (inst.n + 1);
  Output out;
  std::vector<double> grad(edges, 0.0);
  double* grad_ptr = a.grad ? grad.data() : nullptr;
  const std::string& q = a.quantity;
  if (q == "z") {
    check(treexp_partition_function(g.get(), &out.value));
    if (a.grad) check(treexp_partition_gradient(g.get(), grad_ptr));
  } else if (q == "marginals") {
    std::vector<double> m(edges);
    check(treexp_edge_marginals(g.get(), m.data()));
    check(treexp_partition_function(g.get(), &out.value));
    out.values = std::move(m);
  } else if (q == "entropy") {
    check(treexp_entropy(g.get(), &out.value, grad_ptr));
  } else if (q == "kl") {
    GraphPtr qg;
    if (!a.q_path.empty()) {
      const Instance qi = parse_instance(read_json(a.q_path));
      if (qi.n != inst.n) invalid("q instance has a different n");
      qg = make_graph(qi);
    } else if (inst.q_weights) {
      qg = make_graph(inst.n, inst.root, *inst.q_weights);
    } else {
      invalid("kl needs q_weights or --q");
    }
    check(treexp_kl_divergence(g.get(), qg.get(), &out.value, grad_ptr));
  } else if (q == "risk") {
    if (!inst.gold) invalid("risk needs a gold tree");
    if (inst.gold->size() != static_cast<std::size_t>(inst.n)) {
      invalid("gold must have n entries");
    }
    check(treexp_expected_attachment(g.get(), inst.gold->data(), &out.value,
                                     grad_ptr));
  } else if (q == "ge") {
    if (!inst.ge) invalid("ge needs a ge block");
    const EdgeFunctionPtr f = make_features(*inst.ge, inst.n);
    check(treexp_ge_objective(g.get(), f.get(), inst.ge->target.data(),
                              parse_algorithm(a.algorithm), &out.value,
                              grad_ptr));
  } else if (q == "renyi") {
    check(treexp_renyi_entropy(g.get(), a.alpha, &out.value));
  } else if (q == "lpnorm") {
    check(treexp_lp_norm(g.get(), a.k, &out.value));
  }
  if (a.grad && (q == "z" || q == "entropy" || q == "kl" || q == "risk" ||
                 q == "ge")) {
    out.gradient = std::move(grad);
  }
  return out;
}

void report_line(const char* line, void* user) {
  static_cast<std::vector<std::string>*>(user)->push_back(line);
}

int verify(int max_n, int trials, std::uint64_t seed) {
  std::vector<std::string> lines;
  int passed = 0;
  int failures = 0;
  check(treexp_verify(max_n, trials, seed, report_line, &lines, &passed,
                      &failures));
  for (const auto& line : lines) std::cout << line << "\n";
  std::cout << "passed " << passed << ", failed " << failures << "\n";
  return failures == 0 ? kExitOk : kExitFailure;
}

struct BenchArgs {
  std::vector<int> sizes = {8, 16, 32, 64, 128};
  int reps = 5;
  std::uint64_t seed = 1;
  std::string out;
  std::string instances_dir;
};

template <class Fn>
double mean_ms(int reps, Fn&& fn) {
  fn();  // warm-up
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  for (int r = 0; r < reps; ++r) fn();
  const std::chrono::duration<double, std::milli> elapsed =
      Clock::now() - start;
  return elapsed.count() / reps;
}

int bench(const BenchArgs& a) {
  if (a.reps < 5) {
    throw CommandError{kExitUserError, "usage", "--reps must be at least 5"};
  }
  if (!std::is_sorted(a.sizes.begin(), a.sizes.end())) {
    throw CommandError{kExitUserError, "usage", "--sizes must be ascending"};
  }
  constexpr int kFeatures = 20;
  constexpr int kActivePerEdge = 3;
  std::ostringstream csv;
  csv << "n,algo,ms,reps\n";
  Json values = Json::object();
  for (const int n : a.sizes) {
    if (n < 1) throw CommandError{kExitUserError, "usage", "sizes must be >= 1"};
    const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(n);
    Instance inst = generate(seed, n, TREEXP_MULTI_ROOT, false);
    std::mt19937_64 rng(seed);
    inst.ge = random_ge(rng, n, kFeatures, kActivePerEdge);
    const GraphPtr g = make_graph(inst);
    const EdgeFunctionPtr f = make_features(*inst.ge, n);
    const std::size_t edges = static_cast<std::size_t>(n + 1) * (n + 1);
    std::vector<double> grad(edges);
    double entropy = 0.0, baseline = 0.0, ge_second = 0.0, ge_hes = 0.0;

    auto row = [&](const char* algo, double ms) {
      csv << n << "," << algo << "," << format_double(ms) << "," << a.reps
          << "\n";
    };
    row("entropy", mean_ms(a.reps, [&] {
          check(treexp_entropy(g.get(), &entropy, nullptr));
        }));
    row("entropy_baseline", mean_ms(a.reps, [&] {
          check(treexp_entropy_baseline(g.get(), &baseline));
        }));
    row("ge_second", mean_ms(a.reps, [&] {
          check(treexp_ge_objective(g.get(), f.get(), inst.ge->target.data(),
                                    TREEXP_SECOND, &ge_second, grad.data()));
        }));
    row("ge_hes", mean_ms(a.reps, [&] {
          check(treexp_ge_objective(g.get(), f.get(), inst.ge->target.data(),
                                    TREEXP_SECOND_HES, &ge_hes, grad.data()));
        }));
    std::cerr << "n=" << n << " done\n";

    if (!a.instances_dir.empty()) {
      const std::string base = a.instances_dir + "/n" + std::to_string(n);
      write_text(base + ".json", serialize_instance(inst, seed).dump(2) + "\n");
      Json v;
      v["entropy"] = format_double(entropy);
      v["entropy_baseline"] = format_double(baseline);
      v["ge_second"] = format_double(ge_second);
      v["ge_hes"] = format_double(ge_hes);
      values[std::to_string(n)] = v;
    }
  }
  if (!a.instances_dir.empty()) {
    write_text(a.instances_dir + "/values.json", values.dump(2) + "\n");
  }
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    write_text(a.out, csv.str());
  }
  return kExitOk;
}

void print_error(const CommandError& e) {
  Json err;
  err["error"] = {{"status", e.status}, {"message", e.message}};
  std::cout << err.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expectations over spanning arborescences"};
  app.require_subcommand(1);

  std::uint64_t gen_seed = 1;
  int gen_n = 0;
  std::string gen_constraint = "multi";
  std::string gen_out;
  bool gen_extras = false;
  auto* gen = app.add_subcommand("gen", "Write a random instance file");
  gen->add_option("--seed", gen_seed, "Random seed")->required();
  gen->add_option("--n", gen_n, "Number of non-root nodes")
      ->required()
      ->check(CLI::PositiveNumber);
  gen->add_option("--constraint", gen_constraint, "Root constraint")
      ->check(CLI::IsMember({"single", "multi"}));
  gen->add_option("--out", gen_out, "Output path (stdout if omitted)");
  gen->add_flag("--extras", gen_extras,
                "Also emit gold, q_weights and a ge block");

  ComputeArgs ca;
  auto* comp = app.add_subcommand("compute", "Compute a quantity");
  comp->add_option("quantity", ca.quantity, "Quantity")
      ->required()
      ->check(CLI::IsMember(
          {"z", "marginals", "entropy", "kl", "risk", "ge", "renyi", "lpnorm"}));
  comp->add_option("--in", ca.in, "Instance file")->required();
  comp->add_flag("--grad", ca.grad, "Also compute the gradient");
  comp->add_option("--alpha", ca.alpha, "Renyi order");
  comp->add_option("--k", ca.k, "Norm order");
  comp->add_option("--q", ca.q_path, "Instance file for q (kl)");
  comp->add_option("--algorithm", ca.algorithm, "Second-order algorithm")
      ->check(CLI::IsMember({"second", "hes", "vjp"}));

  int v_max_n = 4, v_trials = 20;
  std::uint64_t v_seed = 7;
  auto* ver = app.add_subcommand("verify", "Run the oracle suite");
  ver->add_option("--max-n", v_max_n, "Largest instance size")
      ->check(CLI::Range(1, 6));
  ver->add_option("--trials", v_trials, "Number of random instances")
      ->check(CLI::NonNegativeNumber);
  ver->add_option("--seed", v_seed, "Base seed");

  BenchArgs ba;
  auto* ben = app.add_subcommand("bench", "Time fast and baseline algorithms");
  ben->add_option("--sizes", ba.sizes, "Instance sizes")->delimiter(',');
  ben->add_option("--reps", ba.reps, "Timed repetitions per size");
  ben->add_option("--seed", ba.seed, "Base seed");
  ben->add_option("--out", ba.out, "CSV path (stdout if omitted)");
  ben->add_option("--instances", ba.instances_dir,
                  "Directory for benchmarked instances and their values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUserError;
  }

  try {
    if (*gen) {
      const treexp_root root = parse_root(gen_constraint);
      const std::string text =
          serialize_instance(generate(gen_seed, gen_n, root, gen_extras),
                             gen_seed)
              .dump(2) +
          "\n";
      if (gen_out.empty()) {
        std::cout << text;
      } else {
        write_text(gen_out, text);
      }
      return kExitOk;
    }
    if (*comp) {
      std::cout << render(compute(ca)) << "\n";
      return kExitOk;
    }
    if (*ver) return verify(v_max_n, v_trials, v_seed);
    if (*ben) return bench(ba);
  } catch (const CommandError& e) {
    print_error(e);
    return e.exit_code;
  } catch (const std::exception& e) {
    print_error({kExitFailure, "internal", e.what()});
    return kExitFailure;
  }
  return kExitFailure;
}

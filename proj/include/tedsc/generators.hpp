#pragma once
// Instance generators with known ground truth, obtained by inverting
// hardness constructions:
//  - 3-CNF formulas -> constrained instances with h = 5 (feasible iff
//    satisfiable),
//  - edge disjoint paths on DAGs -> length-constrained instances with
//    h = n + 1,
//  - bin packing -> length-constrained instances on the bidirected
//    three-vertex path,
// plus the vertex/edge-disjointness transforms and a seeded uniform
// random generator.

#include <functional>
#include <random>

#include "tedsc/core.hpp"

namespace tedsc {

enum class GroundTruth { Feasible, Infeasible, Unknown };

inline const char* ground_truth_name(GroundTruth g) {
  switch (g) {
    case GroundTruth::Feasible: return "feasible";
    case GroundTruth::Infeasible: return "infeasible";
    case GroundTruth::Unknown: return "unknown";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Satisfiability

// Literal: variable index 1-based, negative for negated.
using Clause = std::vector<int>;

struct Cnf {
  int variables = 0;
  std::vector<Clause> clauses;
};

// Plain DPLL with unit propagation; empty on resource refusal.
inline std::optional<bool> dpll_satisfiable(const Cnf& cnf,
                                            std::int64_t budget = 2'000'000) {
  std::vector<Clause> cl = cnf.clauses;
  std::vector<int> trail(static_cast<std::size_t>(cnf.variables) + 1, 0);
  std::function<std::optional<bool>(std::int64_t&)> go =
      [&](std::int64_t& fuel) -> std::optional<bool> {
    if (--fuel < 0) return std::nullopt;
    // evaluate and collect the first unassigned variable
    int branch_var = 0;
    bool all_true = true;
    for (const Clause& c : cl) {
      bool sat = false, open = false;
      int unit = 0, unassigned = 0;
      for (int lit : c) {
        int v = std::abs(lit);
        int val = trail[static_cast<std::size_t>(v)];
        if (val == 0) {
          open = true;
          ++unassigned;
          unit = lit;
          if (!branch_var) branch_var = v;
        } else if (val == (lit > 0 ? 1 : -1)) {
          sat = true;
          break;
        }
      }
      if (sat) continue;
      if (!open) return false;
      all_true = false;
      if (unassigned == 1) {
        int v = std::abs(unit);
        trail[static_cast<std::size_t>(v)] = unit > 0 ? 1 : -1;
        auto r = go(fuel);
        trail[static_cast<std::size_t>(v)] = 0;
        return r;
      }
    }
    if (all_true) return true;
    for (int val : {1, -1}) {
      trail[static_cast<std::size_t>(branch_var)] = val;
      auto r = go(fuel);
      trail[static_cast<std::size_t>(branch_var)] = 0;
      if (!r.has_value()) return std::nullopt;
      if (*r) return true;
    }
    return false;
  };
  std::int64_t fuel = budget;
  return go(fuel);
}

// Every clause padded to exactly three literals (repeating the last one),
// then every variable balanced to equally many positive and negative
// occurrences by appending tautological clauses (minority-literal or y or
// not-y) with a fresh y per clause. Equisatisfiable by construction.
inline Cnf balance_cnf(const Cnf& input) {
  Cnf out;
  out.variables = input.variables;
  for (const Clause& c : input.clauses) {
    if (c.empty()) throw StructuralError("empty clause");
    if (c.size() > 3) throw StructuralError("clause with more than 3 literals");
    Clause padded = c;
    while (padded.size() < 3) padded.push_back(padded.back());
    for (int lit : padded)
      if (lit == 0 || std::abs(lit) > input.variables)
        throw StructuralError("literal out of range");
    out.clauses.push_back(std::move(padded));
  }
  std::vector<int> pos(static_cast<std::size_t>(input.variables) + 1, 0);
  std::vector<int> neg(static_cast<std::size_t>(input.variables) + 1, 0);
  for (const Clause& c : out.clauses)
    for (int lit : c) ++(lit > 0 ? pos : neg)[static_cast<std::size_t>(std::abs(lit))];
  for (int v = 1; v <= input.variables; ++v) {
    while (pos[static_cast<std::size_t>(v)] != neg[static_cast<std::size_t>(v)]) {
      int fresh = ++out.variables;
      int minority = pos[static_cast<std::size_t>(v)] < neg[static_cast<std::size_t>(v)] ? v : -v;
      out.clauses.push_back({minority, fresh, -fresh});
      ++(minority > 0 ? pos : neg)[static_cast<std::size_t>(v)];
    }
  }
  return out;
}

inline bool cnf_is_balanced(const Cnf& cnf) {
  std::vector<int> delta(static_cast<std::size_t>(cnf.variables) + 1, 0);
  for (const Clause& c : cnf.clauses)
    for (int lit : c) delta[static_cast<std::size_t>(std::abs(lit))] += lit > 0 ? 1 : -1;
  return std::all_of(delta.begin(), delta.end(), [](int d) { return d == 0; });
}

struct GeneratedInstance {
  Instance instance;
  GroundTruth truth = GroundTruth::Unknown;
};

// Builds the constrained instance whose feasibility encodes satisfiability
// of the (balanced) formula: per occurrence of each variable a five-vertex
// gadget carrying two crossing source-sink routes, per clause an entry/exit
// pair wired to its literals; h = 5, k = 4m, |D| = 8m for m clauses.
inline GeneratedInstance gen_from_3sat(const Cnf& input, Variant variant) {
  if (variant == Variant::Unconstrained)
    throw std::invalid_argument("satisfiability instances are constrained");
  Cnf cnf = balance_cnf(input);
  const int m = static_cast<int>(cnf.clauses.size());

  // occurrence slots per variable, in clause order
  std::vector<std::vector<std::pair<int, int>>> occ(
      static_cast<std::size_t>(cnf.variables) + 1);  // (clause, literal idx)
  for (int j = 0; j < m; ++j)
    for (int li = 0; li < 3; ++li) {
      int lit = cnf.clauses[static_cast<std::size_t>(j)][static_cast<std::size_t>(li)];
      occ[static_cast<std::size_t>(std::abs(lit))].emplace_back(j, li);
    }

  // vertex ids
  int next = 0;
  int s_star = next++;
  int z_star = next++;
  struct Slot { int s, x, xbar, z, zp; };
  std::vector<std::vector<Slot>> slot(static_cast<std::size_t>(cnf.variables) + 1);
  for (int v = 1; v <= cnf.variables; ++v)
    for (std::size_t kk = 0; kk < occ[static_cast<std::size_t>(v)].size(); ++kk)
      slot[static_cast<std::size_t>(v)].push_back(
          {next++, next++, next++, next++, next++});
  std::vector<int> s_cls(static_cast<std::size_t>(m)), c_cls(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    s_cls[static_cast<std::size_t>(j)] = next++;
    c_cls[static_cast<std::size_t>(j)] = next++;
  }

  std::set<std::pair<Vertex, Vertex>> edges;
  std::vector<Demand> demands;
  for (int v = 1; v <= cnf.variables; ++v) {
    const auto& sl = slot[static_cast<std::size_t>(v)];
    const int n_v = static_cast<int>(sl.size());
    for (int kk = 0; kk < n_v; ++kk) {
      const Slot& s = sl[static_cast<std::size_t>(kk)];
      const Slot& s_next = sl[static_cast<std::size_t>((kk + 1) % n_v)];
      // route through the positive copy and the crossing negative route
      edges.insert({s_star, s.s});
      edges.insert({s.s, s.x});
      edges.insert({s.x, s.z});
      edges.insert({s.z, s.zp});
      edges.insert({s.zp, z_star});
      edges.insert({s_next.s, s.xbar});  // wrap-around at the last slot
      edges.insert({s.xbar, s.z});
      demands.push_back({s_star, s.s, 2});
      demands.push_back({s.zp, z_star, 6});
    }
  }
  for (int j = 0; j < m; ++j) {
    edges.insert({s_star, s_cls[static_cast<std::size_t>(j)]});
    edges.insert({c_cls[static_cast<std::size_t>(j)], z_star});
    demands.push_back({s_star, s_cls[static_cast<std::size_t>(j)], 1});
    demands.push_back({c_cls[static_cast<std::size_t>(j)], z_star, 5});
    for (int li = 0; li < 3; ++li) {
      int lit = cnf.clauses[static_cast<std::size_t>(j)][static_cast<std::size_t>(li)];
      int v = std::abs(lit);
      // which occurrence slot of the variable is this literal?
      int kk = 0;
      for (std::size_t o = 0; o < occ[static_cast<std::size_t>(v)].size(); ++o)
        if (occ[static_cast<std::size_t>(v)][o] == std::make_pair(j, li))
          kk = static_cast<int>(o);
      const auto& sl = slot[static_cast<std::size_t>(v)];
      const int n_v = static_cast<int>(sl.size());
      if (lit > 0) {
        edges.insert({s_cls[static_cast<std::size_t>(j)],
                      sl[static_cast<std::size_t>(kk)].s});
        edges.insert({sl[static_cast<std::size_t>(kk)].x,
                      c_cls[static_cast<std::size_t>(j)]});
      } else {
        edges.insert({s_cls[static_cast<std::size_t>(j)],
                      sl[static_cast<std::size_t>((kk + 1) % n_v)].s});
        edges.insert({sl[static_cast<std::size_t>(kk)].xbar,
                      c_cls[static_cast<std::size_t>(j)]});
      }
    }
  }

  GeneratedInstance out;
  if (m == 0) {
    // no clauses: trivially satisfiable, empty draft schedule
    out.instance = make_instance(DirectedGraph(2, {{0, 1}}), {}, 0, Time{5},
                                 variant);
    out.truth = GroundTruth::Feasible;
    return out;
  }
  DirectedGraph g(next, {edges.begin(), edges.end()});
  out.instance = make_instance(g, demands, 4 * m, Time{5}, variant);
  auto sat = dpll_satisfiable(cnf);
  out.truth = !sat.has_value() ? GroundTruth::Unknown
              : (*sat ? GroundTruth::Feasible : GroundTruth::Infeasible);
  return out;
}

// ---------------------------------------------------------------------------
// Edge disjoint paths on DAGs

// Exhaustive edge-disjoint path check used for small ground truths.
inline std::optional<bool> edp_exhaustive(
    const DirectedGraph& g,
    const std::vector<std::pair<Vertex, Vertex>>& pairs, int edge_cap = 14) {
  if (g.edge_count() > edge_cap) return std::nullopt;
  std::vector<char> used(static_cast<std::size_t>(g.edge_count()), 0);
  std::function<bool(std::size_t)> pick = [&](std::size_t i) -> bool {
    if (i == pairs.size()) return true;
    std::function<bool(Vertex)> dfs = [&](Vertex at) -> bool {
      if (at == pairs[i].second && pick(i + 1)) return true;
      for (Vertex y : g.out_neighbors(at)) {
        int e = g.edge_index(at, y);
        if (used[static_cast<std::size_t>(e)]) continue;
        used[static_cast<std::size_t>(e)] = 1;
        if (dfs(y)) return true;
        used[static_cast<std::size_t>(e)] = 0;
      }
      return false;
    };
    return dfs(pairs[i].first);
  };
  return pick(0);
}

inline std::optional<std::vector<int>> topological_order(const DirectedGraph& g) {
  std::vector<int> indeg(static_cast<std::size_t>(g.vertex_count()), 0);
  for (auto [u, v] : g.edges()) ++indeg[static_cast<std::size_t>(v)];
  std::vector<int> order;
  std::vector<Vertex> q;
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    if (indeg[static_cast<std::size_t>(v)] == 0) q.push_back(v);
  while (!q.empty()) {
    Vertex x = q.front();
    q.erase(q.begin());
    order.push_back(x);
    for (Vertex y : g.out_neighbors(x))
      if (--indeg[static_cast<std::size_t>(y)] == 0) q.push_back(y);
  }
  if (static_cast<int>(order.size()) != g.vertex_count()) return std::nullopt;
  return order;
}

// Subdivides the DAG along a topological numbering so every path between
// two originals has a length equal to their rank distance, attaches one
// entry path and one exit edge per terminal pair, and places the two
// demands that force each walk to traverse its pair's route exactly;
// h = n + 1 for n original vertices, k = number of pairs.
inline GeneratedInstance gen_from_edp_dag(
    const DirectedGraph& dag,
    const std::vector<std::pair<Vertex, Vertex>>& pairs, Variant variant) {
  auto topo = topological_order(dag);
  if (!topo) throw StructuralError("input graph is not acyclic");
  const int n = dag.vertex_count();
  std::vector<std::int64_t> phi(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < topo->size(); ++i)
    phi[static_cast<std::size_t>((*topo)[i])] = static_cast<std::int64_t>(i) + 1;
  const Time h = n + 1;

  int next = n;
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (auto [u, v] : dag.edges()) {
    std::int64_t len = phi[static_cast<std::size_t>(v)] - phi[static_cast<std::size_t>(u)];
    Vertex at = u;
    for (std::int64_t step = 1; step < len; ++step) {
      edges.emplace_back(at, next);
      at = next++;
    }
    edges.emplace_back(at, v);
  }

  std::vector<Demand> demands;
  for (auto [s, z] : pairs) {
    if (s < 0 || s >= n || z < 0 || z >= n || s == z)
      throw StructuralError("bad terminal pair");
    Vertex zp = next++;  // exit
    edges.emplace_back(z, zp);
    std::int64_t entry_len =
        h - (phi[static_cast<std::size_t>(z)] - phi[static_cast<std::size_t>(s)]) - 1;
    if (entry_len < 1) throw StructuralError("terminal pair spans too far");
    // entry path of entry_len edges ending on s
    Vertex at = next++;
    Vertex first = at;
    for (std::int64_t step = 1; step < entry_len; ++step) {
      edges.emplace_back(at, next);
      at = next++;
    }
    edges.emplace_back(at, s);
    Vertex second = entry_len == 1 ? s : first + 1;
    demands.push_back({first, second, phi[static_cast<std::size_t>(z)] - h + 1});
    demands.push_back({z, zp, phi[static_cast<std::size_t>(z)]});
  }

  // demand times may start below 1; shift the whole schedule up
  Time min_t = 1;
  for (const Demand& d : demands) min_t = std::min(min_t, d.t);
  for (Demand& d : demands) d.t += 1 - min_t;

  GeneratedInstance out;
  DirectedGraph g(next, edges);
  out.instance =
      make_instance(g, demands, static_cast<int>(pairs.size()), h, variant);
  auto truth = edp_exhaustive(dag, pairs);
  out.truth = !truth.has_value() ? GroundTruth::Unknown
              : (*truth ? GroundTruth::Feasible : GroundTruth::Infeasible);
  return out;
}

// ---------------------------------------------------------------------------
// Bin packing on the three-vertex path

// Universe items of the given sizes packed into `bins` bins of capacity
// `cap` become demands on the bidirected path u - v - w: an initialization
// demand per walk, then one phase per item whose back-and-forth demands
// force a single walk to spend 2 * size steps; h = 2 * cap + 1.
inline GeneratedInstance gen_from_bin_packing(std::vector<std::int64_t> sizes,
                                              int bins, std::int64_t cap) {
  if (bins < 1 || cap < 1) throw StructuralError("bins and capacity must be positive");
  for (std::int64_t s : sizes)
    if (s < 1) throw StructuralError("item sizes must be positive");
  std::int64_t total = 0;
  for (std::int64_t s : sizes) total += s;
  while (total < static_cast<std::int64_t>(bins) * cap) {
    sizes.push_back(1);  // padding with unit items
    ++total;
  }
  if (total != static_cast<std::int64_t>(bins) * cap)
    throw StructuralError("item sizes exceed the total bin capacity");

  const Vertex u = 0, v = 1, w = 2;
  DirectedGraph g(3, {{u, v}, {v, u}, {v, w}, {w, v}});
  std::vector<Demand> demands;
  for (int t = 1; t <= bins; ++t) demands.push_back({v, u, t});
  Time begin = bins + 1;
  for (std::int64_t s : sizes) {
    demands.push_back({u, v, begin});
    for (std::int64_t j = 0; j + 2 <= s; ++j) {
      demands.push_back({v, w, begin + 1 + 2 * j});
      demands.push_back({w, v, begin + 2 + 2 * j});
    }
    demands.push_back({v, u, begin + 2 * s - 1});
    begin += 2 * s;
  }

  GeneratedInstance out;
  out.instance = make_instance(g, demands, bins, 2 * cap + 1, Variant::Length);

  // exhaustive partition check
  std::function<bool(std::size_t, std::vector<std::int64_t>&)> place =
      [&](std::size_t i, std::vector<std::int64_t>& load) -> bool {
    if (i == sizes.size()) return true;
    std::set<std::int64_t> tried;
    for (auto& l : load) {
      if (l + sizes[i] > cap) continue;
      if (!tried.insert(l).second) continue;
      l += sizes[i];
      if (place(i + 1, load)) return true;
      l -= sizes[i];
    }
    return false;
  };
  std::vector<std::int64_t> order = sizes;
  std::sort(order.rbegin(), order.rend());
  std::vector<std::int64_t> load(static_cast<std::size_t>(bins), 0);
  std::vector<std::int64_t> saved = sizes;
  sizes = order;
  bool part = place(0, load);
  sizes = saved;
  out.truth = part ? GroundTruth::Feasible : GroundTruth::Infeasible;
  return out;
}

// ---------------------------------------------------------------------------
// Vertex/edge disjoint path transforms

enum class DisjointnessDirection { VertexToEdge, EdgeToVertex };

struct DisjointPathsInstance {
  DirectedGraph graph;
  std::vector<std::pair<Vertex, Vertex>> pairs;
};

// VertexToEdge splits every vertex into an in- and an out-copy joined by
// one edge; EdgeToVertex gives every vertex k copies and every edge a
// middle vertex wired to all of them.
inline DisjointPathsInstance vdp_edp_transform(
    const DirectedGraph& g, const std::vector<std::pair<Vertex, Vertex>>& pairs,
    DisjointnessDirection direction) {
  const int n = g.vertex_count();
  const int k = static_cast<int>(pairs.size());
  DisjointPathsInstance out;
  if (direction == DisjointnessDirection::VertexToEdge) {
    // v_in = 2v, v_out = 2v + 1
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex v = 0; v < n; ++v) edges.emplace_back(2 * v, 2 * v + 1);
    for (auto [x, y] : g.edges()) edges.emplace_back(2 * x + 1, 2 * y);
    out.graph = DirectedGraph(2 * n, edges);
    for (auto [s, z] : pairs) out.pairs.emplace_back(2 * s, 2 * z + 1);
  } else {
    if (k > g.edge_count())
      throw StructuralError("more pairs than edges cannot be edge disjoint");
    // copy i of vertex v = v * k + i; edge vertex following the copies
    std::vector<std::pair<Vertex, Vertex>> edges;
    int next = n * k;
    for (auto [x, y] : g.edges()) {
      int ev = next++;
      for (int i = 0; i < k; ++i) {
        edges.emplace_back(x * k + i, ev);
        edges.emplace_back(ev, y * k + i);
      }
    }
    out.graph = DirectedGraph(next, edges);
    for (int i = 0; i < k; ++i)
      out.pairs.emplace_back(pairs[static_cast<std::size_t>(i)].first * k + i,
                             pairs[static_cast<std::size_t>(i)].second * k + i);
  }
  return out;
}

// Exhaustive vertex-disjoint path check for cross-validating the transforms.
inline std::optional<bool> vdp_exhaustive(
    const DirectedGraph& g,
    const std::vector<std::pair<Vertex, Vertex>>& pairs, int edge_cap = 20) {
  if (g.edge_count() > edge_cap) return std::nullopt;
  std::vector<char> used(static_cast<std::size_t>(g.vertex_count()), 0);
  std::function<bool(std::size_t)> pick = [&](std::size_t i) -> bool {
    if (i == pairs.size()) return true;
    if (used[static_cast<std::size_t>(pairs[i].first)]) return false;
    used[static_cast<std::size_t>(pairs[i].first)] = 1;
    std::function<bool(Vertex)> dfs = [&](Vertex at) -> bool {
      if (at == pairs[i].second && pick(i + 1)) return true;
      for (Vertex y : g.out_neighbors(at)) {
        if (used[static_cast<std::size_t>(y)]) continue;
        used[static_cast<std::size_t>(y)] = 1;
        if (dfs(y)) return true;
        used[static_cast<std::size_t>(y)] = 0;
      }
      return false;
    };
    bool r = dfs(pairs[i].first);
    used[static_cast<std::size_t>(pairs[i].first)] = 0;
    return r;
  };
  return pick(0);
}

// ---------------------------------------------------------------------------
// Random instances

struct RandomSpec {
  int n = 3;
  int m = 4;
  int demands = 3;
  Time lambda = 5;
  int k = 2;
  std::optional<Time> h;
  Variant variant = Variant::Unconstrained;
  std::uint64_t seed = 0;
};

// Seeded uniform digraph plus uniform demands over existing edges and
// [1, lambda], normalized so the first demand is at time 1. Deterministic
// per seed.
inline Instance gen_random(const RandomSpec& spec) {
  if (spec.n < 2 || spec.m < 1 || spec.demands < 1 || spec.lambda < 1)
    throw StructuralError("random spec parameters must be positive");
  if (spec.m > spec.n * (spec.n - 1))
    throw StructuralError("more edges than ordered vertex pairs");
  if (spec.n > 2 * spec.m)
    throw StructuralError("not enough edges to avoid isolated vertices");
  if (static_cast<std::int64_t>(spec.demands) >
      static_cast<std::int64_t>(spec.m) * spec.lambda)
    throw StructuralError("more demands than temporal edges");

  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> pick_v(0, spec.n - 1);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::set<std::pair<Vertex, Vertex>> eset;
    while (static_cast<int>(eset.size()) < spec.m) {
      Vertex a = pick_v(rng), b = pick_v(rng);
      if (a != b) eset.insert({a, b});
    }
    DirectedGraph g(spec.n, {eset.begin(), eset.end()});
    if (g.has_isolated_vertex()) continue;
    std::vector<std::pair<Vertex, Vertex>> edges = g.edges();
    std::uniform_int_distribution<std::size_t> pick_e(0, edges.size() - 1);
    std::uniform_int_distribution<Time> pick_t(1, spec.lambda);
    std::set<Demand> dset;
    while (static_cast<int>(dset.size()) < spec.demands) {
      auto [u, v] = edges[pick_e(rng)];
      dset.insert({u, v, pick_t(rng)});
    }
    std::vector<Demand> demands(dset.begin(), dset.end());
    Time min_t = demands.front().t;
    for (const Demand& d : demands) min_t = std::min(min_t, d.t);
    for (Demand& d : demands) d.t -= min_t - 1;
    return make_instance(g, demands, spec.k, spec.h, spec.variant);
  }
  throw StructuralError("no isolated-vertex-free graph found for the spec");
}

}  // namespace tedsc

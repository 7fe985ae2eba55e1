#pragma once
// Integral flows on layered networks: feasibility under lower bounds,
// minimum-cost flow of a fixed value, decomposition into source-sink paths,
// and an independent consistency checker.
//
// The networks are acyclic with small integral capacities, so plain
// augmenting-path methods are used throughout; all tie-breaking is by lowest
// edge index, which keeps every result deterministic.

#include <deque>

#include "tedsc/expansion.hpp"

namespace tedsc {

struct Flow {
  std::vector<std::int64_t> edge_flow;  // by network edge index
  std::int64_t value = 0;
};

enum class CostKind { Tau, Ell };

inline std::int64_t edge_cost(const NetEdge& e, CostKind kind) {
  return kind == CostKind::Tau ? e.cost_tau : e.cost_ell;
}

inline std::int64_t flow_cost(const LayeredNetwork& net, const Flow& f,
                              CostKind kind) {
  std::int64_t c = 0;
  for (std::size_t e = 0; e < net.edges.size(); ++e)
    c += f.edge_flow[e] * edge_cost(net.edges[e], kind);
  return c;
}

// Conservation, capacity, range and terminal conditions, checked directly
// from the definitions. Empty result means the flow is consistent.
inline std::optional<std::string> check_flow(const LayeredNetwork& net,
                                             const Flow& f) {
  if (!net.source || !net.sink) return "network has no source/sink";
  if (f.edge_flow.size() != net.edges.size()) return "flow size mismatch";
  std::vector<std::int64_t> balance(net.node_count(), 0);
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const NetEdge& ne = net.edges[e];
    std::int64_t x = f.edge_flow[e];
    if (x < ne.lower || x > ne.upper) return "edge flow outside its range";
    balance[ne.from] -= x;
    balance[ne.to] += x;
  }
  for (int v = 0; v < net.node_count(); ++v) {
    if (v == *net.source || v == *net.sink) continue;
    if (balance[v] != 0) return "conservation violated";
  }
  if (balance[*net.source] != -f.value || balance[*net.sink] != f.value)
    return "flow value inconsistent with terminals";
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    if (net.edges[e].to == *net.source && f.edge_flow[e] != 0)
      return "flow into the source";
    if (net.edges[e].from == *net.sink && f.edge_flow[e] != 0)
      return "flow out of the sink";
  }
  return std::nullopt;
}

namespace flow_detail {

// Residual graph with paired forward/backward arcs; plain BFS augmentation.
struct Residual {
  struct Arc {
    int to;
    std::int64_t cap;
    std::int64_t cost;
    int rev;            // index of the reverse arc in arcs[to]
    int net_edge = -1;  // originating network edge, -1 for synthetic arcs
    bool forward = false;
  };
  std::vector<std::vector<Arc>> arcs;

  explicit Residual(int nodes) : arcs(nodes) {}

  void add(int from, int to, std::int64_t cap, std::int64_t cost,
           int net_edge) {
    arcs[from].push_back({to, cap, cost,
                          static_cast<int>(arcs[to].size()), net_edge, true});
    arcs[to].push_back({from, 0, -cost,
                        static_cast<int>(arcs[from].size()) - 1, net_edge,
                        false});
  }

  // Max-flow from s to t, capped. Edges are explored in insertion order so
  // augmenting paths are reproducible.
  std::int64_t max_flow(int s, int t, std::int64_t cap) {
    std::int64_t total = 0;
    while (total < cap) {
      std::vector<std::pair<int, int>> par(arcs.size(), {-1, -1});
      std::deque<int> q{s};
      par[s] = {s, 0};
      while (!q.empty() && par[t].first == -1) {
        int x = q.front();
        q.pop_front();
        for (int i = 0; i < static_cast<int>(arcs[x].size()); ++i) {
          const Arc& a = arcs[x][i];
          if (a.cap <= 0 || par[a.to].first != -1) continue;
          par[a.to] = {x, i};
          q.push_back(a.to);
        }
      }
      if (par[t].first == -1) break;
      std::int64_t push = cap - total;
      for (int v = t; v != s;) {
        auto [pv, pi] = par[v];
        push = std::min(push, arcs[pv][pi].cap);
        v = pv;
      }
      for (int v = t; v != s;) {
        auto [pv, pi] = par[v];
        Arc& a = arcs[pv][pi];
        a.cap -= push;
        arcs[a.to][a.rev].cap += push;
        v = pv;
      }
      total += push;
    }
    return total;
  }

  // Cheapest augmenting path by Bellman-Ford (costs can be negative on
  // backward arcs); relaxation order is deterministic.
  bool augment_cheapest(int s, int t, std::int64_t* cost_accum) {
    const std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
    std::vector<std::int64_t> dist(arcs.size(), inf);
    std::vector<std::pair<int, int>> par(arcs.size(), {-1, -1});
    dist[s] = 0;
    for (std::size_t round = 0; round < arcs.size(); ++round) {
      bool changed = false;
      for (int x = 0; x < static_cast<int>(arcs.size()); ++x) {
        if (dist[x] == inf) continue;
        for (int i = 0; i < static_cast<int>(arcs[x].size()); ++i) {
          const Arc& a = arcs[x][i];
          if (a.cap <= 0 || dist[x] + a.cost >= dist[a.to]) continue;
          dist[a.to] = dist[x] + a.cost;
          par[a.to] = {x, i};
          changed = true;
        }
      }
      if (!changed) break;
    }
    if (dist[t] == inf) return false;
    std::int64_t push = inf;
    for (int v = t; v != s;) {
      auto [pv, pi] = par[v];
      push = std::min(push, arcs[pv][pi].cap);
      v = pv;
    }
    for (int v = t; v != s;) {
      auto [pv, pi] = par[v];
      Arc& a = arcs[pv][pi];
      a.cap -= push;
      arcs[a.to][a.rev].cap += push;
      v = pv;
    }
    *cost_accum += push * dist[t];
    return true;
  }

  // Net forward flow recovered per network edge.
  std::vector<std::int64_t> extract(std::size_t net_edges) const {
    std::vector<std::int64_t> flow(net_edges, 0);
    for (const auto& node_arcs : arcs)
      for (const Arc& a : node_arcs)
        if (!a.forward && a.net_edge >= 0) flow[a.net_edge] += a.cap;
    return flow;
  }
};

inline std::int64_t remaining_super(const Residual& res, int super_s) {
  std::int64_t rem = 0;
  for (const auto& a : res.arcs[super_s])
    if (a.forward) rem += a.cap;
  return rem;
}

// Shared lower-bound reduction: edge (l, u) becomes capacity u - l plus an
// excess/deficit imbalance routed through super-terminals; the sink-source
// return arc fixes the admissible flow value range.
inline std::optional<Flow> solve_with_lower_bounds(
    const LayeredNetwork& net, std::int64_t value_min, std::int64_t value_max,
    std::optional<CostKind> minimize) {
  if (!net.source || !net.sink)
    throw std::invalid_argument("network lacks a source/sink");
  const int nodes = net.node_count();
  const int super_s = nodes, super_t = nodes + 1;
  Residual res(nodes + 2);
  std::vector<std::int64_t> imbalance(nodes, 0);
  for (int e = 0; e < static_cast<int>(net.edges.size()); ++e) {
    const NetEdge& ne = net.edges[e];
    std::int64_t cost = minimize ? edge_cost(ne, *minimize) : 0;
    res.add(ne.from, ne.to, ne.upper - ne.lower, cost, e);
    imbalance[ne.to] += ne.lower;
    imbalance[ne.from] -= ne.lower;
  }
  // return arc z -> s carrying the overall value
  res.add(*net.sink, *net.source, value_max - value_min, 0, -1);
  imbalance[*net.source] += value_min;
  imbalance[*net.sink] -= value_min;
  std::int64_t need = 0;
  for (int v = 0; v < nodes; ++v) {
    if (imbalance[v] > 0) {
      res.add(super_s, v, imbalance[v], 0, -1);
      need += imbalance[v];
    } else if (imbalance[v] < 0) {
      res.add(v, super_t, -imbalance[v], 0, -1);
    }
  }

  if (!minimize) {
    if (res.max_flow(super_s, super_t, need) != need) return std::nullopt;
  } else {
    // saturate the super arcs along cheapest paths; the result is a
    // minimum-cost feasible flow (no negative cycles: the base network is
    // acyclic with non-negative costs plus one zero-cost return arc)
    std::int64_t cost_accum = 0;
    while (remaining_super(res, super_s) > 0)
      if (!res.augment_cheapest(super_s, super_t, &cost_accum)) break;
    if (remaining_super(res, super_s) != 0) return std::nullopt;
  }

  Flow f;
  f.edge_flow = res.extract(net.edges.size());
  for (std::size_t e = 0; e < net.edges.size(); ++e)
    f.edge_flow[e] += net.edges[e].lower;
  f.value = 0;
  for (std::size_t e = 0; e < net.edges.size(); ++e)
    if (net.edges[e].from == *net.source) f.value += f.edge_flow[e];
  return f;
}

}  // namespace flow_detail

// Feasible integral flow with |f| <= value_cap respecting all ranges, or
// nothing. Classical reduction: excess/deficit super-terminals plus a
// sink-to-source return arc, then one max-flow saturation check.
inline std::optional<Flow> feasible_flow_with_lower_bounds(
    const LayeredNetwork& net, int value_cap) {
  return flow_detail::solve_with_lower_bounds(net, 0, value_cap, std::nullopt);
}

// Minimum-cost integral flow of value exactly `value` respecting all
// ranges, or nothing when no such flow exists. Successive cheapest
// augmentation on the lower-bound reduction.
inline std::optional<Flow> min_cost_flow_fixed_value(const LayeredNetwork& net,
                                                     int value, CostKind kind) {
  return flow_detail::solve_with_lower_bounds(net, value, value, kind);
}

// Splits an integral flow into |f| source-sink paths whose edge multiset is
// exactly the flow. At every node the lowest-index edge with remaining flow
// is taken first.
inline std::vector<std::vector<int>> decompose_paths(const LayeredNetwork& net,
                                                     const Flow& f) {
  if (!net.source || !net.sink)
    throw std::invalid_argument("network lacks a source/sink");
  std::vector<std::int64_t> rem = f.edge_flow;
  const auto out = net.out_edges();
  std::vector<std::vector<int>> paths;
  for (std::int64_t p = 0; p < f.value; ++p) {
    std::vector<int> path;
    int at = *net.source;
    while (at != *net.sink) {
      int chosen = -1;
      for (int e : out[at]) {
        if (rem[e] > 0) {
          chosen = e;
          break;
        }
      }
      if (chosen == -1)
        throw std::logic_error("flow decomposition ran out of edges");
      --rem[chosen];
      path.push_back(chosen);
      at = net.edges[chosen].to;
    }
    paths.push_back(std::move(path));
  }
  for (std::size_t e = 0; e < rem.size(); ++e)
    if (rem[e] != 0)
      throw std::logic_error("flow decomposition left residual flow");
  return paths;
}

}  // namespace tedsc

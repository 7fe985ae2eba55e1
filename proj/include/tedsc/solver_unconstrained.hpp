#pragma once
// Polynomial-time decision and schedule construction for unconstrained
// schedule completion: one feasibility computation on the gap-compressed
// flow network, then path decomposition and constructive gap routing.

#include "tedsc/flow.hpp"

namespace tedsc {

namespace solver_detail {

// A walk skeleton samples positions at retained times: consecutive entries
// differ by one time step (wait or move) or jump across a compressed
// stretch. Jumps are collected per stretch and routed jointly so the routed
// sub-walks stay disjoint; walks that never move are dropped.
inline Schedule expand_skeletons(
    const DirectedGraph& g,
    const std::vector<std::vector<std::pair<Vertex, Time>>>& skeletons,
    RouteStrategy strategy) {
  struct Hop {
    std::size_t walk;
    Vertex from, to;
  };
  std::map<std::pair<Time, Time>, std::vector<Hop>> hops;
  for (std::size_t p = 0; p < skeletons.size(); ++p)
    for (std::size_t i = 0; i + 1 < skeletons[p].size(); ++i)
      if (skeletons[p][i + 1].second > skeletons[p][i].second + 1)
        hops[{skeletons[p][i].second, skeletons[p][i + 1].second}].push_back(
            {p, skeletons[p][i].first, skeletons[p][i + 1].first});

  std::map<std::pair<Time, Time>, std::vector<TemporalWalk>> routed;
  for (auto& [stretch, hh] : hops) {
    bool all_waits = true;
    for (const Hop& h : hh) all_waits &= h.from == h.to;
    std::vector<TemporalWalk> batch;
    if (all_waits) {
      for (const Hop& h : hh) {
        std::vector<std::pair<Vertex, Time>> entries;
        for (Time t = stretch.first; t <= stretch.second; ++t)
          entries.emplace_back(h.from, t);
        batch.emplace_back(std::move(entries));
      }
    } else {
      std::vector<std::pair<Vertex, Vertex>> pairs;
      std::vector<int> slots;
      for (const Hop& h : hh) {
        pairs.emplace_back(h.from, h.to);
        slots.push_back(static_cast<int>(h.walk));
      }
      batch = route_through_gap(g, pairs, stretch, strategy, slots);
    }
    routed[stretch] = std::move(batch);
  }

  Schedule out;
  for (std::size_t p = 0; p < skeletons.size(); ++p) {
    if (skeletons[p].empty()) continue;
    std::vector<std::pair<Vertex, Time>> full;
    for (std::size_t i = 0; i < skeletons[p].size(); ++i) {
      if (i + 1 < skeletons[p].size() &&
          skeletons[p][i + 1].second > skeletons[p][i].second + 1) {
        std::pair<Time, Time> stretch{skeletons[p][i].second,
                                      skeletons[p][i + 1].second};
        const auto& batch = hops[stretch];
        std::size_t at = 0;
        while (batch[at].walk != p) ++at;
        const auto& seg = routed[stretch][at].entries();
        full.insert(full.end(), seg.begin(), seg.end() - 1);
      } else {
        full.push_back(skeletons[p][i]);
      }
    }
    TemporalWalk w = TemporalWalk(std::move(full)).trimmed();
    if (!w.empty()) out.push_back(std::move(w));
  }
  return out;
}

// Turns decomposed source-sink paths into temporal walks; biclique edges
// become jumps in the walk skeletons.
inline Schedule paths_to_schedule(const Instance& inst,
                                  const LayeredNetwork& net,
                                  const std::vector<std::vector<int>>& paths,
                                  RouteStrategy strategy) {
  std::vector<std::vector<std::pair<Vertex, Time>>> skeletons(paths.size());
  for (std::size_t p = 0; p < paths.size(); ++p) {
    for (int ei : paths[p]) {
      const NetEdge& e = net.edges[ei];
      if (e.kind == EdgeKind::Source || e.kind == EdgeKind::Sink) continue;
      Vertex fu = net.slot_of(e.from), tv = net.slot_of(e.to);
      Time ft = net.layer_times[net.layer_of(e.from)];
      Time tt = net.layer_times[net.layer_of(e.to)];
      if (skeletons[p].empty()) skeletons[p].emplace_back(fu, ft);
      skeletons[p].emplace_back(tv, tt);
    }
  }
  return expand_skeletons(inst.graph, skeletons, strategy);
}

}  // namespace solver_detail

struct SolveOptions {
  // Skip witness construction; useful when instances carry huge idle
  // stretches and only the decision matters (a materialized walk is
  // per-time-step, so it would be as long as the stretch).
  bool decision_only = false;
};

// Decides unconstrained schedule completion with one flow computation on the
// compressed network (threshold n + 2k) and reconstructs a schedule via
// two-phase gap routing.
inline Decision solve_tedsc(const Instance& input, const SolveOptions& opts = {}) {
  if (input.constrained())
    throw std::invalid_argument("solve_tedsc handles unconstrained instances");
  PreDecision pre = preprocess(input);
  if (pre.kind == PreDecision::Kind::Infeasible) return Decision::no();
  if (pre.kind == PreDecision::Kind::Feasible) {
    if (opts.decision_only) return Decision::yes_without_witness();
    return Decision::yes(trivial_schedule(input));
  }
  Instance inst = *pre.normalized;
  // more walks than demands never help
  inst.k = std::min<int>(inst.k, static_cast<int>(inst.demands.size()));

  const std::int64_t gamma = inst.graph.vertex_count() + 2 * inst.k;
  auto [net, gaps] = build_expansion(inst, ExpansionMode::SEHat, gamma);
  auto flow = feasible_flow_with_lower_bounds(net, inst.k);
  if (!flow) return Decision::no();
  if (opts.decision_only) return Decision::yes_without_witness();

  auto paths = decompose_paths(net, *flow);
  Schedule sched = solver_detail::paths_to_schedule(inst, net, paths,
                                                    RouteStrategy::TwoPhase);
  shift_schedule(sched, inst.time_shift - input.time_shift);
  ValidationReport rep = validate_schedule(input, sched);
  if (!rep.ok())
    throw std::logic_error("flow solver produced an invalid schedule: " +
                           rep.first_failure());
  return Decision::yes(std::move(sched));
}

}  // namespace tedsc

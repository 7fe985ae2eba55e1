#pragma once
// Approximation of the minimum number of walks for the constrained
// variants. For ascending k, a minimum-cost flow of value k is computed on
// the compressed network with costs that add up to walk lifespans/lengths;
// once the cost fits within k * h, the flow paths are expanded through the
// gaps and split greedily into segments of cost at most h. The result has
// at most 2k* - ceil(k*/h) <= (2 - 1/h) * OPT walks.

#include "tedsc/solver_unconstrained.hpp"

namespace tedsc {

// Greedy maximal-prefix split of a walk into cost-at-most-h pieces. Under
// the lifespan cost every unit step costs one, so all pieces except the
// last cost exactly h; under the length cost waits are free and stick to
// the piece in front of them. A piece starts on the time-vertex where its
// predecessor ends; zero-cost (all-wait) remainders are dropped.
inline std::vector<TemporalWalk> segment_path(const TemporalWalk& walk, Time h,
                                              CostKind kind) {
  std::vector<TemporalWalk> out;
  const auto& e = walk.entries();
  if (e.empty()) return out;
  std::size_t start = 0;
  while (start + 1 < e.size()) {
    Time cost = 0;
    std::size_t end = start;
    bool any_move = false;
    while (end + 1 < e.size()) {
      Time step_cost = kind == CostKind::Tau
                           ? 1
                           : (e[end].first != e[end + 1].first ? 1 : 0);
      if (cost + step_cost > h) break;
      cost += step_cost;
      any_move |= e[end].first != e[end + 1].first;
      ++end;
    }
    if (end == start) break;  // a single step exceeds h (h = 0)
    if (any_move)
      out.push_back(TemporalWalk(std::vector<std::pair<Vertex, Time>>(
          e.begin() + static_cast<std::ptrdiff_t>(start),
          e.begin() + static_cast<std::ptrdiff_t>(end) + 1)));
    start = end;
  }
  return out;
}

struct ApproxResult {
  Schedule schedule;
  int k_star = 0;            // value of the accepted flow
  std::int64_t flow_cost = 0;
  int big_segments = 0;      // segments of cost exactly h
  int little_segments = 0;   // segments of cost below h
  struct Probe {
    int k;
    bool feasible;
    std::int64_t cost;  // min cost at value k (when feasible)
    bool rejected;      // feasible but cost > k * h
  };
  std::vector<Probe> trace;

  // |S| <= 2k - ceil(k/h) walks
  std::int64_t size_bound(Time h) const {
    return 2 * static_cast<std::int64_t>(k_star) -
           (static_cast<std::int64_t>(k_star) + h - 1) / h;
  }
};

// Builds a schedule covering all demands with |S| <= (2 - 1/h) * OPT walks.
// Always succeeds: at k = |D| one walk per demand fits the budget.
inline ApproxResult approx_min_walks(const DirectedGraph& graph,
                                     const std::vector<Demand>& demands,
                                     Time h, Variant variant) {
  if (variant == Variant::Unconstrained)
    throw std::invalid_argument("approximation needs a constrained variant");
  if (h < 1) throw std::invalid_argument("approximation requires h >= 1");
  const CostKind kind =
      variant == Variant::Lifespan ? CostKind::Tau : CostKind::Ell;

  ApproxResult res;
  if (demands.empty()) return res;

  Instance raw = make_instance(graph, demands, 0, h, variant);
  // normalize times; the final schedule is shifted back
  Time shift = 0;
  {
    Time min_t = raw.demands.front().t;
    for (const Demand& d : raw.demands) min_t = std::min(min_t, d.t);
    shift = min_t - 1;
    if (shift != 0)
      for (Demand& d : raw.demands) d.t -= shift;
  }
  const int n = graph.vertex_count();

  for (int k = 0; k <= static_cast<int>(raw.demands.size()); ++k) {
    Instance inst = raw;
    inst.k = k;
    std::int64_t gamma =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(n - 1) * k);
    ExpansionOptions opts;
    opts.attach_all_layers = true;  // so path costs equal walk measures
    auto [net, gaps] = build_expansion(inst, ExpansionMode::SEHat, gamma, opts);
    if (!feasible_flow_with_lower_bounds(net, k).has_value()) {
      res.trace.push_back({k, false, 0, false});
      continue;
    }
    auto flow = min_cost_flow_fixed_value(net, k, kind);
    if (!flow)
      throw std::logic_error("feasible network lost its fixed-value flow");
    std::int64_t cost = flow_cost(net, *flow, kind);
    if (cost > static_cast<std::int64_t>(k) * h) {
      res.trace.push_back({k, true, cost, true});
      continue;
    }
    res.trace.push_back({k, true, cost, false});
    res.k_star = k;
    res.flow_cost = cost;

    auto paths = decompose_paths(net, *flow);
    Schedule expanded = solver_detail::paths_to_schedule(
        inst, net, paths, RouteStrategy::Sequential);
    for (const TemporalWalk& q : expanded) {
      for (TemporalWalk& seg : segment_path(q, h, kind)) {
        Time c = kind == CostKind::Tau ? seg.lifespan() : seg.length();
        if (c == h)
          ++res.big_segments;
        else
          ++res.little_segments;
        res.schedule.push_back(std::move(seg));
      }
    }
    shift_schedule(res.schedule, shift);
    Instance check = make_instance(
        graph, demands, static_cast<int>(res.schedule.size()), h, variant);
    ValidationReport rep = validate_schedule(check, res.schedule);
    if (!rep.ok())
      throw std::logic_error("approximation produced an invalid schedule: " +
                             rep.first_failure());
    return res;
  }
  throw std::logic_error("one walk per demand must satisfy the cost test");
}

}  // namespace tedsc

#pragma once
// Exhaustive ground-truth decision for tiny instances, plus exact walk-count
// minimization. Deliberately independent of the real solvers: a plain
// depth-first search over joint walk configurations, one time step at a
// time, with memoized dead states.
//
// Schedules are searched in canonical form: a walk starts by covering its
// first demand and ends at its last move. Dropping a walk's moves before its
// first covered demand (or the whole walk, if it covers nothing) never
// invalidates a schedule, so the restriction loses no decisions.

#include <map>
#include <set>
#include <tuple>

#include "tedsc/core.hpp"

namespace tedsc {

struct OracleCaps {
  int max_n = 4;
  Time max_lambda = 10;
  int max_demands = 5;
  int max_k = 4;
};

namespace oracle_detail {

struct WalkState {
  Vertex pos;
  Time aux;  // lifespan variant: start time; length variant: moves used
  friend auto operator<=>(const WalkState&, const WalkState&) = default;
};

struct Searcher {
  const Instance& inst;
  Time lambda;
  std::vector<std::vector<Demand>> demands_at;  // by time step
  std::set<std::tuple<Time, int, std::vector<WalkState>>> dead;

  struct Live {
    WalkState st;
    std::vector<std::pair<Vertex, Time>> entries;
  };
  std::vector<Live> live;
  int unused = 0;
  Schedule witness;

  explicit Searcher(const Instance& i) : inst(i), lambda(i.lifetime()) {
    demands_at.assign(static_cast<std::size_t>(lambda) + 1, {});
    for (const Demand& d : inst.demands)
      demands_at[static_cast<std::size_t>(d.t)].push_back(d);
    // Every canonical walk covers at least one demand, so more than |D|
    // walks never help.
    unused = std::min<int>(inst.k, static_cast<int>(inst.demands.size()));
  }

  bool may_move(const WalkState& st, Time t) const {
    if (inst.variant == Variant::Lifespan) return t + 1 - st.aux <= *inst.h;
    if (inst.variant == Variant::Length) return st.aux + 1 <= *inst.h;
    return true;
  }

  bool may_spawn(Time) const {
    if (!inst.constrained()) return true;
    return *inst.h >= 1;  // the spawning move itself
  }

  std::vector<WalkState> canonical_states() const {
    std::vector<WalkState> v;
    v.reserve(live.size());
    for (const Live& w : live) v.push_back(w.st);
    std::sort(v.begin(), v.end());
    return v;
  }

  bool run() { return step(1); }

  bool step(Time t) {
    if (t > lambda) {
      witness.clear();
      for (const Live& w : live) {
        TemporalWalk tw = TemporalWalk(w.entries).trimmed();
        if (!tw.empty()) witness.push_back(std::move(tw));
      }
      return true;
    }
    auto key = std::make_tuple(t, unused, canonical_states());
    if (dead.count(key)) return false;
    std::set<Demand> used;
    if (assign_demands(t, 0, used)) return true;
    dead.insert(std::move(key));
    return false;
  }

  // Every demand at time t must be taken by a distinct mover: a live walk
  // sitting on the tail, or a fresh walk spawned there.
  bool assign_demands(Time t, std::size_t di, std::set<Demand>& used) {
    const auto& dd = demands_at[static_cast<std::size_t>(t)];
    if (di == dd.size()) return free_moves(t, 0, used);
    const Demand& d = dd[di];
    std::vector<WalkState> tried;  // equal-state walks are interchangeable
    // deeper recursion may spawn walks and reallocate `live`: index, don't
    // hold references across the recursive call
    for (std::size_t i = 0; i < live.size(); ++i) {
      if (live[i].st.pos != d.u) continue;
      if (live[i].entries.back().second == t + 1) continue;  // acted this step
      if (!may_move(live[i].st, t)) continue;
      if (std::find(tried.begin(), tried.end(), live[i].st) != tried.end())
        continue;
      tried.push_back(live[i].st);
      WalkState saved = live[i].st;
      live[i].st.pos = d.v;
      if (inst.variant == Variant::Length) ++live[i].st.aux;
      live[i].entries.emplace_back(d.v, t + 1);
      used.insert(d);
      if (assign_demands(t, di + 1, used)) return true;
      used.erase(d);
      live[i].entries.pop_back();
      live[i].st = saved;
    }
    if (unused > 0 && may_spawn(t)) {
      --unused;
      live.push_back({{d.v, inst.variant == Variant::Length ? Time{1} : t},
                      {{d.u, t}, {d.v, t + 1}}});
      used.insert(d);
      if (assign_demands(t, di + 1, used)) return true;
      used.erase(d);
      live.pop_back();
      ++unused;
    }
    return false;
  }

  // Remaining walks wait or reposition along still-free temporal edges.
  bool free_moves(Time t, std::size_t wi, std::set<Demand>& used) {
    if (wi == live.size()) return step(t + 1);
    if (live[wi].entries.back().second == t + 1)
      return free_moves(t, wi + 1, used);
    live[wi].entries.emplace_back(live[wi].st.pos, t + 1);  // wait
    if (free_moves(t, wi + 1, used)) return true;
    live[wi].entries.pop_back();
    if (may_move(live[wi].st, t)) {
      Vertex from = live[wi].st.pos;
      for (Vertex y : inst.graph.out_neighbors(from)) {
        Demand te{from, y, t};
        if (used.count(te)) continue;
        WalkState saved = live[wi].st;
        live[wi].st.pos = y;
        if (inst.variant == Variant::Length) ++live[wi].st.aux;
        live[wi].entries.emplace_back(y, t + 1);
        used.insert(te);
        if (free_moves(t, wi + 1, used)) return true;
        used.erase(te);
        live[wi].entries.pop_back();
        live[wi].st = saved;
      }
    }
    return false;
  }
};

}  // namespace oracle_detail

// Decision by exhaustive search. Refuses (Unknown) beyond the caps. The
// effective number of walks is min(k, |D|), so min_walks stays total for
// any |D| within the demand cap.
inline Decision oracle_decide(const Instance& raw, OracleCaps caps = {}) {
  Instance inst = raw;
  Time local_shift = 0;
  if (!inst.demands.empty()) {
    Time min_t = inst.demands.front().t;
    for (const Demand& d : inst.demands) min_t = std::min(min_t, d.t);
    if (min_t != 1) {
      for (Demand& d : inst.demands) d.t -= min_t - 1;
      local_shift = min_t - 1;
    }
  }
  int k_eff = std::min<int>(inst.k, static_cast<int>(inst.demands.size()));
  if (inst.graph.vertex_count() > caps.max_n ||
      inst.lifetime() > caps.max_lambda ||
      static_cast<int>(inst.demands.size()) > caps.max_demands ||
      k_eff > std::max(caps.max_k, caps.max_demands)) {
    return Decision::unknown("instance exceeds oracle caps");
  }
  if (inst.demands.empty()) return Decision::yes(Schedule{});

  oracle_detail::Searcher s(inst);
  if (!s.run()) return Decision::no();
  shift_schedule(s.witness, local_shift);
  ValidationReport rep = validate_schedule(raw, s.witness);
  if (!rep.ok())
    throw std::logic_error("oracle produced invalid schedule: " +
                           rep.first_failure());
  return Decision::yes(std::move(s.witness));
}

// Smallest k for which the exhaustive search says yes. Empty on refusal.
inline std::optional<int> oracle_min_walks(const DirectedGraph& graph,
                                           const std::vector<Demand>& demands,
                                           std::optional<Time> h, Variant variant,
                                           OracleCaps caps = {}) {
  for (int k = 0; k <= static_cast<int>(demands.size()); ++k) {
    Instance inst = make_instance(graph, demands, k, h, variant);
    Decision d = oracle_decide(inst, caps);
    if (d.kind == Decision::Kind::Unknown) return std::nullopt;
    if (d.kind == Decision::Kind::Yes) return k;
  }
  throw std::logic_error("one walk per demand must be feasible");
}

}  // namespace tedsc

#pragma once
// Exact solvers for the constrained variants:
//  - solve_fpt_kh: demand-to-walk assignment enumeration with bounded
//    edge-disjoint routing between consecutive demands (parameter k + h),
//  - solve_xp_k: forward search over the compressed state graph
//    (parameter k),
//  - solve_star_fpt: the state search restricted to bidirected stars with a
//    cap on simultaneously leaf-bound walks, plus the schedule normalizer
//    that bounds consecutive waits on leaves.

#include <cmath>

#include "tedsc/bounded_edp.hpp"
#include "tedsc/solver_unconstrained.hpp"

namespace tedsc {

struct ConstrainedOptions {
  std::int64_t budget = 80'000'000;  // search node budget; exceeded -> Unknown
  bool compress = true;              // state-graph time compression
};

// Size of the assignment space behind solve_fpt_kh for the length variant:
// k^|D| demand-to-walk maps times (h+1)^|D| remaining-budget maps.
inline double assignment_space_bound(int k, Time h, std::size_t demands) {
  return std::pow(static_cast<double>(k), static_cast<double>(demands)) *
         std::pow(static_cast<double>(h) + 1.0, static_cast<double>(demands));
}

namespace constrained_detail {

// Retained time steps as a flat grid; consecutive retained times either
// differ by one (explicit step) or jump a compressed stretch.
struct TimeGrid {
  std::vector<Time> times;

  int index_of(Time t) const {
    auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.end() || *it != t) return -1;
    return static_cast<int>(it - times.begin());
  }
};

inline TimeGrid make_grid(const Instance& inst, std::int64_t gamma,
                          Time window) {
  auto [times, bridges] = expansion_detail::retained_times(inst, gamma, window);
  if (!inst.demands.empty()) times.push_back(inst.lifetime() + 1);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  (void)bridges;
  return {std::move(times)};
}

// ---------------------------------------------------------------------------
// solve_fpt_kh

// Joint backtracking over demand-to-walk assignments and the edge-disjoint
// routing of each walk between its consecutive demands. Equivalent to
// enumerating assignments outright and solving one bounded edge-disjoint
// path instance per surviving assignment, but routing conflicts prune
// shared assignment prefixes immediately, which is what makes exhausting
// no-instances tractable.
struct FptSearch {
  const Instance& inst;
  const std::vector<std::vector<int>>& dist;
  TimeGrid grid;
  Time h;
  int k;
  std::int64_t budget;
  bool out_of_budget = false;

  std::set<Demand> used;  // occupied temporal edges, seeded with all demands
  static constexpr Time kNoCap = std::numeric_limits<Time>::max() / 2;

  struct Walk {
    Vertex pos;
    Time at;        // time of the position (arrival after the last demand)
    Time first_t;   // time of the first covered demand
    Time used_len;  // moves so far, demands included (length variant)
    Time last_t;    // time of the last covered demand
    std::vector<std::pair<Vertex, Time>> skeleton;
  };
  std::vector<Walk> walks;

  FptSearch(const Instance& i, const std::vector<std::vector<int>>& d,
            std::int64_t b)
      : inst(i), dist(d), h(*i.h), k(i.k), budget(b) {
    std::int64_t gamma = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(i.graph.vertex_count() - 1) * std::max(k, 1));
    grid = make_grid(i, gamma, 1);
    for (const Demand& dm : i.demands) used.insert(dm);
  }

  bool charge() {
    if (budget-- <= 0) out_of_budget = true;
    return !out_of_budget;
  }

  // Every demand still ahead costs at least one unit of some walk's
  // remaining budget: moves for the length variant, steps of the lifespan
  // window otherwise. Sections additionally burn length capacity move by
  // move, so tight instances leave no room to wander.
  std::int64_t spare_capacity() const {
    std::int64_t spare =
        static_cast<std::int64_t>(k - static_cast<int>(walks.size())) * h;
    for (const Walk& w : walks)
      spare += inst.variant == Variant::Length
                   ? h - w.used_len
                   : h - (w.last_t + 1 - w.first_t);
    return spare;
  }

  bool run() { return assign(0); }

  bool assign(std::size_t di) {
    if (di == inst.demands.size()) return true;
    if (!charge()) return false;
    const Demand& d = inst.demands[di];
    std::int64_t slack = spare_capacity() -
                         static_cast<std::int64_t>(inst.demands.size() - di);
    if (slack < 0) return false;
    // candidates in exactly the same state are interchangeable
    std::vector<std::size_t> candidates;
    std::map<std::tuple<Vertex, Time, Time, Time>, std::size_t> best;
    for (std::size_t wi = 0; wi < walks.size(); ++wi) {
      // guards: one demand per time step, lifespan window, reachability in
      // the remaining time, length budget
      if (walks[wi].last_t >= d.t) continue;
      if (inst.variant == Variant::Lifespan &&
          d.t + 1 - walks[wi].first_t > h)
        continue;
      int reach = dist[walks[wi].pos][d.u];
      if (reach == kUnreachable || d.t - walks[wi].at < reach) continue;
      if (inst.variant == Variant::Length &&
          walks[wi].used_len + reach + 1 > h)
        continue;
      auto key = std::make_tuple(walks[wi].pos, walks[wi].first_t,
                                 walks[wi].used_len, walks[wi].at);
      best.try_emplace(key, wi);
    }
    for (auto& [key, wi] : best) candidates.push_back(wi);
    std::sort(candidates.begin(), candidates.end());
    for (std::size_t wi : candidates) {
      Time move_cap = inst.variant == Variant::Length
                          ? h - walks[wi].used_len - 1
                          : kNoCap;
      std::vector<std::pair<Vertex, Time>> section{
          {walks[wi].pos, walks[wi].at}};
      if (route_section(di, wi, d, move_cap,
                        inst.variant == Variant::Length ? slack : kNoCap,
                        section))
        return true;
      if (out_of_budget) return false;
    }
    if (static_cast<int>(walks.size()) < k && h >= 1) {
      walks.push_back(
          {d.v, d.t + 1, d.t, 1, d.t, {{d.u, d.t}, {d.v, d.t + 1}}});
      if (assign(di + 1)) return true;
      walks.pop_back();
      if (out_of_budget) return false;
    }
    return false;
  }

  // Extends walk wi from the tip of `section` toward demand d's tail at
  // time d.t over the retained grid; on arrival commits the demand move and
  // recurses into the next demand.
  bool route_section(std::size_t di, std::size_t wi, const Demand& d,
                     Time move_cap, std::int64_t slack,
                     std::vector<std::pair<Vertex, Time>>& section) {
    if (!charge()) return false;
    auto [x, t] = section.back();
    if (t == d.t) {
      if (x != d.u) return false;
      Walk saved = walks[wi];
      Time moves = 0;
      for (std::size_t i = 0; i + 1 < section.size(); ++i) {
        if (section[i + 1].second == section[i].second + 1)
          moves += section[i + 1].first != section[i].first;
        else
          moves += dist[section[i].first][section[i + 1].first];
      }
      walks[wi].pos = d.v;
      walks[wi].at = d.t + 1;
      walks[wi].used_len = saved.used_len + moves + 1;
      walks[wi].last_t = d.t;
      walks[wi].skeleton.insert(walks[wi].skeleton.end(), section.begin() + 1,
                                section.end());
      walks[wi].skeleton.emplace_back(d.v, d.t + 1);
      if (assign(di + 1)) return true;
      walks[wi] = std::move(saved);
      return false;
    }
    int gi = grid.index_of(t);
    if (gi < 0) throw std::logic_error("section left the retained time grid");
    Time tn = grid.times[static_cast<std::size_t>(gi) + 1];
    if (tn == t + 1) {
      if (dist[x][d.u] != kUnreachable && dist[x][d.u] <= d.t - tn) {
        section.emplace_back(x, tn);  // wait
        if (route_section(di, wi, d, move_cap, slack, section)) return true;
        section.pop_back();
        if (out_of_budget) return false;
      }
      if (move_cap >= 1 && slack >= 1) {
        for (Vertex y : inst.graph.out_neighbors(x)) {
          if (dist[y][d.u] == kUnreachable || dist[y][d.u] > d.t - tn) continue;
          if (inst.variant == Variant::Length &&
              (1 + dist[y][d.u] > move_cap || 1 + dist[y][d.u] > slack))
            continue;
          Demand te{x, y, t};
          if (used.count(te)) continue;
          used.insert(te);
          section.emplace_back(y, tn);
          if (route_section(di, wi, d, move_cap - 1, slack - 1, section))
            return true;
          section.pop_back();
          used.erase(te);
          if (out_of_budget) return false;
        }
      }
    } else {
      // jump a compressed stretch: land anywhere reachable, paying the
      // shortest-path distance; realized constructively afterwards
      for (Vertex y = 0; y < inst.graph.vertex_count(); ++y) {
        int hop = dist[x][y];
        if (hop == kUnreachable || hop > move_cap || hop > slack) continue;
        if (dist[y][d.u] == kUnreachable || dist[y][d.u] > d.t - tn) continue;
        if (inst.variant == Variant::Length &&
            hop + dist[y][d.u] > move_cap)
          continue;
        section.emplace_back(y, tn);
        if (route_section(di, wi, d, move_cap - hop, slack - hop, section))
          return true;
        section.pop_back();
        if (out_of_budget) return false;
      }
    }
    return false;
  }

  Schedule reconstruct() const {
    std::vector<std::vector<std::pair<Vertex, Time>>> skeletons;
    for (const Walk& w : walks) skeletons.push_back(w.skeleton);
    return solver_detail::expand_skeletons(inst.graph, skeletons,
                                           RouteStrategy::Sequential);
  }
};

// ---------------------------------------------------------------------------
// solve_xp_k and the star restriction

struct StateSearch {
  const Instance& inst;
  Time h;
  int k;
  std::int64_t budget;
  int leaf_cap = -1;   // star restriction: max active walks on leaves
  Vertex center = -1;  // star center (used with leaf_cap >= 0)

  TimeGrid grid;
  std::vector<std::vector<Demand>> demands_at;  // per grid index
  std::set<Demand> demand_set;

  using Profile = std::vector<std::pair<Vertex, Time>>;  // sorted (pos, cap)
  struct StateKey {
    int ti;
    int unused;
    Profile active;
    friend auto operator<=>(const StateKey&, const StateKey&) = default;
  };
  struct Action {
    enum Kind { Wait, Move, Finish, Spawn } kind = Wait;
    Vertex from = -1, to = -1;
  };
  struct Stored {
    int parent;
    // one action per parent profile slot, then one Spawn per fresh walk
    std::vector<Action> actions;
  };
  std::vector<StateKey> states;
  std::vector<Stored> back;
  std::map<StateKey, int> seen;
  bool out_of_budget = false;
  int goal = -1;

  StateSearch(const Instance& i, std::int64_t b, bool compress)
      : inst(i), h(*i.h),
        k(std::min<int>(i.k, static_cast<int>(i.demands.size()))),
        budget(std::min<std::int64_t>(b, 5'000'000)) {  // states are stored
    if (compress) {
      std::int64_t gamma = std::max<std::int64_t>(
          1, static_cast<std::int64_t>(i.graph.vertex_count()) * std::max(k, 1));
      grid = make_grid(i, gamma, static_cast<Time>(gamma));
    } else {
      for (Time t = 1; t <= i.lifetime() + 1; ++t) grid.times.push_back(t);
    }
    demands_at.assign(grid.times.size(), {});
    for (const Demand& dm : i.demands) {
      demands_at[static_cast<std::size_t>(grid.index_of(dm.t))].push_back(dm);
      demand_set.insert(dm);
    }
  }

  bool leaf_ok(const Profile& prof) const {
    if (leaf_cap < 0) return true;
    int on_leaves = 0;
    for (const auto& [pos, cap] : prof) on_leaves += pos != center;
    return on_leaves <= leaf_cap;
  }

  void push_state(StateKey key, int parent, std::vector<Action> actions) {
    auto [it, fresh] = seen.try_emplace(std::move(key), -1);
    if (!fresh) return;
    it->second = static_cast<int>(states.size());
    states.push_back(it->first);
    back.push_back({parent, std::move(actions)});
    if (it->first.ti + 1 == static_cast<int>(grid.times.size()))
      goal = it->second;
  }

  bool run() {
    if (grid.times.size() == 1) return true;  // no demands
    push_state({0, k, {}}, -1, {});
    for (std::size_t qi = 0; qi < states.size(); ++qi) {
      if (goal >= 0) return true;
      if (static_cast<std::int64_t>(states.size()) > budget) {
        out_of_budget = true;
        return false;
      }
      expand(static_cast<int>(qi));
      if (goal >= 0) return true;
      if (out_of_budget) return false;
    }
    return goal >= 0;
  }

  void expand(int si) {
    const StateKey st = states[static_cast<std::size_t>(si)];
    if (st.ti + 1 >= static_cast<int>(grid.times.size())) return;
    Time t = grid.times[static_cast<std::size_t>(st.ti)];
    Time tn = grid.times[static_cast<std::size_t>(st.ti) + 1];
    Time delta = tn - t;

    if (delta > 1) {
      // frozen jump: positions stay, lifespan capacities pay the elapsed
      // time, walks that cannot pay retire
      Profile next;
      std::vector<Action> acts;
      for (const auto& [pos, cap] : st.active) {
        if (inst.variant == Variant::Lifespan && cap < delta) {
          acts.push_back({Action::Finish, pos, pos});
        } else {
          next.emplace_back(pos, inst.variant == Variant::Lifespan
                                     ? cap - delta
                                     : cap);
          acts.push_back({Action::Wait, pos, pos});
        }
      }
      std::sort(next.begin(), next.end());
      StateKey key{st.ti + 1, st.unused, std::move(next)};
      if (leaf_ok(key.active)) push_state(std::move(key), si, std::move(acts));
      return;
    }

    std::vector<Action> acts(st.active.size());
    for (std::size_t wi = 0; wi < st.active.size(); ++wi)
      acts[wi] = {Action::Wait, st.active[wi].first, st.active[wi].first};
    std::vector<Action> spawns;
    std::vector<char> acted(st.active.size(), 0);
    std::set<Demand> moves;
    joint(si, st, 0, acted, acts, spawns, moves, st.unused);
  }

  // assign the demands at this step to movers, then branch on everyone else
  void joint(int si, const StateKey& st, std::size_t di,
             std::vector<char>& acted, std::vector<Action>& acts,
             std::vector<Action>& spawns, std::set<Demand>& moves,
             int unused) {
    if (goal >= 0 || out_of_budget) return;
    if (static_cast<std::int64_t>(states.size()) > budget) {
      out_of_budget = true;
      return;
    }
    const auto& dd = demands_at[static_cast<std::size_t>(st.ti)];
    if (di == dd.size()) {
      free_moves(si, st, 0, acted, acts, spawns, moves, unused);
      return;
    }
    const Demand& d = dd[di];
    std::set<std::pair<Vertex, Time>> tried;
    for (std::size_t wi = 0; wi < st.active.size(); ++wi) {
      if (acted[wi]) continue;
      auto [pos, cap] = st.active[wi];
      if (pos != d.u || cap < 1) continue;
      if (!tried.insert({pos, cap}).second) continue;
      acted[wi] = 1;
      acts[wi] = {Action::Move, d.u, d.v};
      joint(si, st, di + 1, acted, acts, spawns, moves, unused);
      acts[wi] = {Action::Wait, pos, pos};
      acted[wi] = 0;
    }
    if (unused > 0 && h >= 1) {
      spawns.push_back({Action::Spawn, d.u, d.v});
      joint(si, st, di + 1, acted, acts, spawns, moves, unused - 1);
      spawns.pop_back();
    }
  }

  void free_moves(int si, const StateKey& st, std::size_t wi,
                  std::vector<char>& acted, std::vector<Action>& acts,
                  std::vector<Action>& spawns, std::set<Demand>& moves,
                  int unused) {
    if (goal >= 0 || out_of_budget) return;
    if (wi == st.active.size()) {
      commit(si, st, acts, spawns, unused);
      return;
    }
    if (acted[wi]) {
      free_moves(si, st, wi + 1, acted, acts, spawns, moves, unused);
      return;
    }
    auto [pos, cap] = st.active[wi];
    Time t = grid.times[static_cast<std::size_t>(st.ti)];
    bool can_stay = inst.variant != Variant::Lifespan || cap >= 1;
    if (can_stay) {
      acts[wi] = {Action::Wait, pos, pos};
      free_moves(si, st, wi + 1, acted, acts, spawns, moves, unused);
    }
    if (!can_stay || (leaf_cap >= 0 && pos != center)) {
      // retiring is forced once the lifespan budget is spent; under the
      // leaf cap it is also a real choice, since a lingering walk keeps
      // occupying its leaf
      acts[wi] = {Action::Finish, pos, pos};
      free_moves(si, st, wi + 1, acted, acts, spawns, moves, unused);
    }
    if (cap >= 1) {
      for (Vertex y : inst.graph.out_neighbors(pos)) {
        Demand te{pos, y, t};
        if (moves.count(te) || demand_set.count(te)) continue;
        moves.insert(te);
        acts[wi] = {Action::Move, pos, y};
        free_moves(si, st, wi + 1, acted, acts, spawns, moves, unused);
        moves.erase(te);
      }
    }
    acts[wi] = {Action::Wait, pos, pos};
  }

  void commit(int si, const StateKey& st, const std::vector<Action>& acts,
              const std::vector<Action>& spawns, int unused) {
    Profile next;
    for (std::size_t wi = 0; wi < st.active.size(); ++wi) {
      auto [pos, cap] = st.active[wi];
      switch (acts[wi].kind) {
        case Action::Wait:
          next.emplace_back(
              pos, inst.variant == Variant::Lifespan ? cap - 1 : cap);
          break;
        case Action::Move:
          next.emplace_back(acts[wi].to, cap - 1);
          break;
        case Action::Finish:
          break;
        case Action::Spawn:
          throw std::logic_error("spawn recorded on a walk slot");
      }
    }
    for (const Action& sp : spawns) next.emplace_back(sp.to, h - 1);
    for (const auto& [pos, cap] : next)
      if (cap < 0) return;
    std::sort(next.begin(), next.end());
    StateKey key{st.ti + 1, unused, std::move(next)};
    if (!leaf_ok(key.active)) return;
    std::vector<Action> record = acts;
    record.insert(record.end(), spawns.begin(), spawns.end());
    push_state(std::move(key), si, std::move(record));
  }

  // The demand moves of every transition along the winning chain replayed
  // into walk skeletons; walk identities follow the sorted profile slots.
  Schedule reconstruct() const {
    std::vector<int> chain;
    for (int s = goal; s >= 0; s = back[static_cast<std::size_t>(s)].parent)
      chain.push_back(s);
    std::reverse(chain.begin(), chain.end());

    std::vector<std::vector<std::pair<Vertex, Time>>> skeletons;
    std::vector<int> slot_to_walk;
    for (std::size_t ci = 1; ci < chain.size(); ++ci) {
      const StateKey& prev = states[static_cast<std::size_t>(chain[ci - 1])];
      const Stored& rec = back[static_cast<std::size_t>(chain[ci])];
      Time t = grid.times[static_cast<std::size_t>(prev.ti)];
      Time tn = grid.times[static_cast<std::size_t>(prev.ti) + 1];
      std::vector<std::pair<std::pair<Vertex, Time>, int>> next_slots;
      for (std::size_t wi = 0; wi < prev.active.size(); ++wi) {
        int w = slot_to_walk[wi];
        auto [pos, cap] = prev.active[wi];
        const Action& a = rec.actions[wi];
        if (a.kind == Action::Finish) continue;
        Vertex to = a.kind == Action::Move ? a.to : pos;
        Time ncap = a.kind == Action::Move
                        ? cap - 1
                        : (inst.variant == Variant::Lifespan ? cap - (tn - t)
                                                             : cap);
        skeletons[static_cast<std::size_t>(w)].emplace_back(to, tn);
        next_slots.push_back({{to, ncap}, w});
      }
      for (std::size_t ai = prev.active.size(); ai < rec.actions.size(); ++ai) {
        const Action& a = rec.actions[ai];
        skeletons.push_back({{a.from, t}, {a.to, tn}});
        next_slots.push_back(
            {{a.to, h - 1}, static_cast<int>(skeletons.size()) - 1});
      }
      std::stable_sort(
          next_slots.begin(), next_slots.end(),
          [](const auto& a, const auto& b) { return a.first < b.first; });
      slot_to_walk.clear();
      for (auto& [pc, w] : next_slots) slot_to_walk.push_back(w);
    }
    return solver_detail::expand_skeletons(inst.graph, skeletons,
                                           RouteStrategy::Sequential);
  }
};

}  // namespace constrained_detail

namespace constrained_detail {

// A slack length bound was dropped during preprocessing: solve the
// unconstrained twin, then shortcut demand-free cycles so the witness also
// meets the original bound (every walk then makes at most n * |D| <= h
// moves).
inline Decision solve_slack_length(const Instance& input) {
  Instance twin = input;
  twin.variant = Variant::Unconstrained;
  twin.h.reset();
  Decision d = solve_tedsc(twin);
  if (d.kind != Decision::Kind::Yes || !d.schedule) return d;
  Schedule sched = shortcut_cycles(input, *d.schedule);
  ValidationReport rep = validate_schedule(input, sched);
  if (!rep.ok())
    throw std::logic_error("slack-bound rewrite produced an invalid schedule: " +
                           rep.first_failure());
  return Decision::yes(std::move(sched));
}

}  // namespace constrained_detail

// Decides a constrained instance by enumerating which walk covers which
// demand, rejecting assignments that break the lifespan window or length
// budget, and routing the stretches between consecutive demands of each
// walk edge disjointly.
inline Decision solve_fpt_kh(const Instance& input,
                             const ConstrainedOptions& opts = {}) {
  if (!input.constrained())
    throw std::invalid_argument("solve_fpt_kh handles constrained instances");
  PreDecision pre = preprocess(input);
  if (pre.kind == PreDecision::Kind::Infeasible) return Decision::no();
  if (pre.kind == PreDecision::Kind::Feasible)
    return Decision::yes(trivial_schedule(input));
  Instance inst = *pre.normalized;
  if (!inst.constrained())
    return constrained_detail::solve_slack_length(input);
  auto dist = inst.graph.all_pairs_distances();
  constrained_detail::FptSearch search(inst, dist, opts.budget);
  bool found = search.run();
  if (search.out_of_budget) return Decision::unknown("search budget exhausted");
  if (!found) return Decision::no();
  Schedule sched = search.reconstruct();
  shift_schedule(sched, inst.time_shift - input.time_shift);
  ValidationReport rep = validate_schedule(input, sched);
  if (!rep.ok())
    throw std::logic_error("assignment solver produced an invalid schedule: " +
                           rep.first_failure());
  return Decision::yes(std::move(sched));
}

// Decides a constrained instance by forward search over states
// (time, unused walks, active walk positions and remaining capacities).
inline Decision solve_xp_k(const Instance& input,
                           const ConstrainedOptions& opts = {}) {
  if (!input.constrained())
    throw std::invalid_argument("solve_xp_k handles constrained instances");
  PreDecision pre = preprocess(input);
  if (pre.kind == PreDecision::Kind::Infeasible) return Decision::no();
  if (pre.kind == PreDecision::Kind::Feasible)
    return Decision::yes(trivial_schedule(input));
  Instance inst = *pre.normalized;
  if (!inst.constrained())
    return constrained_detail::solve_slack_length(input);
  constrained_detail::StateSearch search(inst, opts.budget, opts.compress);
  bool found = search.run();
  if (search.out_of_budget) return Decision::unknown("state budget exhausted");
  if (!found) return Decision::no();
  Schedule sched = search.reconstruct();
  shift_schedule(sched, inst.time_shift - input.time_shift);
  ValidationReport rep = validate_schedule(input, sched);
  if (!rep.ok())
    throw std::logic_error("state search produced an invalid schedule: " +
                           rep.first_failure());
  return Decision::yes(std::move(sched));
}

// Center vertex when the graph is a star with both edge directions between
// the center and every leaf; n = 2 qualifies with the lower id as center.
inline std::optional<Vertex> star_center(const DirectedGraph& g) {
  const int n = g.vertex_count();
  if (n < 2) return std::nullopt;
  if (g.edge_count() != 2 * (n - 1)) return std::nullopt;
  for (Vertex c = 0; c < n; ++c) {
    bool ok = true;
    for (Vertex v = 0; v < n && ok; ++v)
      if (v != c) ok = g.has_edge(c, v) && g.has_edge(v, c);
    if (ok) return c;
  }
  return std::nullopt;
}

namespace constrained_detail {

// Move-list view of a schedule used by the star normalizer.
struct StarRewriter {
  const Instance& inst;
  Vertex c;  // center
  std::set<Demand> dset;
  std::vector<std::map<Time, Vertex>> walk_moves;  // walk -> time -> target
  std::map<Demand, int> occupancy;                 // temporal edge -> walk

  StarRewriter(const Instance& i, Vertex center, const Schedule& sched)
      : inst(i), c(center), dset(i.demands.begin(), i.demands.end()) {
    walk_moves.resize(sched.size());
    for (std::size_t w = 0; w < sched.size(); ++w)
      for (const Demand& m : sched[w].moves()) {
        walk_moves[w][m.t] = m.v;
        occupancy[m] = static_cast<int>(w);
      }
  }

  void erase_move(int w, Time t) {
    auto& mm = walk_moves[static_cast<std::size_t>(w)];
    Vertex from = move_from(w, t);
    occupancy.erase({from, mm.at(t), t});
    mm.erase(t);
  }

  Vertex move_from(int w, Time t) {
    for (const auto& [edge, owner] : occupancy)
      if (owner == w && edge.t == t) return edge.u;
    throw std::logic_error("unknown move");
  }

  void add_move(int w, Vertex from, Vertex to, Time t) {
    walk_moves[static_cast<std::size_t>(w)][t] = to;
    occupancy[{from, to, t}] = w;
  }

  int occupant(Vertex from, Vertex to, Time t) const {
    auto it = occupancy.find({from, to, t});
    return it == occupancy.end() ? -1 : it->second;
  }

  // Earliest (enter-time, leaf, walk) with at least two consecutive waits.
  struct Conflict {
    Time enter;
    Vertex leaf;
    int walk;
    Time depart;
  };
  std::optional<Conflict> earliest_conflict() const {
    std::optional<Conflict> best;
    for (std::size_t w = 0; w < walk_moves.size(); ++w) {
      const auto& mm = walk_moves[w];
      for (auto it = mm.begin(); it != mm.end(); ++it) {
        if (it->second == c) continue;  // move into the center never waits long
        Vertex leaf = it->second;
        auto nxt = std::next(it);
        if (nxt == mm.end()) continue;  // ends on the leaf, no wait after trim
        Time stays = nxt->first - (it->first + 1);
        if (stays < 2) continue;
        Conflict cand{it->first, leaf, static_cast<int>(w), nxt->first};
        if (!best || std::tie(cand.enter, cand.leaf, cand.walk) <
                         std::tie(best->enter, best->leaf, best->walk))
          best = cand;
      }
    }
    return best;
  }

  // Clears (leaf -> center) at time s by shifting earlier departures one
  // step down the chain; returns once the slot is free.
  void clear_departure(Vertex v, Time s) {
    int j = occupant(v, c, s);
    if (j < 0) return;
    const auto& mm = walk_moves[static_cast<std::size_t>(j)];
    auto it = mm.find(s);
    if (it == mm.begin()) {
      // first move of j: drop it; the caller takes the edge
      erase_move(j, s);
      return;
    }
    // earliest-conflict processing: j entered two steps before departing,
    // so moving its departure one step down stays consistent
    if (std::prev(it)->first > s - 2)
      throw std::logic_error("departure chain hit a same-step arrival");
    clear_departure(v, s - 1);
    erase_move(j, s);
    add_move(j, v, c, s - 1);
  }

  // Finds a free (center -> leaf v) slot in [t0, t_dead - 1], delaying
  // blocking entries into their own waiting windows as needed. Returns the
  // allocated time; the caller takes the edge.
  Time allocate_incoming(Vertex v, Time t0, Time t_dead) {
    for (Time t = t0; t < t_dead; ++t) {
      int w = occupant(c, v, t);
      if (w < 0) return t;
      // occupant that never leaves v again: end its life before this entry
      const auto& mm = walk_moves[static_cast<std::size_t>(w)];
      auto it = mm.upper_bound(t);
      bool leaves = false;
      for (; it != mm.end(); ++it)
        if (it->second == c) { leaves = true; break; }
      if (!leaves) {
        erase_move(w, t);
        return t;
      }
    }
    // fully blocked: some blocker departs only after t_dead and can be
    // delayed into its own window
    for (Time t = t0; t < t_dead; ++t) {
      int w = occupant(c, v, t);
      const auto& mm = walk_moves[static_cast<std::size_t>(w)];
      Time depart = -1;
      for (auto it = mm.upper_bound(t); it != mm.end(); ++it)
        if (it->second == c) { depart = it->first; break; }
      if (depart > t_dead) {
        Time slot = allocate_incoming(v, t + 1, depart);
        erase_move(w, t);
        add_move(w, c, v, slot);
        return t;
      }
    }
    throw std::logic_error("incoming allocation found no slot");
  }

  Schedule rebuild() const {
    Schedule out;
    for (std::size_t w = 0; w < walk_moves.size(); ++w) {
      const auto& mm = walk_moves[w];
      if (mm.empty()) continue;
      std::vector<std::pair<Vertex, Time>> entries;
      for (const auto& [t, to] : mm) {
        Vertex from = to == c ? last_leaf(entries, w, t) : c;
        if (entries.empty()) entries.emplace_back(from, t);
        while (entries.back().second < t)
          entries.emplace_back(entries.back().first, entries.back().second + 1);
        entries.emplace_back(to, t + 1);
      }
      out.push_back(TemporalWalk(std::move(entries)));
    }
    return out;
  }

  Vertex last_leaf(const std::vector<std::pair<Vertex, Time>>& entries, int w,
                   Time t) const {
    if (!entries.empty()) return entries.back().first;
    for (const auto& [edge, owner] : occupancy)
      if (owner == w && edge.t == t) return edge.u;
    throw std::logic_error("walk starts nowhere");
  }
};

}  // namespace constrained_detail

// Rewrites a valid lifespan schedule on a bidirected star so that no walk
// waits more than one consecutive time step on a leaf. Coverage is
// preserved, per-walk lifespans never grow, and walks that lose all their
// moves are dropped.
inline Schedule normalize_star_schedule(const Instance& inst,
                                        const Schedule& sched) {
  auto center = star_center(inst.graph);
  if (!center)
    throw std::invalid_argument("normalize_star_schedule requires a star");
  if (inst.variant != Variant::Lifespan)
    throw std::invalid_argument("normalize_star_schedule handles lifespan");
  {
    ValidationReport rep = validate_schedule(inst, sched);
    if (!rep.ok())
      throw std::invalid_argument("normalize_star_schedule needs a valid "
                                  "schedule: " + rep.first_failure());
  }

  constrained_detail::StarRewriter rw(inst, *center, sched);
  const Vertex c = *center;
  long safety = 0;
  while (auto conflict = rw.earliest_conflict()) {
    if (++safety > 100000)
      throw std::logic_error("star normalization did not converge");
    auto [e, v, i, t2] = *conflict;
    Time a = e + 1;  // arrival on the leaf; the walk leaves again at a
    rw.clear_departure(v, a);
    rw.add_move(i, v, c, a);
    if (rw.dset.count({v, c, t2})) {
      // the old departure is demanded: come back in time to take it
      Time slot = rw.allocate_incoming(v, a + 1, t2);
      rw.add_move(i, c, v, slot);
    } else {
      rw.erase_move(i, t2);
    }
  }

  Schedule out = rw.rebuild();
  ValidationReport rep = validate_schedule(inst, out);
  if (!rep.ok())
    throw std::logic_error("star normalization broke the schedule: " +
                           rep.first_failure());
  return out;
}

// Lifespan-variant decision on bidirected stars: the state search with at
// most 4(n-1) active walks positioned on leaves at any time.
inline Decision solve_star_fpt(const Instance& input,
                               const ConstrainedOptions& opts = {}) {
  if (input.variant != Variant::Lifespan)
    throw std::invalid_argument("solve_star_fpt handles lifespan instances");
  auto center = star_center(input.graph);
  if (!center)
    throw std::invalid_argument("solve_star_fpt requires a bidirected star");
  PreDecision pre = preprocess(input);
  if (pre.kind == PreDecision::Kind::Infeasible) return Decision::no();
  if (pre.kind == PreDecision::Kind::Feasible)
    return Decision::yes(trivial_schedule(input));
  Instance inst = *pre.normalized;
  constrained_detail::StateSearch search(inst, opts.budget, opts.compress);
  search.leaf_cap = 4 * (inst.graph.vertex_count() - 1);
  search.center = *center;
  bool found = search.run();
  if (search.out_of_budget) return Decision::unknown("state budget exhausted");
  if (!found) return Decision::no();
  Schedule sched = search.reconstruct();
  shift_schedule(sched, inst.time_shift - input.time_shift);
  ValidationReport rep = validate_schedule(input, sched);
  if (!rep.ok())
    throw std::logic_error("star search produced an invalid schedule: " +
                           rep.first_failure());
  return Decision::yes(std::move(sched));
}

}  // namespace tedsc

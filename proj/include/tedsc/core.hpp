#pragma once
// Core domain types for temporally edge disjoint schedule completion:
// directed graphs, timed demands, instances, temporal walks, schedules,
// plus schedule validation and instance preprocessing.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tedsc {

using Time = std::int64_t;
using Vertex = int;

// Distance sentinel for unreachable vertex pairs. Kept small enough that
// sums of a few distances never overflow int.
inline constexpr int kUnreachable = std::numeric_limits<int>::max() / 4;

// Malformed input (bad files, invalid graphs, duplicate demands, walks that
// are not walks). Distinct from infeasibility, which is a regular result.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Variant { Unconstrained, Length, Lifespan };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Unconstrained: return "unconstrained";
    case Variant::Length: return "length";
    case Variant::Lifespan: return "lifespan";
  }
  return "?";
}

inline std::optional<Variant> variant_from_name(const std::string& s) {
  if (s == "unconstrained") return Variant::Unconstrained;
  if (s == "length") return Variant::Length;
  if (s == "lifespan") return Variant::Lifespan;
  return std::nullopt;
}

struct Demand {
  Vertex u{};
  Vertex v{};
  Time t{};

  friend bool operator==(const Demand&, const Demand&) = default;
  // Canonical order is by time first; solvers process demands chronologically.
  friend bool operator<(const Demand& a, const Demand& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  }
};

// Simple directed graph on vertices 0..n-1. No self-loops, no parallel
// edges. Undirected inputs are represented by two opposite directed edges.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  DirectedGraph(int n, std::vector<std::pair<Vertex, Vertex>> edges) : n_(n) {
    if (n < 0) throw StructuralError("vertex count must be non-negative");
    std::sort(edges.begin(), edges.end());
    for (std::size_t i = 0; i < edges.size(); ++i) {
      auto [u, v] = edges[i];
      if (u < 0 || u >= n || v < 0 || v >= n)
        throw StructuralError("edge endpoint out of range");
      if (u == v) throw StructuralError("self-loops are not allowed");
      if (i > 0 && edges[i] == edges[i - 1])
        throw StructuralError("duplicate edge");
    }
    edges_ = std::move(edges);
    out_.assign(n_, {});
    in_.assign(n_, {});
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
      out_[edges_[e].first].push_back(edges_[e].second);
      in_[edges_[e].second].push_back(edges_[e].first);
    }
  }

  int vertex_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::pair<Vertex, Vertex>>& edges() const { return edges_; }

  bool has_edge(Vertex u, Vertex v) const { return edge_index(u, v) >= 0; }

  // Index into edges(), or -1.
  int edge_index(Vertex u, Vertex v) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), std::make_pair(u, v));
    if (it == edges_.end() || *it != std::make_pair(u, v)) return -1;
    return static_cast<int>(it - edges_.begin());
  }

  const std::vector<Vertex>& out_neighbors(Vertex v) const { return out_[v]; }
  const std::vector<Vertex>& in_neighbors(Vertex v) const { return in_[v]; }

  bool has_isolated_vertex() const {
    for (Vertex v = 0; v < n_; ++v)
      if (out_[v].empty() && in_[v].empty()) return true;
    return false;
  }

  // BFS distances from src; kUnreachable where there is no directed path.
  std::vector<int> distances_from(Vertex src) const {
    std::vector<int> d(n_, kUnreachable);
    std::queue<Vertex> q;
    d[src] = 0;
    q.push(src);
    while (!q.empty()) {
      Vertex x = q.front();
      q.pop();
      for (Vertex y : out_[x]) {
        if (d[y] == kUnreachable) {
          d[y] = d[x] + 1;
          q.push(y);
        }
      }
    }
    return d;
  }

  std::vector<std::vector<int>> all_pairs_distances() const {
    std::vector<std::vector<int>> d(n_);
    for (Vertex v = 0; v < n_; ++v) d[v] = distances_from(v);
    return d;
  }

  // Shortest path src -> dst as a vertex sequence, ties broken toward the
  // lowest predecessor id. Empty if unreachable.
  std::vector<Vertex> shortest_path(Vertex src, Vertex dst) const {
    if (src == dst) return {src};
    std::vector<int> d(n_, kUnreachable);
    std::vector<Vertex> par(n_, -1);
    std::queue<Vertex> q;
    d[src] = 0;
    q.push(src);
    while (!q.empty()) {
      Vertex x = q.front();
      q.pop();
      for (Vertex y : out_[x]) {
        if (d[y] == kUnreachable) {
          d[y] = d[x] + 1;
          par[y] = x;
          q.push(y);
        }
      }
    }
    if (d[dst] == kUnreachable) return {};
    std::vector<Vertex> path;
    for (Vertex v = dst; v != -1; v = par[v]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
  }

 private:
  int n_ = 0;
  std::vector<std::pair<Vertex, Vertex>> edges_;
  std::vector<std::vector<Vertex>> out_, in_;
};

// Strips vertices without incident edges and compacts ids. remap[new] = old.
inline DirectedGraph strip_isolated(int n,
                                    const std::vector<std::pair<Vertex, Vertex>>& edges,
                                    std::vector<int>* remap_out = nullptr) {
  std::vector<bool> used(n, false);
  for (auto [u, v] : edges) {
    if (u >= 0 && u < n) used[u] = true;
    if (v >= 0 && v < n) used[v] = true;
  }
  std::vector<int> newid(n, -1), remap;
  for (int v = 0; v < n; ++v) {
    if (used[v]) {
      newid[v] = static_cast<int>(remap.size());
      remap.push_back(v);
    }
  }
  std::vector<std::pair<Vertex, Vertex>> compact;
  compact.reserve(edges.size());
  for (auto [u, v] : edges) compact.emplace_back(newid[u], newid[v]);
  if (remap_out) *remap_out = remap;
  return DirectedGraph(static_cast<int>(remap.size()), std::move(compact));
}

struct Instance {
  DirectedGraph graph;
  std::vector<Demand> demands;  // sorted, duplicate-free
  int k = 0;
  std::optional<Time> h;  // engaged iff variant is constrained
  Variant variant = Variant::Unconstrained;
  // Add to a walk/demand time in this instance to recover the time frame of
  // the instance it was normalized from. 0 for instances straight from input.
  Time time_shift = 0;
  // Original vertex ids when the loader stripped isolated vertices.
  std::vector<int> vertex_remap;

  Time lifetime() const {  // latest demanded time step, 0 for empty D
    Time lam = 0;
    for (const Demand& d : demands) lam = std::max(lam, d.t);
    return lam;
  }
  bool constrained() const { return variant != Variant::Unconstrained; }
};

inline Instance make_instance(DirectedGraph graph, std::vector<Demand> demands,
                              int k, std::optional<Time> h, Variant variant) {
  if (graph.has_isolated_vertex())
    throw StructuralError("graph has isolated vertices");
  if (k < 0) throw StructuralError("k must be non-negative");
  if (variant == Variant::Unconstrained) {
    if (h.has_value()) throw StructuralError("unconstrained instances take no h");
  } else {
    if (!h.has_value()) throw StructuralError("constrained instances require h");
    if (*h < 0) throw StructuralError("h must be non-negative");
  }
  std::sort(demands.begin(), demands.end());
  for (std::size_t i = 0; i < demands.size(); ++i) {
    const Demand& d = demands[i];
    if (d.t < 1) throw StructuralError("demand time must be at least 1");
    if (!graph.has_edge(d.u, d.v))
      throw StructuralError("demand (" + std::to_string(d.u) + "," +
                            std::to_string(d.v) + "," + std::to_string(d.t) +
                            ") is not on an edge of the graph");
    if (i > 0 && demands[i] == demands[i - 1])
      throw StructuralError("duplicate demand");
  }
  Instance inst;
  inst.graph = std::move(graph);
  inst.demands = std::move(demands);
  inst.k = k;
  inst.h = h;
  inst.variant = variant;
  return inst;
}

// A temporal walk in per-time-step expanded form: consecutive entries differ
// by exactly one time step and either stay on the same vertex (wait) or
// follow a graph edge (move).
class TemporalWalk {
 public:
  TemporalWalk() = default;
  explicit TemporalWalk(std::vector<std::pair<Vertex, Time>> entries)
      : entries_(std::move(entries)) {}

  const std::vector<std::pair<Vertex, Time>>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  std::pair<Vertex, Time> front() const { return entries_.front(); }
  std::pair<Vertex, Time> back() const { return entries_.back(); }

  // Move steps as (u, v, t) temporal edges.
  std::vector<Demand> moves() const {
    std::vector<Demand> m;
    for (std::size_t i = 0; i + 1 < entries_.size(); ++i)
      if (entries_[i].first != entries_[i + 1].first)
        m.push_back({entries_[i].first, entries_[i + 1].first, entries_[i].second});
    return m;
  }

  Time length() const {  // number of move steps
    Time l = 0;
    for (std::size_t i = 0; i + 1 < entries_.size(); ++i)
      if (entries_[i].first != entries_[i + 1].first) ++l;
    return l;
  }

  Time lifespan() const {
    if (entries_.empty()) return 0;
    return entries_.back().second - entries_.front().second;
  }

  void shift_times(Time delta) {
    for (auto& e : entries_) e.second += delta;
  }

  // Drops leading and trailing waits; keeps the stretch between the first
  // and last move. Zero-move walks become empty.
  TemporalWalk trimmed() const {
    std::size_t first = entries_.size(), last = 0;
    for (std::size_t i = 0; i + 1 < entries_.size(); ++i) {
      if (entries_[i].first != entries_[i + 1].first) {
        first = std::min(first, i);
        last = std::max(last, i + 1);
      }
    }
    if (first >= entries_.size()) return TemporalWalk{};
    return TemporalWalk(std::vector<std::pair<Vertex, Time>>(
        entries_.begin() + first, entries_.begin() + last + 1));
  }

  friend bool operator==(const TemporalWalk&, const TemporalWalk&) = default;

 private:
  std::vector<std::pair<Vertex, Time>> entries_;
};

using Schedule = std::vector<TemporalWalk>;

inline void shift_schedule(Schedule& s, Time delta) {
  if (delta == 0) return;
  for (TemporalWalk& w : s) w.shift_times(delta);
}

// length and lifespan of a walk; length <= lifespan always.
inline std::pair<Time, Time> walk_measures(const TemporalWalk& w) {
  return {w.length(), w.lifespan()};
}

// Well-formedness of a single walk against a graph. Returns an error
// description, or nothing when the walk is fine.
inline std::optional<std::string> check_walk(const DirectedGraph& g,
                                             const TemporalWalk& w) {
  const auto& e = w.entries();
  if (e.empty()) return "walk has no entries";
  for (const auto& [v, t] : e) {
    if (v < 0 || v >= g.vertex_count()) return "walk visits unknown vertex";
    if (t < 1) return "walk time before step 1";
  }
  bool has_move = false;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    if (e[i + 1].second != e[i].second + 1)
      return "walk times are not consecutive";
    if (e[i].first != e[i + 1].first) {
      has_move = true;
      if (!g.has_edge(e[i].first, e[i + 1].first))
        return "walk moves along a non-edge";
    }
  }
  if (!has_move) return "walk makes no move";
  return std::nullopt;
}

struct ValidationReport {
  enum class Status { Valid, Structural, Infeasible };

  struct Check {
    std::string name;
    bool ran = false;
    bool passed = false;
    std::string detail;
  };

  Status status = Status::Valid;
  std::vector<Check> checks;

  bool ok() const { return status == Status::Valid; }

  std::string first_failure() const {
    for (const Check& c : checks)
      if (c.ran && !c.passed) return c.name + ": " + c.detail;
    return {};
  }
};

// Checks, in order: per-walk well-formedness, temporal edge disjointness,
// demand coverage, schedule size <= k, and the per-walk variant bound.
// Stops at the first failing check.
inline ValidationReport validate_schedule(const Instance& inst,
                                          const Schedule& sched) {
  ValidationReport rep;
  auto fail = [&](ValidationReport::Check& c, ValidationReport::Status st,
                  std::string detail) {
    c.passed = false;
    c.detail = std::move(detail);
    rep.status = st;
  };

  {
    ValidationReport::Check c{"walks", true, true, ""};
    for (std::size_t i = 0; i < sched.size(); ++i) {
      if (auto err = check_walk(inst.graph, sched[i])) {
        fail(c, ValidationReport::Status::Structural,
             "walk " + std::to_string(i) + ": " + *err);
        break;
      }
    }
    rep.checks.push_back(c);
    if (!rep.ok()) return rep;
  }

  {
    ValidationReport::Check c{"ted", true, true, ""};
    std::set<Demand> seen;
    for (std::size_t i = 0; i < sched.size() && c.passed; ++i) {
      for (const Demand& m : sched[i].moves()) {
        if (!seen.insert(m).second) {
          std::ostringstream os;
          os << "temporal edge ((" << m.u << "," << m.v << ")," << m.t
             << ") used twice";
          fail(c, ValidationReport::Status::Infeasible, os.str());
          break;
        }
      }
    }
    rep.checks.push_back(c);
    if (!rep.ok()) return rep;
  }

  {
    ValidationReport::Check c{"coverage", true, true, ""};
    std::set<Demand> covered;
    for (const TemporalWalk& w : sched)
      for (const Demand& m : w.moves()) covered.insert(m);
    for (const Demand& d : inst.demands) {
      if (!covered.count(d)) {
        std::ostringstream os;
        os << "demand (" << d.u << "," << d.v << "," << d.t << ") not covered";
        fail(c, ValidationReport::Status::Infeasible, os.str());
        break;
      }
    }
    rep.checks.push_back(c);
    if (!rep.ok()) return rep;
  }

  {
    ValidationReport::Check c{"size", true, true, ""};
    if (static_cast<int>(sched.size()) > inst.k)
      fail(c, ValidationReport::Status::Infeasible,
           "schedule has " + std::to_string(sched.size()) + " walks, k = " +
               std::to_string(inst.k));
    rep.checks.push_back(c);
    if (!rep.ok()) return rep;
  }

  {
    ValidationReport::Check c{"bound", true, true, ""};
    if (inst.constrained()) {
      for (std::size_t i = 0; i < sched.size(); ++i) {
        Time val = inst.variant == Variant::Length ? sched[i].length()
                                                   : sched[i].lifespan();
        if (val > *inst.h) {
          std::ostringstream os;
          os << "walk " << i << " has " << variant_name(inst.variant) << " "
             << val << " > h = " << *inst.h;
          fail(c, ValidationReport::Status::Infeasible, os.str());
          break;
        }
      }
    }
    rep.checks.push_back(c);
  }

  return rep;
}

// Collapses any stretch in which a walk leaves a vertex and comes back
// without covering a demand into plain waiting, and cuts each walk back to
// the stretch between its first and last covered demand (walks covering
// nothing are dropped). Only removes moves, so disjointness and coverage
// are preserved; afterwards each walk makes at most n - 1 moves between
// consecutive covered demands, hence fewer than n * |D| moves overall.
inline Schedule shortcut_cycles(const Instance& inst, const Schedule& sched) {
  std::set<Demand> dset(inst.demands.begin(), inst.demands.end());
  Schedule out;
  for (const TemporalWalk& w : sched) {
    const auto& e = w.entries();
    std::vector<std::pair<Vertex, Time>> stack;
    std::vector<std::size_t> seen(
        static_cast<std::size_t>(inst.graph.vertex_count()),
        std::numeric_limits<std::size_t>::max());
    auto seen_at = [&](Vertex v) -> std::size_t {
      std::size_t p = seen[static_cast<std::size_t>(v)];
      if (p < stack.size() && stack[p].first == v) return p;
      return std::numeric_limits<std::size_t>::max();
    };
    for (std::size_t i = 0; i < e.size(); ++i) {
      bool demand_move =
          i > 0 && e[i - 1].first != e[i].first &&
          dset.count({e[i - 1].first, e[i].first, e[i - 1].second}) > 0;
      if (demand_move) {
        // demand edges are kept; revisits may not reach across them
        std::fill(seen.begin(), seen.end(),
                  std::numeric_limits<std::size_t>::max());
      } else {
        std::size_t p = seen_at(e[i].first);
        if (p != std::numeric_limits<std::size_t>::max()) {
          stack.resize(p + 1);
          for (Time t = stack.back().second + 1; t <= e[i].second; ++t)
            stack.emplace_back(e[i].first, t);
          seen[static_cast<std::size_t>(e[i].first)] = p;
          continue;
        }
      }
      seen[static_cast<std::size_t>(e[i].first)] = stack.size();
      stack.emplace_back(e[i]);
    }
    std::size_t first = stack.size(), last = 0;
    for (std::size_t i = 0; i + 1 < stack.size(); ++i)
      if (stack[i].first != stack[i + 1].first &&
          dset.count({stack[i].first, stack[i + 1].first, stack[i].second})) {
        first = std::min(first, i);
        last = std::max(last, i + 1);
      }
    if (first >= stack.size()) continue;
    out.push_back(TemporalWalk(std::vector<std::pair<Vertex, Time>>(
        stack.begin() + static_cast<std::ptrdiff_t>(first),
        stack.begin() + static_cast<std::ptrdiff_t>(last) + 1)));
  }
  return out;
}

// One single-move walk per demand. Valid whenever |D| <= k and h >= 1 (or
// the instance is unconstrained).
inline Schedule trivial_schedule(const Instance& inst) {
  Schedule s;
  for (const Demand& d : inst.demands)
    s.push_back(TemporalWalk({{d.u, d.t}, {d.v, d.t + 1}}));
  return s;
}

struct PreDecision {
  enum class Kind { Feasible, Infeasible, Undecided };
  Kind kind = Kind::Undecided;
  std::optional<Instance> normalized;  // engaged for Undecided
  std::string reason;
};

// Feasibility shortcuts and normalization. Never changes feasibility:
//  - constrained and k*h < |D|      -> Infeasible (walks cover <= k*h demands)
//  - |D| <= k                       -> Feasible (one walk per demand)
//  - length variant, h >= n*|D|     -> the bound is slack; rewritten to
//                                      unconstrained
//  - otherwise                      -> Undecided with demand times shifted so
//                                      the earliest is 1, and the guarantee
//                                      k < |D| <= k*h for constrained input.
// The infeasibility test runs first: with h = 0 and demands present, the
// instance is infeasible no matter how large k is.
inline PreDecision preprocess(const Instance& inst) {
  PreDecision out;
  const auto dcount = static_cast<std::int64_t>(inst.demands.size());

  if (inst.constrained() &&
      static_cast<std::int64_t>(inst.k) * *inst.h < dcount) {
    out.kind = PreDecision::Kind::Infeasible;
    out.reason = "k*h < |D|";
    return out;
  }
  if (dcount <= inst.k) {
    out.kind = PreDecision::Kind::Feasible;
    out.reason = "|D| <= k";
    return out;
  }

  Instance norm = inst;
  if (norm.variant == Variant::Length &&
      *norm.h >= static_cast<Time>(norm.graph.vertex_count()) * dcount) {
    // Walks never benefit from more than n*|D| edges.
    norm.variant = Variant::Unconstrained;
    norm.h.reset();
  }
  if (!norm.demands.empty()) {
    Time min_t = norm.demands.front().t;
    for (const Demand& d : norm.demands) min_t = std::min(min_t, d.t);
    if (min_t != 1) {
      for (Demand& d : norm.demands) d.t -= min_t - 1;
      norm.time_shift += min_t - 1;
    }
  }
  out.kind = PreDecision::Kind::Undecided;
  out.normalized = std::move(norm);
  return out;
}

// Shared solver result. Unknown is reserved for exhausted search budgets and
// oracle cap refusals, never for "don't know" on a completed search.
struct Decision {
  enum class Kind { Yes, No, Unknown };
  Kind kind = Kind::Unknown;
  std::optional<Schedule> schedule;  // witness for Yes (unless decision_only)
  std::string note;

  static Decision yes(Schedule s) {
    return {Kind::Yes, std::move(s), ""};
  }
  static Decision yes_without_witness() { return {Kind::Yes, std::nullopt, ""}; }
  static Decision no() { return {Kind::No, std::nullopt, ""}; }
  static Decision unknown(std::string why) {
    return {Kind::Unknown, std::nullopt, std::move(why)};
  }
};

}  // namespace tedsc

#pragma once
// Time-expanded networks over a schedule completion instance:
//  - the layered static expansion, plain or gap-compressed, optionally
//    augmented with a source/sink and flow ranges,
//  - constructive routing of walks through compressed gaps,
//  - the in-out expansion for length-preserving path encodings,
//  - the parallelize-and-subdivide transform to plain simple digraphs.

#include <cassert>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "tedsc/core.hpp"

namespace tedsc {

enum class EdgeKind { Wait, Move, Demand, Biclique, InOut, Source, Sink };

inline const char* edge_kind_name(EdgeKind k) {
  switch (k) {
    case EdgeKind::Wait: return "wait";
    case EdgeKind::Move: return "move";
    case EdgeKind::Demand: return "demand";
    case EdgeKind::Biclique: return "biclique";
    case EdgeKind::InOut: return "inout";
    case EdgeKind::Source: return "source";
    case EdgeKind::Sink: return "sink";
  }
  return "?";
}

struct NetEdge {
  EdgeKind kind;
  int from, to;       // node ids
  int lower, upper;   // flow range; "infinity" is encoded as the instance k
  std::int64_t cost_tau, cost_ell;
};

// Layered DAG. Node ids: layer * slots + slot for time-vertices, then the
// optional source and sink. Slots hold one vertex copy per layer (two per
// vertex for the in-out expansion).
class LayeredNetwork {
 public:
  int slots = 0;                    // per layer
  std::vector<Time> layer_times;    // strictly increasing
  std::vector<NetEdge> edges;
  std::optional<int> source, sink;

  int layer_count() const { return static_cast<int>(layer_times.size()); }
  int node_count() const {
    return layer_count() * slots + (source ? 1 : 0) + (sink ? 1 : 0);
  }
  int node(int layer, int slot) const { return layer * slots + slot; }
  int layer_of(int nd) const { return nd / slots; }
  int slot_of(int nd) const { return nd % slots; }
  bool is_time_vertex(int nd) const { return nd < layer_count() * slots; }

  int layer_index_of_time(Time t) const {
    auto it = std::lower_bound(layer_times.begin(), layer_times.end(), t);
    if (it == layer_times.end() || *it != t) return -1;
    return static_cast<int>(it - layer_times.begin());
  }

  // Adjacency as edge indices.
  std::vector<std::vector<int>> out_edges() const {
    std::vector<std::vector<int>> out(node_count());
    for (int e = 0; e < static_cast<int>(edges.size()); ++e)
      out[edges[e].from].push_back(e);
    return out;
  }

  // One edge per line: kind, endpoints as (layer time, slot), range, costs.
  std::string dump() const {
    std::ostringstream os;
    auto name = [&](int nd) -> std::string {
      if (source && nd == *source) return "s";
      if (sink && nd == *sink) return "z";
      return "(" + std::to_string(slot_of(nd)) + "," +
             std::to_string(layer_times[layer_of(nd)]) + ")";
    };
    for (const NetEdge& e : edges) {
      os << edge_kind_name(e.kind) << " " << name(e.from) << " -> "
         << name(e.to) << " range=(" << e.lower << "," << e.upper
         << ") ctau=" << e.cost_tau << " cell=" << e.cost_ell << "\n";
    }
    return os.str();
  }
};

struct GapMap {
  std::int64_t gamma = 0;
  // Compressed stretches as (a, b): the biclique bridges time a to time b,
  // b - a >= gamma, and every step in (a, b) is irrelevant.
  std::vector<std::pair<Time, Time>> intervals;
};

enum class ExpansionMode { SE, SEHat };

struct ExpansionOptions {
  // Attach the source/sink to every layer instead of only the first/last
  // one. Needed when edge costs must add up to walk measures: with
  // boundary-only attachment every flow path would pay for the idle stretch
  // before its first and after its last move.
  bool attach_all_layers = false;
  // Uncompressed builds refuse instances whose lifetime exceeds this.
  Time uncompressed_cap = 100000;
};

namespace expansion_detail {

// Retained time steps for a gap-compressed expansion, plus the bridged
// stretches. A gap of size >= gamma between consecutive relevant steps t1
// and t2 keeps only the layer t1 + 1 and bridges (t1 + 1) -> t2; `window`
// widens the kept prefix of the gap (used by the in-out expansion, where
// crossings must happen inside retained layers).
inline std::pair<std::vector<Time>, std::vector<std::pair<Time, Time>>>
retained_times(const Instance& inst, std::int64_t gamma, Time window) {
  std::vector<Time> rel;
  for (const Demand& d : inst.demands)
    if (rel.empty() || rel.back() != d.t) rel.push_back(d.t);
  std::vector<Time> times;
  std::vector<std::pair<Time, Time>> bridges;
  for (std::size_t i = 0; i < rel.size(); ++i) {
    times.push_back(rel[i]);
    Time next = (i + 1 < rel.size()) ? rel[i + 1] : rel[i] + 1;
    Time gap = next - rel[i] - 1;
    if (gap < gamma || gap <= window) {
      for (Time t = rel[i] + 1; t < next; ++t) times.push_back(t);
    } else {
      for (Time t = rel[i] + 1; t <= rel[i] + window; ++t) times.push_back(t);
      bridges.emplace_back(rel[i] + window, next);
    }
  }
  if (rel.empty()) times.push_back(1);  // degenerate: single layer
  return {std::move(times), std::move(bridges)};
}

}  // namespace expansion_detail

// Static expansion of the instance. With `gamma`, every maximal irrelevant
// stretch of at least gamma steps between consecutive relevant steps is
// replaced by one biclique transition whose edges connect exactly the
// directed-reachable vertex pairs (an unreachable pair could never be
// realized by a temporal walk). Mode SEHat adds the source/sink and flow
// ranges: demand moves (1,1), other moves (0,1), everything else (0,inf)
// with infinity encoded as k.
inline std::pair<LayeredNetwork, GapMap> build_expansion(
    const Instance& inst, ExpansionMode mode,
    std::optional<std::int64_t> gamma, const ExpansionOptions& opts = {}) {
  const DirectedGraph& g = inst.graph;
  const int n = g.vertex_count();
  const Time lambda = inst.lifetime();
  const int inf = std::max(inst.k, 1);

  LayeredNetwork net;
  net.slots = n;
  GapMap gaps;
  std::vector<std::pair<Time, Time>> bridges;

  if (!gamma.has_value()) {
    if (lambda + 1 > opts.uncompressed_cap) {
      std::ostringstream os;
      os << "uncompressed expansion would need " << (lambda + 1)
         << " layers of " << n << " vertices (cap " << opts.uncompressed_cap
         << "); build with a gap threshold instead";
      throw std::invalid_argument(os.str());
    }
    for (Time t = 1; t <= lambda + 1; ++t) net.layer_times.push_back(t);
    if (inst.demands.empty()) net.layer_times = {1};
  } else {
    if (*gamma < 1) throw std::invalid_argument("gap threshold must be >= 1");
    gaps.gamma = *gamma;
    auto [times, brs] = expansion_detail::retained_times(inst, *gamma, 1);
    if (!inst.demands.empty()) times.push_back(lambda + 1);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    net.layer_times = std::move(times);
    bridges = std::move(brs);
    gaps.intervals = bridges;
  }

  std::set<Demand> demand_set(inst.demands.begin(), inst.demands.end());
  std::vector<std::vector<int>> dist;  // filled only when bridging

  const int layers = net.layer_count();
  for (int li = 0; li + 1 < layers; ++li) {
    Time t = net.layer_times[li];
    Time t2 = net.layer_times[li + 1];
    if (t2 == t + 1) {
      for (Vertex v = 0; v < n; ++v)
        net.edges.push_back({EdgeKind::Wait, net.node(li, v),
                             net.node(li + 1, v), 0, inf, 1, 0});
      for (auto [u, v] : g.edges()) {
        bool dem = demand_set.count({u, v, t}) > 0;
        net.edges.push_back({dem ? EdgeKind::Demand : EdgeKind::Move,
                             net.node(li, u), net.node(li + 1, v), dem ? 1 : 0,
                             1, 1, 1});
      }
    } else {
      if (dist.empty()) dist = g.all_pairs_distances();
      for (Vertex u = 0; u < n; ++u)
        for (Vertex v = 0; v < n; ++v)
          if (dist[u][v] != kUnreachable)
            net.edges.push_back({EdgeKind::Biclique, net.node(li, u),
                                 net.node(li + 1, v), 0, inf, t2 - t,
                                 dist[u][v]});
    }
  }

  if (mode == ExpansionMode::SEHat) {
    net.source = layers * n;
    net.sink = layers * n + 1;
    if (opts.attach_all_layers) {
      for (int li = 0; li < layers; ++li)
        for (Vertex v = 0; v < n; ++v) {
          net.edges.push_back(
              {EdgeKind::Source, *net.source, net.node(li, v), 0, inf, 0, 0});
          net.edges.push_back(
              {EdgeKind::Sink, net.node(li, v), *net.sink, 0, inf, 0, 0});
        }
    } else {
      for (Vertex v = 0; v < n; ++v) {
        net.edges.push_back(
            {EdgeKind::Source, *net.source, net.node(0, v), 0, inf, 0, 0});
        net.edges.push_back({EdgeKind::Sink, net.node(layers - 1, v),
                             *net.sink, 0, inf, 0, 0});
      }
    }
  }
  return {std::move(net), std::move(gaps)};
}

enum class RouteStrategy { Sequential, TwoPhase };

namespace route_detail {

// Weakly connected components over the whole vertex set of g.
inline std::vector<int> weak_components(const DirectedGraph& g) {
  std::vector<int> comp(g.vertex_count(), -1);
  int c = 0;
  for (Vertex s = 0; s < g.vertex_count(); ++s) {
    if (comp[s] != -1) continue;
    std::vector<Vertex> stack{s};
    comp[s] = c;
    while (!stack.empty()) {
      Vertex x = stack.back();
      stack.pop_back();
      for (Vertex y : g.out_neighbors(x))
        if (comp[y] == -1) { comp[y] = c; stack.push_back(y); }
      for (Vertex y : g.in_neighbors(x))
        if (comp[y] == -1) { comp[y] = c; stack.push_back(y); }
    }
    ++c;
  }
  return comp;
}

inline TemporalWalk stitched(Vertex s, Time t1, Time t2,
                             const std::vector<std::pair<Vertex, Time>>& moves) {
  // moves: (target, arrival time) in increasing arrival order
  std::vector<std::pair<Vertex, Time>> entries;
  Vertex cur = s;
  Time t = t1;
  entries.emplace_back(cur, t);
  for (auto [to, arr] : moves) {
    while (t + 1 < arr) entries.emplace_back(cur, ++t);
    entries.emplace_back(to, ++t);
    cur = to;
  }
  while (t < t2) entries.emplace_back(cur, ++t);
  return TemporalWalk(std::move(entries));
}

}  // namespace route_detail

// Routes walks through an idle stretch (t1, t2): walk i starts on s_i at
// time t1 and must sit on z_i at time t2, all walks temporally edge
// disjoint, using only edges of g.
//
// Sequential: walk slot i departs at t1 + slot_i * (n - 1) along a shortest
// path, so walks never overlap in time; needs t2 - t1 >= (n-1) * k.
//
// TwoPhase: per weakly connected component, walks gather on a central vertex
// and fan out along a spanning tree, each phase staggered by one step; needs
// t2 - t1 >= n + 2k and effectively bidirected components (the gather phase
// runs the fan-out in reverse). Components where the tree is not bidirected
// fall back to sequential routing inside the stretch when it fits.
inline std::vector<TemporalWalk> route_through_gap(
    const DirectedGraph& g,
    const std::vector<std::pair<Vertex, Vertex>>& pairs,
    std::pair<Time, Time> gap, RouteStrategy strategy,
    const std::vector<int>& slots = {}) {
  const auto [t1, t2] = gap;
  const Time span = t2 - t1;
  const int n = g.vertex_count();
  const int k = static_cast<int>(pairs.size());

  auto comp = route_detail::weak_components(g);
  for (auto [s, z] : pairs) {
    if (s < 0 || s >= n || z < 0 || z >= n)
      throw std::invalid_argument("terminal out of range");
    if (comp[s] != comp[z])
      throw std::runtime_error("no route: terminals in different components");
    if (g.shortest_path(s, z).empty())
      throw std::runtime_error("no route: target unreachable from source");
  }

  std::vector<TemporalWalk> out(pairs.size());

  if (strategy == RouteStrategy::Sequential) {
    if (span < static_cast<Time>(n - 1) * k)
      throw std::invalid_argument("gap too short for sequential routing");
    for (int i = 0; i < k; ++i) {
      int slot = slots.empty() ? i : slots[i];
      auto [s, z] = pairs[i];
      std::vector<Vertex> path = g.shortest_path(s, z);
      Time depart = t1 + static_cast<Time>(slot) * (n - 1);
      std::vector<std::pair<Vertex, Time>> moves;
      for (std::size_t j = 1; j < path.size(); ++j)
        moves.emplace_back(path[j], depart + static_cast<Time>(j));
      if (!moves.empty() && moves.back().second > t2)
        throw std::invalid_argument("sequential slot exceeds the gap");
      out[i] = route_detail::stitched(s, t1, t2, moves);
    }
    return out;
  }

  if (span < static_cast<Time>(n) + 2 * k)
    throw std::invalid_argument("gap too short for two-phase routing");

  // group pair indices by component
  std::map<int, std::vector<int>> by_comp;
  for (int i = 0; i < k; ++i) by_comp[comp[pairs[i].first]].push_back(i);

  for (auto& [c, idxs] : by_comp) {
    std::vector<Vertex> members;
    for (Vertex v = 0; v < n; ++v)
      if (comp[v] == c) members.push_back(v);
    const int nc = static_cast<int>(members.size());
    const int kc = static_cast<int>(idxs.size());

    if (kc == 1) {
      auto [s, z] = pairs[idxs[0]];
      std::vector<Vertex> path = g.shortest_path(s, z);
      std::vector<std::pair<Vertex, Time>> moves;
      for (std::size_t j = 1; j < path.size(); ++j)
        moves.emplace_back(path[j], t1 + static_cast<Time>(j));
      out[idxs[0]] = route_detail::stitched(s, t1, t2, moves);
      continue;
    }

    // spanning tree of the component over the undirected view, rooted at the
    // lowest id; parent[v] is v's neighbor toward the root
    std::map<Vertex, Vertex> parent;
    std::vector<Vertex> order;
    {
      std::vector<Vertex> q{members.front()};
      parent[members.front()] = -1;
      std::size_t qi = 0;
      while (qi < q.size()) {
        Vertex x = q[qi++];
        order.push_back(x);
        std::vector<Vertex> nbs;
        for (Vertex y : g.out_neighbors(x)) nbs.push_back(y);
        for (Vertex y : g.in_neighbors(x)) nbs.push_back(y);
        std::sort(nbs.begin(), nbs.end());
        for (Vertex y : nbs)
          if (!parent.count(y)) { parent[y] = x; q.push_back(y); }
      }
    }
    auto tree_dists = [&](Vertex r) {
      std::map<Vertex, int> d{{r, 0}};
      std::vector<Vertex> q{r};
      std::size_t qi = 0;
      while (qi < q.size()) {
        Vertex x = q[qi++];
        for (Vertex y : order) {
          if (d.count(y)) continue;
          if (parent[y] == x || parent[x] == y) {
            d[y] = d[x] + 1;
            q.push_back(y);
          }
        }
      }
      return d;
    };
    // center: minimize tree eccentricity, ties to the lowest id
    Vertex center = -1;
    int best_ecc = kUnreachable;
    for (Vertex r : members) {
      auto d = tree_dists(r);
      int ecc = 0;
      for (auto& [v, dv] : d) ecc = std::max(ecc, dv);
      if (ecc < best_ecc) { best_ecc = ecc; center = r; }
    }
    auto tree_path = [&](Vertex from, Vertex to) {
      // unique path in the tree via parent pointers
      std::vector<Vertex> a, b;
      std::map<Vertex, int> depth;
      std::function<int(Vertex)> get_depth = [&](Vertex v) -> int {
        if (v == -1) return -1;
        auto it = depth.find(v);
        if (it != depth.end()) return it->second;
        int d = get_depth(parent[v]) + 1;
        depth[v] = d;
        return d;
      };
      Vertex x = from, y = to;
      while (get_depth(x) > get_depth(y)) { a.push_back(x); x = parent[x]; }
      while (get_depth(y) > get_depth(x)) { b.push_back(y); y = parent[y]; }
      while (x != y) {
        a.push_back(x); x = parent[x];
        b.push_back(y); y = parent[y];
      }
      a.push_back(x);
      std::reverse(b.begin(), b.end());
      a.insert(a.end(), b.begin(), b.end());
      return a;
    };
    bool bidirected_ok = true;
    for (Vertex v : members)
      if (parent[v] != -1 &&
          (!g.has_edge(v, parent[v]) || !g.has_edge(parent[v], v)))
        bidirected_ok = false;

    const Time phase = static_cast<Time>(best_ecc) + kc;
    if (!bidirected_ok || 2 * phase > span) {
      // directed component without a usable center: schedule one after the
      // other if the stretch allows it
      if (span < static_cast<Time>(nc - 1) * kc)
        throw std::runtime_error(
            "no route: component is not bidirected and the gap is too short "
            "for sequential routing");
      for (int r = 0; r < kc; ++r) {
        auto [s, z] = pairs[idxs[r]];
        std::vector<Vertex> path = g.shortest_path(s, z);
        Time depart = t1 + static_cast<Time>(r) * (nc - 1);
        std::vector<std::pair<Vertex, Time>> moves;
        for (std::size_t j = 1; j < path.size(); ++j)
          moves.emplace_back(path[j], depart + static_cast<Time>(j));
        out[idxs[r]] = route_detail::stitched(s, t1, t2, moves);
      }
      continue;
    }

    for (int r = 0; r < kc; ++r) {
      auto [s, z] = pairs[idxs[r]];
      std::vector<std::pair<Vertex, Time>> moves;
      // gather: the reverse of a fan-out from the center staggered by r;
      // virtual move v happens at real time t1 + phase - 1 - v
      std::vector<Vertex> pin = tree_path(center, s);
      for (std::size_t j = 1; j < pin.size(); ++j) {
        Time virt = static_cast<Time>(r) + static_cast<Time>(j) - 1;
        // virtual edge pin[j-1] -> pin[j] reversed: pin[j] -> pin[j-1]
        moves.emplace_back(pin[j - 1], t1 + phase - 1 - virt + 1);
      }
      std::reverse(moves.begin(), moves.end());
      // fan out: leave the center at t1 + phase + r
      std::vector<Vertex> pout = tree_path(center, z);
      for (std::size_t j = 1; j < pout.size(); ++j)
        moves.emplace_back(pout[j],
                           t1 + phase + static_cast<Time>(r) + static_cast<Time>(j));
      out[idxs[r]] = route_detail::stitched(s, t1, t2, moves);
    }
  }
  return out;
}

// In-out expansion: per retained time step and vertex an in- and an
// out-copy; waiting is a single in->out edge regardless of duration, every
// temporal edge is an out->in edge, so any walk section of j moves maps to a
// path of exactly 2j (+1 when it starts waiting) static edges. Gaps are
// compressed by keeping gamma + 1 trailing steps after each relevant step
// (enough for all crossings to be rescheduled inside retained layers) and
// letting the ordinary in->out edges span the removed stretch.
inline LayeredNetwork build_inout(const Instance& inst, std::int64_t gamma) {
  if (gamma < 1) throw std::invalid_argument("gap threshold must be >= 1");
  const DirectedGraph& g = inst.graph;
  const int n = g.vertex_count();
  const int inf = std::max(inst.k, 1);

  auto [times, bridges] =
      expansion_detail::retained_times(inst, gamma, static_cast<Time>(gamma) + 1);
  if (!inst.demands.empty()) times.push_back(inst.lifetime() + 1);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  (void)bridges;

  LayeredNetwork net;
  net.slots = 2 * n;  // slot v = in-copy, slot n + v = out-copy
  net.layer_times = times;
  std::set<Demand> demand_set(inst.demands.begin(), inst.demands.end());

  const int layers = net.layer_count();
  for (int li = 0; li < layers; ++li)
    for (int lj = li; lj < layers; ++lj)
      for (Vertex v = 0; v < n; ++v)
        net.edges.push_back({EdgeKind::InOut, net.node(li, v),
                             net.node(lj, n + v), 0, inf,
                             net.layer_times[lj] - net.layer_times[li], 0});
  for (int li = 0; li + 1 < layers; ++li) {
    if (net.layer_times[li + 1] != net.layer_times[li] + 1) continue;
    Time t = net.layer_times[li];
    for (auto [u, v] : g.edges()) {
      bool dem = demand_set.count({u, v, t}) > 0;
      net.edges.push_back({dem ? EdgeKind::Demand : EdgeKind::Move,
                           net.node(li, n + u), net.node(li + 1, v),
                           dem ? 1 : 0, 1, 1, 1});
    }
  }
  return net;
}

// Result of parallelizing the unbounded-capacity edges k-fold and then
// subdividing every edge once. The output is always a simple digraph; each
// midpoint remembers which network edge (and which parallel copy) it came
// from, and original network nodes keep their ids.
struct PsGraph {
  DirectedGraph graph;
  int original_nodes = 0;
  std::vector<std::pair<int, int>> midpoint_origin;  // (net edge idx, copy)

  int midpoint_id(int idx) const { return original_nodes + idx; }
  bool is_midpoint(int node) const { return node >= original_nodes; }
  std::pair<int, int> origin_of(int node) const {
    return midpoint_origin[static_cast<std::size_t>(node - original_nodes)];
  }
};

inline PsGraph parallelize_subdivide(const LayeredNetwork& net, int k) {
  PsGraph ps;
  ps.original_nodes = net.node_count();
  std::vector<std::pair<Vertex, Vertex>> edges;
  int next = ps.original_nodes;
  for (int e = 0; e < static_cast<int>(net.edges.size()); ++e) {
    const NetEdge& ne = net.edges[e];
    if (ne.kind == EdgeKind::Source || ne.kind == EdgeKind::Sink)
      throw std::invalid_argument(
          "parallelize_subdivide expects a source/sink-free network");
    bool unbounded = ne.kind == EdgeKind::Wait || ne.kind == EdgeKind::InOut ||
                     ne.kind == EdgeKind::Biclique;
    int copies = unbounded ? std::max(k, 1) : 1;
    for (int c = 0; c < copies; ++c) {
      int mid = next++;
      ps.midpoint_origin.emplace_back(e, c);
      edges.emplace_back(ne.from, mid);
      edges.emplace_back(mid, ne.to);
    }
  }
  ps.graph = DirectedGraph(next, std::move(edges));
  return ps;
}

}  // namespace tedsc

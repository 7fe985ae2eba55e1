#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "tedsc/core.hpp"
#include "tedsc/oracle.hpp"

using namespace tedsc;

namespace {

DirectedGraph one_way_uv() { return DirectedGraph(2, {{0, 1}}); }
DirectedGraph bidirected_uv() { return DirectedGraph(2, {{0, 1}, {1, 0}}); }

// Independent re-check of a schedule used to cross-validate the validator:
// enumerate all (edge, time) occupancies and the coverage set directly.
bool recheck(const Instance& inst, const Schedule& s) {
  std::map<std::tuple<Vertex, Vertex, Time>, int> occupancy;
  std::set<Demand> covered;
  if (static_cast<int>(s.size()) > inst.k) return false;
  for (const TemporalWalk& w : s) {
    if (check_walk(inst.graph, w)) return false;
    if (inst.variant == Variant::Length && w.length() > *inst.h) return false;
    if (inst.variant == Variant::Lifespan && w.lifespan() > *inst.h) return false;
    for (const Demand& m : w.moves()) {
      ++occupancy[{m.u, m.v, m.t}];
      covered.insert(m);
    }
  }
  for (auto& [key, cnt] : occupancy)
    if (cnt > 1) return false;
  for (const Demand& d : inst.demands)
    if (!covered.count(d)) return false;
  return true;
}

}  // namespace

TEST_CASE("graph construction rejects malformed edges") {
  CHECK_THROWS_AS(DirectedGraph(2, {{0, 0}}), StructuralError);
  CHECK_THROWS_AS(DirectedGraph(2, {{0, 1}, {0, 1}}), StructuralError);
  CHECK_THROWS_AS(DirectedGraph(1, {{0, 1}}), StructuralError);
}

TEST_CASE("strip_isolated compacts ids and records the remap") {
  std::vector<int> remap;
  DirectedGraph g = strip_isolated(4, {{1, 3}}, &remap);
  CHECK(g.vertex_count() == 2);
  CHECK(remap == std::vector<int>{1, 3});
  CHECK(g.has_edge(0, 1));
}

TEST_CASE("instance validation") {
  CHECK_THROWS_AS(make_instance(one_way_uv(), {{1, 0, 1}}, 1, std::nullopt,
                                Variant::Unconstrained),
                  StructuralError);
  CHECK_THROWS_AS(make_instance(one_way_uv(), {{0, 1, 1}, {0, 1, 1}}, 1,
                                std::nullopt, Variant::Unconstrained),
                  StructuralError);
  CHECK_THROWS_AS(make_instance(one_way_uv(), {{0, 1, 0}}, 1, std::nullopt,
                                Variant::Unconstrained),
                  StructuralError);
  CHECK_THROWS_AS(make_instance(one_way_uv(), {{0, 1, 1}}, 1, Time{3},
                                Variant::Unconstrained),
                  StructuralError);
  CHECK_THROWS_AS(make_instance(one_way_uv(), {{0, 1, 1}}, 1, std::nullopt,
                                Variant::Length),
                  StructuralError);
  CHECK_THROWS_AS(make_instance(DirectedGraph(3, {{0, 1}}), {}, 0, std::nullopt,
                                Variant::Unconstrained),
                  StructuralError);
}

TEST_CASE("walk measures") {
  CHECK(walk_measures(TemporalWalk({{0, 1}, {1, 2}})) ==
        std::pair<Time, Time>{1, 1});
  CHECK(walk_measures(TemporalWalk({{0, 1}, {0, 2}, {1, 3}})) ==
        std::pair<Time, Time>{1, 2});
  // a-d-c-d-a round trip over five steps: 4 moves, 4 steps spanned
  TemporalWalk p({{0, 1}, {3, 2}, {2, 3}, {3, 4}, {0, 5}});
  CHECK(walk_measures(p) == std::pair<Time, Time>{4, 4});
}

TEST_CASE("walk length never exceeds lifespan") {
  std::mt19937 rng(7);
  DirectedGraph g(3, {{0, 1}, {1, 0}, {1, 2}, {2, 1}});
  for (int it = 0; it < 200; ++it) {
    Vertex v = static_cast<Vertex>(rng() % 3);
    Time t = 1 + static_cast<Time>(rng() % 4);
    std::vector<std::pair<Vertex, Time>> entries{{v, t}};
    for (int s = 0; s < static_cast<int>(rng() % 6); ++s) {
      const auto& nb = g.out_neighbors(entries.back().first);
      Vertex next = entries.back().first;
      if (!nb.empty() && rng() % 2) next = nb[rng() % nb.size()];
      entries.emplace_back(next, entries.back().second + 1);
    }
    TemporalWalk w(entries);
    auto [len, life] = walk_measures(w);
    CHECK(len <= life);
  }
}

TEST_CASE("validate_schedule accepts a single-walk cover") {
  Instance inst = make_instance(one_way_uv(), {{0, 1, 1}}, 1, std::nullopt,
                                Variant::Unconstrained);
  Schedule s{TemporalWalk({{0, 1}, {1, 2}})};
  ValidationReport rep = validate_schedule(inst, s);
  CHECK(rep.ok());
  CHECK(recheck(inst, s));
}

TEST_CASE("validate_schedule flags duplicated temporal edges") {
  Instance inst = make_instance(one_way_uv(), {{0, 1, 1}}, 2, std::nullopt,
                                Variant::Unconstrained);
  Schedule s{TemporalWalk({{0, 1}, {1, 2}}), TemporalWalk({{0, 1}, {1, 2}})};
  ValidationReport rep = validate_schedule(inst, s);
  CHECK(rep.status == ValidationReport::Status::Infeasible);
  CHECK(rep.first_failure().find("ted") != std::string::npos);
  CHECK_FALSE(recheck(inst, s));
}

TEST_CASE("validate_schedule under a lifespan bound") {
  Instance inst = make_instance(bidirected_uv(), {{0, 1, 1}, {1, 0, 2}}, 1,
                                Time{3}, Variant::Lifespan);
  Schedule s{TemporalWalk({{0, 1}, {1, 2}, {0, 3}})};
  ValidationReport rep = validate_schedule(inst, s);
  CHECK(rep.ok());
  CHECK(s[0].lifespan() == 2);
  // confirmed feasible by the exhaustive search as well
  Decision d = oracle_decide(inst);
  REQUIRE(d.kind == Decision::Kind::Yes);
}

TEST_CASE("validate_schedule structural errors are not infeasibility") {
  Instance inst = make_instance(one_way_uv(), {{0, 1, 1}}, 1, std::nullopt,
                                Variant::Unconstrained);
  SECTION("non-edge move") {
    Schedule s{TemporalWalk({{1, 1}, {0, 2}})};
    CHECK(validate_schedule(inst, s).status ==
          ValidationReport::Status::Structural);
  }
  SECTION("non-consecutive times") {
    Schedule s{TemporalWalk({{0, 1}, {1, 3}})};
    CHECK(validate_schedule(inst, s).status ==
          ValidationReport::Status::Structural);
  }
  SECTION("zero-move walk") {
    Schedule s{TemporalWalk({{0, 1}, {0, 2}})};
    CHECK(validate_schedule(inst, s).status ==
          ValidationReport::Status::Structural);
  }
}

TEST_CASE("validator agrees with an independent occupancy re-check") {
  std::mt19937 rng(11);
  DirectedGraph g(3, {{0, 1}, {1, 0}, {1, 2}, {2, 1}});
  for (int it = 0; it < 300; ++it) {
    std::vector<Demand> dem;
    dem.push_back({0, 1, 1});
    if (rng() % 2) dem.push_back({1, 2, 1 + static_cast<Time>(rng() % 3)});
    std::optional<Time> h;
    Variant var = Variant::Unconstrained;
    int pick = static_cast<int>(rng() % 3);
    if (pick == 1) { var = Variant::Length; h = 1 + static_cast<Time>(rng() % 3); }
    if (pick == 2) { var = Variant::Lifespan; h = 1 + static_cast<Time>(rng() % 3); }
    Instance inst;
    try {
      inst = make_instance(g, dem, static_cast<int>(rng() % 3), h, var);
    } catch (const StructuralError&) {
      continue;
    }
    // random (possibly invalid) schedules
    Schedule s;
    int walks = static_cast<int>(rng() % 3);
    for (int wi = 0; wi < walks; ++wi) {
      Vertex v = static_cast<Vertex>(rng() % 3);
      Time t = 1 + static_cast<Time>(rng() % 3);
      std::vector<std::pair<Vertex, Time>> entries{{v, t}};
      for (int st = 0; st < 1 + static_cast<int>(rng() % 4); ++st) {
        const auto& nb = g.out_neighbors(entries.back().first);
        Vertex next = entries.back().first;
        if (!nb.empty() && rng() % 3) next = nb[rng() % nb.size()];
        entries.emplace_back(next, entries.back().second + 1);
      }
      s.push_back(TemporalWalk(entries));
      if (s.back().length() == 0) s.pop_back();
    }
    ValidationReport rep = validate_schedule(inst, s);
    CHECK(rep.ok() == recheck(inst, s));
  }
}

TEST_CASE("preprocess shortcuts") {
  DirectedGraph g = bidirected_uv();
  SECTION("few demands means feasible") {
    Instance inst = make_instance(g, {{0, 1, 1}, {1, 0, 2}}, 3, std::nullopt,
                                  Variant::Unconstrained);
    CHECK(preprocess(inst).kind == PreDecision::Kind::Feasible);
  }
  SECTION("k*h below demand count means infeasible") {
    Instance inst = make_instance(
        g, {{0, 1, 1}, {1, 0, 2}, {0, 1, 3}, {1, 0, 4}, {0, 1, 5}}, 1, Time{3},
        Variant::Length);
    CHECK(preprocess(inst).kind == PreDecision::Kind::Infeasible);
  }
  SECTION("infeasibility wins over the demand-count shortcut when h = 0") {
    Instance inst =
        make_instance(g, {{0, 1, 1}}, 5, Time{0}, Variant::Length);
    CHECK(preprocess(inst).kind == PreDecision::Kind::Infeasible);
  }
  SECTION("huge length bound rewritten to unconstrained") {
    DirectedGraph g3(3, {{0, 1}, {1, 0}, {1, 2}, {2, 1}});
    Instance inst = make_instance(g3, {{0, 1, 1}, {1, 2, 2}}, 1, Time{6},
                                  Variant::Length);
    PreDecision pre = preprocess(inst);
    REQUIRE(pre.kind == PreDecision::Kind::Undecided);
    CHECK(pre.normalized->variant == Variant::Unconstrained);
    CHECK_FALSE(pre.normalized->h.has_value());
  }
  SECTION("normalization shifts times down to 1 and records the offset") {
    Instance inst = make_instance(g, {{0, 1, 5}, {1, 0, 7}}, 1, std::nullopt,
                                  Variant::Unconstrained);
    PreDecision pre = preprocess(inst);
    REQUIRE(pre.kind == PreDecision::Kind::Undecided);
    CHECK(pre.normalized->demands.front().t == 1);
    CHECK(pre.normalized->demands.back().t == 3);
    CHECK(pre.normalized->time_shift == 4);
  }
}

TEST_CASE("preprocess preserves oracle decisions") {
  std::mt19937 rng(23);
  DirectedGraph g(3, {{0, 1}, {1, 0}, {1, 2}, {2, 1}});
  for (int it = 0; it < 60; ++it) {
    std::vector<Demand> dem;
    std::set<Demand> seen;
    int cnt = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < cnt; ++i) {
      const auto& es = g.edges();
      auto [u, v] = es[rng() % es.size()];
      Demand d{u, v, 2 + static_cast<Time>(rng() % 5)};
      if (seen.insert(d).second) dem.push_back(d);
    }
    Variant var = (it % 2) ? Variant::Length : Variant::Lifespan;
    Time h = 1 + static_cast<Time>(rng() % 4);
    int k = 1 + static_cast<int>(rng() % 2);
    Instance inst = make_instance(g, dem, k, h, var);
    Decision before = oracle_decide(inst);
    PreDecision pre = preprocess(inst);
    REQUIRE(before.kind != Decision::Kind::Unknown);
    switch (pre.kind) {
      case PreDecision::Kind::Feasible:
        CHECK(before.kind == Decision::Kind::Yes);
        break;
      case PreDecision::Kind::Infeasible:
        CHECK(before.kind == Decision::Kind::No);
        break;
      case PreDecision::Kind::Undecided: {
        Decision after = oracle_decide(*pre.normalized);
        CHECK(after.kind == before.kind);
        break;
      }
    }
  }
}

TEST_CASE("trimmed drops boundary waits only") {
  TemporalWalk w({{0, 1}, {0, 2}, {1, 3}, {1, 4}});
  TemporalWalk t = w.trimmed();
  CHECK(t.entries() == std::vector<std::pair<Vertex, Time>>{{0, 2}, {1, 3}});
  CHECK(TemporalWalk({{0, 1}, {0, 2}}).trimmed().empty());
}

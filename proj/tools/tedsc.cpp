// Command-line front end: solve instances with a chosen engine, generate
// labeled instances from the reductions, validate schedules, run the
// approximation, query the exhaustive baseline, and sweep the agreement
// corpus. Exit codes: 0 = yes/valid, 1 = no/invalid, 2 = unknown,
// 64 = parse error, 65 = usage error.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "tedsc/approx.hpp"
#include "tedsc/expansion.hpp"
#include "tedsc/io.hpp"
#include "tedsc/oracle.hpp"
#include "tedsc/solver_constrained.hpp"
#include "tedsc/solver_unconstrained.hpp"

using namespace tedsc;

namespace {

constexpr int kExitYes = 0;
constexpr int kExitNo = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitParse = 64;
constexpr int kExitUsage = 65;

Decision dispatch(const Instance& inst, const std::string& algo,
                  std::int64_t budget, bool decision_only) {
  ConstrainedOptions copts;
  copts.budget = budget;
  if (algo == "flow") {
    if (inst.constrained()) {
      // the flow engine decides the unconstrained problem; on constrained
      // input it solves the relaxation (a NO answer still disproves the
      // constrained instance)
      std::cerr << "note: ignoring the " << variant_name(inst.variant)
                << " bound; the flow engine solves the unconstrained "
                   "relaxation\n";
      Instance relaxed = inst;
      relaxed.variant = Variant::Unconstrained;
      relaxed.h.reset();
      return solve_tedsc(relaxed, {.decision_only = decision_only});
    }
    return solve_tedsc(inst, {.decision_only = decision_only});
  }
  if (algo == "fpt-kh") return solve_fpt_kh(inst, copts);
  if (algo == "xp-k") return solve_xp_k(inst, copts);
  if (algo == "star") return solve_star_fpt(inst, copts);
  if (algo == "oracle") return oracle_decide(inst);
  if (algo == "approx") {
    if (!inst.constrained())
      throw std::invalid_argument("--algo approx needs a constrained variant");
    ApproxResult res =
        approx_min_walks(inst.graph, inst.demands, *inst.h, inst.variant);
    if (static_cast<int>(res.schedule.size()) <= inst.k)
      return Decision::yes(std::move(res.schedule));
    // the approximation cannot certify infeasibility
    return Decision::unknown("approximation needed " +
                             std::to_string(res.schedule.size()) + " walks");
  }
  throw std::invalid_argument("unknown algorithm '" + algo + "'");
}

int emit_decision(const Decision& d, const std::string& schedule_path) {
  switch (d.kind) {
    case Decision::Kind::Yes:
      std::cout << "YES\n";
      if (!schedule_path.empty() && d.schedule)
        save_text(schedule_path, serialize_schedule(*d.schedule));
      return kExitYes;
    case Decision::Kind::No:
      std::cout << "NO\n";
      return kExitNo;
    case Decision::Kind::Unknown:
      std::cout << "UNKNOWN";
      if (!d.note.empty()) std::cout << " (" << d.note << ")";
      std::cout << "\n";
      return kExitUnknown;
  }
  return kExitUnknown;
}

Cnf parse_dimacs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open '" + path + "'");
  Cnf cnf;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ls(line);
    if (line[0] == 'p') {
      std::string p, fmt;
      int m;
      if (!(ls >> p >> fmt >> cnf.variables >> m) || fmt != "cnf")
        throw ParseError(line_no, 1, "expected 'p cnf <vars> <clauses>'");
      continue;
    }
    Clause c;
    int lit;
    while (ls >> lit) {
      if (lit == 0) break;
      if (std::abs(lit) > cnf.variables) cnf.variables = std::abs(lit);
      c.push_back(lit);
    }
    if (!c.empty()) cnf.clauses.push_back(std::move(c));
  }
  return cnf;
}

// Simple edge-list format for disjoint-path inputs:
//   n <count> / edge <u> <v> / pair <s> <z>
std::pair<DirectedGraph, std::vector<std::pair<Vertex, Vertex>>> parse_dag_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open '" + path + "'");
  int n = -1;
  std::vector<std::pair<Vertex, Vertex>> edges, pairs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "n") {
      if (!(ls >> n)) throw ParseError(line_no, 3, "expected a vertex count");
    } else if (head == "edge") {
      int u, v;
      if (!(ls >> u >> v)) throw ParseError(line_no, 6, "expected two ids");
      edges.emplace_back(u, v);
    } else if (head == "pair") {
      int s, z;
      if (!(ls >> s >> z)) throw ParseError(line_no, 6, "expected two ids");
      pairs.emplace_back(s, z);
    } else {
      throw ParseError(line_no, 1, "unknown directive '" + head + "'");
    }
  }
  if (n < 0) throw ParseError(line_no, 1, "missing vertex count");
  return {DirectedGraph(n, edges), pairs};
}

void write_generated(const GeneratedInstance& gi, const std::string& out_path,
                     bool json) {
  if (json) {
    save_text(out_path, instance_to_json(gi.instance).dump(2) + "\n");
  } else {
    save_text(out_path, serialize_instance(gi.instance));
  }
  save_text(out_path + ".truth", serialize_truth(gi.truth));
  std::cout << "wrote " << out_path << " (|D| = " << gi.instance.demands.size()
            << ", k = " << gi.instance.k << ", truth "
            << ground_truth_name(gi.truth) << ")\n";
}

int run_bench(const std::string& corpus) {
  // machine-readable agreement sweep: one line per instance class
  std::mt19937 rng(1);
  struct Row {
    std::string name;
    int instances = 0;
    int disagreements = 0;
    int yes = 0;
  };
  std::vector<Row> rows;
  int max_n = corpus == "small" ? 3 : 4;
  for (int n = 2; n <= max_n; ++n) {
    Row row{"random-n" + std::to_string(n), 0, 0, 0};
    for (int it = 0; it < 40; ++it) {
      RandomSpec spec;
      spec.n = n;
      spec.m = std::min(n * (n - 1), 2 + static_cast<int>(rng() % 4));
      if (n > 2 * spec.m) continue;
      spec.lambda = 1 + static_cast<Time>(rng() % 6);
      spec.demands = std::min<int>(1 + static_cast<int>(rng() % 4),
                                   static_cast<int>(spec.m * spec.lambda));
      spec.k = 1 + static_cast<int>(rng() % 2);
      spec.variant = (it % 2) ? Variant::Length : Variant::Lifespan;
      spec.h = 1 + static_cast<Time>(rng() % 4);
      spec.seed = rng();
      Instance inst = gen_random(spec);
      Decision a = solve_fpt_kh(inst);
      Decision b = solve_xp_k(inst);
      Decision c = oracle_decide(inst);
      ++row.instances;
      if (a.kind != c.kind || b.kind != c.kind) ++row.disagreements;
      row.yes += c.kind == Decision::Kind::Yes;
    }
    rows.push_back(row);
  }
  std::cout << "class\tinstances\tyes\tagreement\n";
  bool all_agree = true;
  for (const Row& r : rows) {
    double pct = r.instances == 0
                     ? 100.0
                     : 100.0 * (r.instances - r.disagreements) / r.instances;
    std::cout << r.name << "\t" << r.instances << "\t" << r.yes << "\t" << pct
              << "%\n";
    all_agree &= r.disagreements == 0;
  }
  return all_agree ? kExitYes : kExitNo;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporally edge disjoint schedule completion toolkit"};
  app.set_help_flag("--help", "print help");  // keep --h free for the bound
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "decide an instance file");
  std::string solve_path, solve_algo = "flow", solve_sched;
  std::int64_t solve_budget = 80000000;
  bool solve_decision_only = false;
  solve->add_option("instance", solve_path, "instance file")->required();
  solve->add_option("--algo", solve_algo,
                    "flow | fpt-kh | xp-k | star | oracle | approx");
  solve->add_option("--schedule", solve_sched, "write the witness here");
  solve->add_option("--budget", solve_budget, "search node budget");
  solve->add_flag("--decision-only", solve_decision_only,
                  "skip witness construction");

  auto* validate = app.add_subcommand("validate", "check a schedule file");
  std::string val_inst, val_sched;
  validate->add_option("instance", val_inst)->required();
  validate->add_option("schedule", val_sched)->required();

  auto* approx = app.add_subcommand("approx", "approximate the walk count");
  std::string approx_path, approx_sched;
  approx->add_option("instance", approx_path)->required();
  approx->add_option("--schedule", approx_sched, "write the schedule here");

  auto* oracle = app.add_subcommand("oracle", "exhaustive baseline decision");
  std::string oracle_path;
  OracleCaps caps;
  oracle->add_option("instance", oracle_path)->required();
  oracle->add_option("--max-n", caps.max_n);
  oracle->add_option("--max-lifetime", caps.max_lambda);
  oracle->add_option("--max-demands", caps.max_demands);
  oracle->add_option("--max-k", caps.max_k);

  auto* gen = app.add_subcommand("gen", "generate labeled instances");
  gen->require_subcommand(1);
  std::string gen_out = "instance.tedsc";
  bool gen_json = false;

  auto* gen_sat = gen->add_subcommand("sat", "from a 3-CNF formula");
  std::string sat_cnf, sat_variant = "lifespan";
  gen_sat->add_option("--cnf", sat_cnf, "DIMACS file")->required();
  gen_sat->add_option("--variant", sat_variant, "length | lifespan");
  gen_sat->add_option("--out", gen_out);
  gen_sat->add_flag("--json", gen_json);

  auto* gen_edp = gen->add_subcommand("edp", "from disjoint paths on a DAG");
  std::string edp_file, edp_variant = "length";
  gen_edp->add_option("--dag", edp_file, "n/edge/pair file")->required();
  gen_edp->add_option("--variant", edp_variant, "length | lifespan");
  gen_edp->add_option("--out", gen_out);
  gen_edp->add_flag("--json", gen_json);

  auto* gen_bp = gen->add_subcommand("binpack", "from unary bin packing");
  std::vector<std::int64_t> bp_sizes;
  int bp_bins = 2;
  std::int64_t bp_cap = 3;
  gen_bp->add_option("--sizes", bp_sizes, "item sizes")
      ->required()
      ->delimiter(',');
  gen_bp->add_option("--bins", bp_bins)->required();
  gen_bp->add_option("--cap", bp_cap)->required();
  gen_bp->add_option("--out", gen_out);
  gen_bp->add_flag("--json", gen_json);

  auto* gen_rand = gen->add_subcommand("random", "seeded uniform instance");
  RandomSpec rand_spec;
  std::string rand_variant = "unconstrained";
  std::int64_t rand_h = -1;
  gen_rand->add_option("--n", rand_spec.n);
  gen_rand->add_option("--m", rand_spec.m);
  gen_rand->add_option("--demands", rand_spec.demands);
  gen_rand->add_option("--lam", rand_spec.lambda, "latest demand time");
  gen_rand->add_option("--k", rand_spec.k);
  gen_rand->add_option("--h", rand_h);
  gen_rand->add_option("--variant", rand_variant);
  gen_rand->add_option("--seed", rand_spec.seed)->required();
  gen_rand->add_option("--out", gen_out);
  gen_rand->add_flag("--json", gen_json);

  auto* bench = app.add_subcommand("bench", "cross-solver agreement sweep");
  std::string bench_corpus = "small";
  bench->add_option("--corpus", bench_corpus, "small | medium");

  auto* dump = app.add_subcommand("dump", "print the layered network");
  std::string dump_path;
  std::int64_t dump_gamma = -1;
  bool dump_inout = false;
  dump->add_option("instance", dump_path)->required();
  dump->add_option("--gamma", dump_gamma,
                   "gap threshold; defaults to n + 2k, 0 for uncompressed");
  dump->add_flag("--inout", dump_inout, "in-out expansion instead");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      Instance inst = load_instance(solve_path);
      Decision d = dispatch(inst, solve_algo, solve_budget, solve_decision_only);
      return emit_decision(d, solve_sched);
    }
    if (validate->parsed()) {
      Instance inst = load_instance(val_inst);
      std::ifstream in(val_sched);
      if (!in) throw StructuralError("cannot open '" + val_sched + "'");
      Schedule sched = parse_schedule(in);
      ValidationReport rep = validate_schedule(inst, sched);
      if (rep.ok()) {
        std::cout << "valid\n";
        return kExitYes;
      }
      std::cout << "invalid: " << rep.first_failure() << "\n";
      return kExitNo;
    }
    if (approx->parsed()) {
      Instance inst = load_instance(approx_path);
      if (!inst.constrained()) {
        std::cerr << "approx needs a constrained instance\n";
        return kExitUsage;
      }
      ApproxResult res =
          approx_min_walks(inst.graph, inst.demands, *inst.h, inst.variant);
      std::cout << "k*=" << res.k_star << ", |S|=" << res.schedule.size()
                << ", bound=" << res.size_bound(*inst.h) << "\n";
      if (!approx_sched.empty())
        save_text(approx_sched, serialize_schedule(res.schedule));
      return kExitYes;
    }
    if (oracle->parsed()) {
      Instance inst = load_instance(oracle_path);
      return emit_decision(oracle_decide(inst, caps), "");
    }
    if (gen->parsed()) {
      if (gen_sat->parsed()) {
        auto variant = variant_from_name(sat_variant);
        if (!variant || *variant == Variant::Unconstrained) {
          std::cerr << "variant must be length or lifespan\n";
          return kExitUsage;
        }
        write_generated(gen_from_3sat(parse_dimacs(sat_cnf), *variant),
                        gen_out, gen_json);
      } else if (gen_edp->parsed()) {
        auto variant = variant_from_name(edp_variant);
        if (!variant || *variant == Variant::Unconstrained) {
          std::cerr << "variant must be length or lifespan\n";
          return kExitUsage;
        }
        auto [dag, pairs] = parse_dag_file(edp_file);
        write_generated(gen_from_edp_dag(dag, pairs, *variant), gen_out,
                        gen_json);
      } else if (gen_bp->parsed()) {
        write_generated(gen_from_bin_packing(bp_sizes, bp_bins, bp_cap),
                        gen_out, gen_json);
      } else if (gen_rand->parsed()) {
        auto variant = variant_from_name(rand_variant);
        if (!variant) {
          std::cerr << "unknown variant\n";
          return kExitUsage;
        }
        rand_spec.variant = *variant;
        if (rand_h >= 0) rand_spec.h = rand_h;
        GeneratedInstance gi{gen_random(rand_spec), GroundTruth::Unknown};
        write_generated(gi, gen_out, gen_json);
      }
      return kExitYes;
    }
    if (bench->parsed()) return run_bench(bench_corpus);
    if (dump->parsed()) {
      Instance inst = load_instance(dump_path);
      PreDecision pre = preprocess(inst);
      const Instance& norm = pre.normalized ? *pre.normalized : inst;
      if (dump_inout) {
        std::int64_t gamma =
            dump_gamma > 0 ? dump_gamma
                           : std::max<std::int64_t>(
                                 1, (norm.graph.vertex_count() - 1) *
                                        std::max(norm.k, 1));
        std::cout << build_inout(norm, gamma).dump();
      } else {
        std::optional<std::int64_t> gamma;
        if (dump_gamma > 0)
          gamma = dump_gamma;
        else if (dump_gamma < 0)
          gamma = norm.graph.vertex_count() + 2 * norm.k;
        auto [net, gaps] = build_expansion(norm, ExpansionMode::SEHat, gamma);
        std::cout << net.dump();
      }
      return kExitYes;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const StructuralError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

#pragma once
// Text formats: the canonical line-oriented instance format (versioned
// header), its JSON mirror, the one-walk-per-line schedule format, and the
// ground-truth sidecar. Parsing reports line/column positions; serializing
// a parsed canonical file reproduces it byte for byte.

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tedsc/core.hpp"
#include "tedsc/generators.hpp"

namespace tedsc {

inline constexpr const char* kInstanceHeader = "TEDSC v1";

struct ParseError : StructuralError {
  int line, column;
  ParseError(int l, int c, const std::string& msg)
      : StructuralError("line " + std::to_string(l) + ", column " +
                        std::to_string(c) + ": " + msg),
        line(l),
        column(c) {}
};

namespace io_detail {

struct LineLexer {
  std::string text;
  int line_no;
  std::size_t at = 0;

  void skip_spaces() {
    while (at < text.size() && text[at] == ' ') ++at;
  }
  bool done() {
    skip_spaces();
    return at >= text.size();
  }
  int column() const { return static_cast<int>(at) + 1; }

  std::string word() {
    skip_spaces();
    std::size_t start = at;
    while (at < text.size() && text[at] != ' ') ++at;
    if (start == at) throw ParseError(line_no, column(), "expected a token");
    return text.substr(start, at - start);
  }

  std::int64_t integer(const char* what) {
    skip_spaces();
    int col = column();
    std::string w = word();
    try {
      std::size_t used = 0;
      std::int64_t v = std::stoll(w, &used);
      if (used != w.size()) throw std::invalid_argument(w);
      return v;
    } catch (const std::exception&) {
      throw ParseError(line_no, col, std::string("expected ") + what +
                                         ", got '" + w + "'");
    }
  }
};

}  // namespace io_detail

// Canonical text format:
//   TEDSC v1
//   n <count>
//   edge <u> <v>
//   demand <u> <v> <t>
//   param k <int>
//   param h <int|none>
//   param variant <unconstrained|length|lifespan>
// Vertices are implicit 0-based ids; isolated ones are stripped on load
// with the remap recorded on the instance.
inline Instance parse_instance(std::istream& in) {
  std::string line;
  int line_no = 0;
  int n = -1;
  std::vector<std::pair<Vertex, Vertex>> edges;
  std::vector<Demand> demands;
  std::optional<int> k;
  std::optional<Time> h;
  bool h_seen = false;
  std::optional<Variant> variant;

  if (!std::getline(in, line)) throw ParseError(1, 1, "empty input");
  ++line_no;
  if (line != kInstanceHeader)
    throw ParseError(1, 1, std::string("expected header '") + kInstanceHeader +
                               "'");
  while (std::getline(in, line)) {
    ++line_no;
    io_detail::LineLexer lex{line, line_no};
    if (lex.done()) continue;
    std::string head = lex.word();
    if (head == "n") {
      n = static_cast<int>(lex.integer("a vertex count"));
    } else if (head == "edge") {
      int u = static_cast<int>(lex.integer("a vertex id"));
      int v = static_cast<int>(lex.integer("a vertex id"));
      edges.emplace_back(u, v);
    } else if (head == "demand") {
      int u = static_cast<int>(lex.integer("a vertex id"));
      int v = static_cast<int>(lex.integer("a vertex id"));
      Time t = lex.integer("a time step");
      demands.push_back({u, v, t});
    } else if (head == "param") {
      int col = lex.column();
      std::string name = lex.word();
      if (name == "k") {
        k = static_cast<int>(lex.integer("an integer"));
      } else if (name == "h") {
        int vcol = lex.column();
        std::string w = lex.word();
        h_seen = true;
        if (w != "none") {
          try {
            h = std::stoll(w);
          } catch (const std::exception&) {
            throw ParseError(line_no, vcol, "expected an integer or 'none'");
          }
        }
      } else if (name == "variant") {
        int vcol = lex.column();
        std::string w = lex.word();
        variant = variant_from_name(w);
        if (!variant)
          throw ParseError(line_no, vcol, "unknown variant '" + w + "'");
      } else {
        throw ParseError(line_no, col, "unknown parameter '" + name + "'");
      }
    } else {
      throw ParseError(line_no, 1, "unknown directive '" + head + "'");
    }
    if (!lex.done())
      throw ParseError(line_no, lex.column(), "trailing input");
  }
  if (n < 0) throw ParseError(line_no, 1, "missing vertex count");
  if (!k) throw ParseError(line_no, 1, "missing param k");
  if (!h_seen) throw ParseError(line_no, 1, "missing param h");
  if (!variant) throw ParseError(line_no, 1, "missing param variant");

  for (auto [u, v] : edges)
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw ParseError(line_no, 1, "edge endpoint out of range");
  std::vector<int> remap;
  DirectedGraph g = strip_isolated(n, edges, &remap);
  std::vector<int> newid(static_cast<std::size_t>(n), -1);
  for (std::size_t i = 0; i < remap.size(); ++i)
    newid[static_cast<std::size_t>(remap[i])] = static_cast<int>(i);
  for (Demand& d : demands) {
    if (d.u < 0 || d.u >= n || d.v < 0 || d.v >= n)
      throw ParseError(line_no, 1, "demand endpoint out of range");
    d.u = newid[static_cast<std::size_t>(d.u)];
    d.v = newid[static_cast<std::size_t>(d.v)];
  }
  Instance inst = make_instance(std::move(g), std::move(demands), *k, h,
                                *variant);
  if (static_cast<int>(remap.size()) != n) inst.vertex_remap = remap;
  return inst;
}

inline std::string serialize_instance(const Instance& inst) {
  std::ostringstream os;
  os << kInstanceHeader << "\n";
  os << "n " << inst.graph.vertex_count() << "\n";
  for (auto [u, v] : inst.graph.edges()) os << "edge " << u << " " << v << "\n";
  for (const Demand& d : inst.demands)
    os << "demand " << d.u << " " << d.v << " " << d.t << "\n";
  os << "param k " << inst.k << "\n";
  os << "param h ";
  if (inst.h)
    os << *inst.h << "\n";
  else
    os << "none\n";
  os << "param variant " << variant_name(inst.variant) << "\n";
  return os.str();
}

// JSON mirror of the same data.
inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json j;
  j["format"] = kInstanceHeader;
  j["n"] = inst.graph.vertex_count();
  j["edges"] = nlohmann::json::array();
  for (auto [u, v] : inst.graph.edges()) j["edges"].push_back({u, v});
  j["demands"] = nlohmann::json::array();
  for (const Demand& d : inst.demands) j["demands"].push_back({d.u, d.v, d.t});
  j["k"] = inst.k;
  if (inst.h)
    j["h"] = *inst.h;
  else
    j["h"] = nullptr;
  j["variant"] = variant_name(inst.variant);
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
  try {
    int n = j.at("n").get<int>();
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (const auto& e : j.at("edges"))
      edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    std::vector<Demand> demands;
    for (const auto& d : j.at("demands"))
      demands.push_back({d.at(0).get<int>(), d.at(1).get<int>(),
                         d.at(2).get<Time>()});
    std::optional<Time> h;
    if (!j.at("h").is_null()) h = j.at("h").get<Time>();
    auto variant = variant_from_name(j.at("variant").get<std::string>());
    if (!variant) throw StructuralError("unknown variant");
    for (auto [u, v] : edges)
      if (u < 0 || u >= n || v < 0 || v >= n)
        throw StructuralError("edge endpoint out of range");
    std::vector<int> remap;
    DirectedGraph g = strip_isolated(n, edges, &remap);
    std::vector<int> newid(static_cast<std::size_t>(n), -1);
    for (std::size_t i = 0; i < remap.size(); ++i)
      newid[static_cast<std::size_t>(remap[i])] = static_cast<int>(i);
    for (Demand& d : demands) {
      if (d.u < 0 || d.u >= n || d.v < 0 || d.v >= n)
        throw StructuralError("demand endpoint out of range");
      d.u = newid[static_cast<std::size_t>(d.u)];
      d.v = newid[static_cast<std::size_t>(d.v)];
    }
    Instance inst = make_instance(std::move(g), std::move(demands),
                                  j.at("k").get<int>(), h, *variant);
    if (static_cast<int>(remap.size()) != n) inst.vertex_remap = remap;
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("malformed instance json: ") + e.what());
  }
}

// Schedule format: one walk per line as (v,t) pairs in expanded form.
inline std::string serialize_schedule(const Schedule& sched) {
  std::ostringstream os;
  for (const TemporalWalk& w : sched) {
    bool first = true;
    for (auto [v, t] : w.entries()) {
      if (!first) os << " ";
      first = false;
      os << "(" << v << "," << t << ")";
    }
    os << "\n";
  }
  return os.str();
}

inline Schedule parse_schedule(std::istream& in) {
  Schedule out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::pair<Vertex, Time>> entries;
    std::size_t at = 0;
    while (at < line.size()) {
      while (at < line.size() && line[at] == ' ') ++at;
      if (at >= line.size()) break;
      if (line[at] != '(')
        throw ParseError(line_no, static_cast<int>(at) + 1, "expected '('");
      std::size_t comma = line.find(',', at);
      std::size_t close = line.find(')', at);
      if (comma == std::string::npos || close == std::string::npos ||
          comma > close)
        throw ParseError(line_no, static_cast<int>(at) + 1,
                         "expected '(vertex,time)'");
      try {
        Vertex v = std::stoi(line.substr(at + 1, comma - at - 1));
        Time t = std::stoll(line.substr(comma + 1, close - comma - 1));
        entries.emplace_back(v, t);
      } catch (const std::exception&) {
        throw ParseError(line_no, static_cast<int>(at) + 1,
                         "bad vertex or time");
      }
      at = close + 1;
    }
    if (!entries.empty()) out.push_back(TemporalWalk(std::move(entries)));
  }
  return out;
}

// Ground-truth sidecar: a single line `truth <feasible|infeasible|unknown>`.
inline std::string serialize_truth(GroundTruth t) {
  return std::string("truth ") + ground_truth_name(t) + "\n";
}

inline GroundTruth parse_truth(std::istream& in) {
  std::string word, value;
  if (!(in >> word >> value) || word != "truth")
    throw ParseError(1, 1, "expected 'truth <value>'");
  if (value == "feasible") return GroundTruth::Feasible;
  if (value == "infeasible") return GroundTruth::Infeasible;
  if (value == "unknown") return GroundTruth::Unknown;
  throw ParseError(1, 7, "unknown truth value '" + value + "'");
}

// File helpers; .json files take the JSON mirror.
inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open '" + path + "'");
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw StructuralError(std::string("malformed json: ") + e.what());
    }
    return instance_from_json(j);
  }
  return parse_instance(in);
}

inline void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw StructuralError("cannot write '" + path + "'");
  out << text;
}

}  // namespace tedsc

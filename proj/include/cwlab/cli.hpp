#pragma once

// Command implementations behind the cwlab executable. Every command maps a
// RunConfig to output text and an exit code, so tests can drive them
// without spawning a process.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cwlab/certificate.hpp"
#include "cwlab/compiler.hpp"
#include "cwlab/error.hpp"
#include "cwlab/exact.hpp"
#include "cwlab/expr.hpp"
#include "cwlab/graph.hpp"
#include "cwlab/vertex_minor.hpp"
#include "cwlab/word.hpp"

namespace cwlab::cli {

inline constexpr std::uint64_t kDefaultSeed = 20240607;

struct RunConfig {
  std::string command;
  std::string word;
  std::string rows;  // count "4", range "2..5" or list "1,3,4"
  std::string cols;  // range "1..6"
  std::vector<int> n;
  int k = 0;
  int t = 0;
  std::string target;  // F or X
  std::vector<int> lengths;
  std::string expr;
  std::string expr_file;
  std::string graph_file;
  std::string format = "json";  // json, dot, csv, md
  std::string out;
  std::string dot_dir;
  std::string table = "widths";  // widths, distinctness, reductions
  bool sample = false;
  int host = 8;
  std::size_t size = 12;
  std::uint64_t seed = kDefaultSeed;
  int max_k = 12;
  double time_cap = 60.0;
};

struct RunResult {
  int exit_code = 0;
  std::string output;
};

namespace detail {

inline int parse_int(std::string_view s, const std::string& what) {
  int v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ParseError("bad integer '" + std::string(s) + "' in " + what,
                     static_cast<std::size_t>(r.ptr - s.data()));
  }
  return v;
}

inline std::pair<int, int> parse_range(const std::string& s, const std::string& what) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    const int v = parse_int(s, what);
    return {v, v};
  }
  return {parse_int(std::string_view(s).substr(0, dots), what),
          parse_int(std::string_view(s).substr(dots + 2), what)};
}

inline std::vector<int> parse_rows(const std::string& s) {
  if (s.empty()) throw PreconditionError("--rows is required");
  if (s.find("..") != std::string::npos) {
    auto [a, b] = parse_range(s, "--rows");
    return row_range(a, b);
  }
  if (s.find(',') != std::string::npos) {
    std::vector<int> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_int(item, "--rows"));
    return out;
  }
  return row_range(1, parse_int(s, "--rows"));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline WordSpec word_of(const RunConfig& c) {
  if (c.word.empty()) throw PreconditionError("--word is required");
  return WordSpec::parse(c.word);
}

inline GridGraph window_of(const RunConfig& c) {
  const WordSpec w = word_of(c);
  if (c.cols.empty()) throw PreconditionError("--cols is required");
  auto [a, b] = parse_range(c.cols, "--cols");
  return build_window(w, parse_rows(c.rows), a, b);
}

// Graph from --graph, else from the window flags.
inline Graph graph_of(const RunConfig& c) {
  if (!c.graph_file.empty()) return graph_from_json(nlohmann::json::parse(read_file(c.graph_file)));
  return window_of(c).graph;
}

inline CwExpr expr_of(const RunConfig& c) {
  if (!c.expr.empty()) return parse_expr(c.expr);
  if (!c.expr_file.empty()) return parse_expr(read_file(c.expr_file));
  throw PreconditionError("--expr or --expr-file is required");
}

inline SearchBudget budget_of(const RunConfig& c) {
  SearchBudget b;
  b.max_k = c.max_k;
  b.time_cap = c.time_cap;
  if (const char* env = std::getenv("CWLAB_TIME_CAP")) b.time_cap = std::atof(env);
  return b;
}

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline std::string graph_output(const Graph& g, const std::string& format) {
  if (format == "dot") return graph_to_dot(g);
  if (format == "json") return dump(graph_to_json(g));
  throw PreconditionError("format '" + format + "' is not available here");
}

inline std::string cell(const std::optional<std::size_t>& v) {
  return v ? std::to_string(*v) : std::string("budget");
}

inline std::string table_output(const std::vector<std::string>& header,
                                const std::vector<std::vector<std::string>>& rows,
                                const std::string& format) {
  std::string out;
  if (format == "md") {
    auto line = [&out](const std::vector<std::string>& r) {
      out += "|";
      for (const auto& x : r) out += " " + x + " |";
      out += "\n";
    };
    line(header);
    out += "|";
    for (std::size_t i = 0; i < header.size(); ++i) out += "---|";
    out += "\n";
    for (const auto& r : rows) line(r);
    return out;
  }
  if (format != "csv") throw PreconditionError("tables are written as csv or md");
  auto line = [&out](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
    out += "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

}  // namespace detail

inline RunResult cmd_build(const RunConfig& c) {
  if (c.k > 0 || c.t > 0) {
    return {0, detail::graph_output(build_H(detail::word_of(c), c.k, c.t).graph, c.format)};
  }
  return {0, detail::graph_output(detail::window_of(c).graph, c.format)};
}

inline RunResult cmd_eval_expr(const RunConfig& c) {
  const CwExpr e = detail::expr_of(c);
  const LabeledGraph lg = eval(e);
  if (c.format == "dot") return {0, graph_to_dot(lg.graph)};
  nlohmann::json j;
  j["graph"] = graph_to_json(lg.graph);
  j["labels"] = lg.labels;
  j["labels_used"] = labels_used(e);
  j["linear"] = is_linear(e);
  j["max_live"] = max_live_labels(e);
  return {0, detail::dump(j)};
}

inline RunResult cmd_check_expr(const RunConfig& c) {
  const CwExpr e = detail::expr_of(c);
  const Graph g = detail::graph_of(c);
  nlohmann::json j;
  j["defines"] = defines(e, g);
  j["labels_used"] = labels_used(e);
  j["linear"] = is_linear(e);
  j["max_live"] = max_live_labels(e);
  return {j["defines"].get<bool>() ? 0 : 1, detail::dump(j)};
}

inline RunResult cmd_exact(const RunConfig& c, bool linear) {
  const Graph g = detail::graph_of(c);
  const auto res = linear ? exact_lcwd(g, detail::budget_of(c)) : exact_cwd(g, detail::budget_of(c));
  if (!res) {
    throw BudgetExceeded("no proven value within max_k = " + std::to_string(c.max_k) +
                         " and the time cap");
  }
  nlohmann::json j;
  j[linear ? "lcwd" : "cwd"] = res->width;
  j["witness"] = print(res->witness);
  j["nodes"] = res->nodes;
  j["vertices"] = g.size();
  return {0, detail::dump(j)};
}

inline RunResult cmd_compile(const RunConfig& c) {
  nlohmann::json j;
  Composition comp;
  std::optional<std::size_t> bound;
  if (c.sample || (!c.graph_file.empty() && c.k > 0)) {
    const WordSpec w = detail::word_of(c);
    if (c.k < 1) throw PreconditionError("--k is required");
    const Graph g = c.sample ? sample_h_free(w, c.k, c.host, c.size, c.seed)
                             : detail::graph_of(c);
    const auto lay = make_layout(w, g, c.k, c.host);
    const auto sc = compile_subclass_graph(lay, true);
    comp = sc.composition;
    bound = static_cast<std::size_t>((4 * c.k - 2) * (8 * c.k + 1));
    j["mode"] = "subclass";
    j["vertices"] = g.size();
    j["host_n"] = lay.n;
    j["max_part_labels"] = sc.max_part_labels;
    j["boundary"] = sc.partition.boundary.size();
    j["max_full_rows"] = sc.partition.full_rows_max;
    if (c.sample) j["graph"] = graph_to_json(g);
  } else if (!c.graph_file.empty()) {
    const Graph g = detail::graph_of(c);
    j["mode"] = "graph";
    if (g.size() == 1) {
      comp.expr = CwExpr::create(1, g.vertices().front());
      comp.report = {1, 1, 2, 1, 1, 1, 1, 1, true, true};
    } else {
      comp = compile_rows(g);
    }
  } else {
    if (c.k < 1 || c.t < 1) throw PreconditionError("--k and --t are required");
    const GridGraph h = build_H(detail::word_of(c), c.k, c.t);
    comp = compile_window(h);
    bound = static_cast<std::size_t>(4 * c.t);
    j["mode"] = "window";
  }
  j["expr"] = print(comp.expr);
  j["report"] = report_to_json(comp.report);
  bool ok = comp.report.defines && comp.report.linear && comp.report.labels <= comp.report.bound &&
            comp.report.max_live <= comp.report.bound;
  if (bound) {
    j["bound"] = *bound;
    ok = ok && comp.report.labels <= *bound;
  }
  j["within_bound"] = ok;
  return {ok ? 0 : 1, detail::dump(j)};
}

inline RunResult cmd_reduce(const RunConfig& c) {
  if (c.target != "F" && c.target != "X") throw PreconditionError("--target must be F or X");
  if (c.n.size() != 1) throw PreconditionError("--n takes one value here");
  std::optional<std::size_t> rows;
  if (!c.rows.empty()) rows = detail::parse_rows(c.rows).size();
  const auto tr = reduce_to_target(detail::word_of(c), c.target == "F" ? Target::F : Target::X,
                                   c.n.front(), rows);
  if (!c.dot_dir.empty()) {
    std::filesystem::create_directories(c.dot_dir);
    GridGraph w = tr.initial;
    auto frame = [&](std::size_t i, const Graph& g) {
      std::ofstream f(std::filesystem::path(c.dot_dir) / ("frame" + std::to_string(i) + ".dot"));
      f << graph_to_dot(g, "frame" + std::to_string(i));
    };
    frame(0, w.graph);
    for (std::size_t i = 0; i < tr.steps.size(); ++i) {
      w = apply_step(w, tr.steps[i]);
      frame(i + 1, w.graph);
    }
    frame(tr.steps.size() + 1, tr.final_graph.graph);
  }
  return {tr.matches_target ? 0 : 1, detail::dump(trace_to_json(tr))};
}

inline RunResult cmd_certify(const RunConfig& c) {
  const CwExpr e = detail::expr_of(c);
  std::optional<FWindow> window;
  if (!c.n.empty()) window = f_window(c.n.front());
  const Certificate cert = certify(e, window);
  const auto j = certificate_to_json(cert);
  return {j["verdict"] == "pass" ? 0 : 1, detail::dump(j)};
}

inline RunResult cmd_find_cycle(const RunConfig& c) {
  const Graph g = detail::graph_of(c);
  if (c.lengths.empty()) throw PreconditionError("--length is required");
  nlohmann::json j = nlohmann::json::array();
  for (int len : c.lengths) {
    SearchLimits limits;
    limits.max_vertices = std::max(limits.max_vertices, g.size());
    const auto cyc = find_induced_cycle(g, static_cast<std::size_t>(len), limits);
    nlohmann::json r;
    r["length"] = len;
    r["found"] = cyc.has_value();
    r["cycle"] = cyc ? nlohmann::json(*cyc) : nlohmann::json(nullptr);
    j.push_back(r);
  }
  return {0, detail::dump(j)};
}

namespace detail {

inline std::vector<std::vector<std::string>> widths_rows(const RunConfig& c) {
  std::vector<std::vector<std::string>> rows;
  for (int n : c.n) {
    const GridGraph f = build_F(n);
    std::optional<std::size_t> cwd;
    try {
      if (f.graph.size() <= 20) {
        if (auto r = exact_cwd(f.graph, budget_of(c))) cwd = static_cast<std::size_t>(r->width);
      }
    } catch (const BudgetExceeded&) {
    }
    const auto comp = compile_window(f);
    rows.push_back({std::to_string(n), cell(cwd), std::to_string(n / 2),
                    std::to_string(comp.report.labels), std::to_string(4 * n)});
  }
  return rows;
}

inline std::vector<std::vector<std::string>> reductions_rows(const RunConfig& c) {
  std::vector<std::pair<std::string, Target>> routes;
  if (!c.word.empty()) {
    routes.emplace_back(c.word, c.target == "X" ? Target::X : Target::F);
  } else {
    routes = {{"|01", Target::F}, {"|02", Target::X}, {"|212", Target::X}};
  }
  std::vector<std::vector<std::string>> rows;
  for (int n : c.n) {
    for (const auto& [w, t] : routes) {
      std::vector<std::string> r{w, t == Target::F ? "F" : "X", std::to_string(n)};
      try {
        const auto tr = reduce_to_target(WordSpec::parse(w), t, n);
        r.insert(r.end(), {std::to_string(tr.row_budget), std::to_string(tr.initial.rows.size()),
                           std::to_string(tr.reduced.rows.size()), std::to_string(tr.steps.size()),
                           tr.matches_target ? "yes" : "no"});
      } catch (const Error& e) {
        r.insert(r.end(), {"-", "-", "-", "-", e.kind()});
      }
      rows.push_back(r);
    }
  }
  return rows;
}

inline std::vector<std::vector<std::string>> distinctness_rows(const RunConfig& c) {
  struct Probe {
    std::string word;
    int rows, cols, start;
    std::size_t length;
  };
  std::vector<Probe> probes;
  if (!c.word.empty()) {
    auto [a, b] = parse_range(c.cols.empty() ? "1..8" : c.cols, "--cols");
    const int nrows = static_cast<int>(parse_rows(c.rows.empty() ? "6" : c.rows).size());
    for (int len : c.lengths) probes.push_back({c.word, nrows, b - a + 1, a, static_cast<std::size_t>(len)});
  } else {
    probes = {{"|01", 6, 8, 1, 6}, {"|001", 6, 12, 1, 6}, {"|001", 6, 12, 2, 6},
              {"|001", 6, 12, 3, 6}, {"|001", 6, 12, 1, 8}};
  }
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : probes) {
    const GridGraph w = build_window(WordSpec::parse(p.word), row_range(1, p.rows), p.start,
                                     p.start + p.cols - 1);
    SearchLimits limits;
    limits.max_vertices = std::max(limits.max_vertices, w.graph.size());
    std::string found, witness;
    try {
      const auto cyc = find_induced_cycle(w.graph, p.length, limits);
      found = cyc ? "yes" : "no";
      if (cyc) {
        for (std::size_t i = 0; i < cyc->size(); ++i) witness += (i ? " " : "") + (*cyc)[i];
      }
    } catch (const BudgetExceeded&) {
      found = "budget";
    }
    rows.push_back({p.word, std::to_string(p.rows) + "x" + std::to_string(p.cols),
                    std::to_string(p.start), "C" + std::to_string(p.length), found, witness});
  }
  return rows;
}

}  // namespace detail

inline RunResult cmd_report(const RunConfig& c) {
  const std::string format = c.format == "json" ? "csv" : c.format;
  if (c.table == "widths") {
    return {0, detail::table_output({"n", "cwd_F", "floor_n_2", "compiler_labels", "bound_4t"},
                                    detail::widths_rows(c), format)};
  }
  if (c.table == "reductions") {
    return {0, detail::table_output({"word", "target", "n", "row_budget", "rows_initial",
                                     "rows_remaining", "steps", "match"},
                                    detail::reductions_rows(c), format)};
  }
  if (c.table == "distinctness") {
    return {0, detail::table_output({"word", "window", "start_column", "cycle", "found", "witness"},
                                    detail::distinctness_rows(c), format)};
  }
  throw PreconditionError("unknown table '" + c.table + "'");
}

inline std::string error_object(const std::string& kind, const std::string& message) {
  return detail::dump({{"error", {{"kind", kind}, {"message", message}}}});
}

/// Dispatches on c.command. Library errors become a JSON error object with
/// exit code 2 (3 for budget exhaustion).
inline RunResult run(const RunConfig& c) {
  try {
    if (c.command == "build") return cmd_build(c);
    if (c.command == "eval-expr") return cmd_eval_expr(c);
    if (c.command == "check-expr") return cmd_check_expr(c);
    if (c.command == "exact-cw") return cmd_exact(c, false);
    if (c.command == "exact-lcw") return cmd_exact(c, true);
    if (c.command == "compile") return cmd_compile(c);
    if (c.command == "reduce") return cmd_reduce(c);
    if (c.command == "certify") return cmd_certify(c);
    if (c.command == "find-cycle") return cmd_find_cycle(c);
    if (c.command == "report") return cmd_report(c);
    return {2, error_object("usage", "unknown command '" + c.command + "'")};
  } catch (const BudgetExceeded& e) {
    return {3, error_object(e.kind(), e.what())};
  } catch (const Error& e) {
    return {2, error_object(e.kind(), e.what())};
  } catch (const nlohmann::json::exception& e) {
    return {2, error_object("parse", e.what())};
  } catch (const std::exception& e) {
    return {2, error_object("internal", e.what())};
  }
}

}  // namespace cwlab::cli

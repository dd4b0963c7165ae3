#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cwlab/cli.hpp"

namespace {

using cwlab::cli::RunConfig;

void window_flags(CLI::App* app, RunConfig& c) {
  app->add_option("--word", c.word, "word as prefix|period, e.g. \"|01\"");
  app->add_option("--rows", c.rows, "row count, range a..b or list a,b,c");
  app->add_option("--cols", c.cols, "column range a..b");
  app->add_option("--graph", c.graph_file, "graph JSON file");
}

void expr_flags(CLI::App* app, RunConfig& c) {
  app->add_option("--expr", c.expr, "expression text");
  app->add_option("--expr-file", c.expr_file, "file holding an expression");
}

void budget_flags(CLI::App* app, RunConfig& c) {
  app->add_option("--max-k", c.max_k, "largest width tried");
  app->add_option("--time-cap", c.time_cap, "seconds (CWLAB_TIME_CAP overrides)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cwlab: clique-width experiments on grid-like graph classes"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig c;
  app.add_option("--out", c.out, "write output to this file instead of stdout");
  app.add_option("--format", c.format, "json, dot, csv or md");

  auto* build = app.add_subcommand("build", "build a window of P^alpha (or H_{k,t})");
  window_flags(build, c);
  build->add_option("--k", c.k, "rows of H_{k,t}");
  build->add_option("--t", c.t, "columns of H_{k,t}");

  auto* eval_expr = app.add_subcommand("eval-expr", "evaluate an expression");
  expr_flags(eval_expr, c);

  auto* check_expr = app.add_subcommand("check-expr", "check that an expression defines a graph");
  expr_flags(check_expr, c);
  window_flags(check_expr, c);

  auto* exact_cw = app.add_subcommand("exact-cw", "exact clique-width");
  window_flags(exact_cw, c);
  budget_flags(exact_cw, c);

  auto* exact_lcw = app.add_subcommand("exact-lcw", "exact linear clique-width");
  window_flags(exact_lcw, c);
  budget_flags(exact_lcw, c);

  auto* compile = app.add_subcommand("compile", "linear expression within the constructive bounds");
  window_flags(compile, c);
  compile->add_option("--k", c.k, "rows of H_{k,t}, or the forbidden H_{k,k}");
  compile->add_option("--t", c.t, "columns of H_{k,t}");
  compile->add_flag("--sample", c.sample, "compile a seeded H_{k,k}-free sample");
  compile->add_option("--host", c.host, "host H_{n,n} size for samples");
  compile->add_option("--size", c.size, "vertices in a sample");
  compile->add_option("--seed", c.seed, "sampling seed");

  auto* reduce = app.add_subcommand("reduce", "vertex-minor reduction to F_{n,n} or X_{n,n}");
  reduce->add_option("--word", c.word, "word")->required();
  reduce->add_option("--target", c.target, "F or X")->required();
  reduce->add_option("--n", c.n, "target size")->required()->expected(1);
  reduce->add_option("--rows", c.rows, "row count (default: the row budget)");
  reduce->add_option("--dot-dir", c.dot_dir, "write a DOT frame per step here");

  auto* certify = app.add_subcommand("certify", "lower-bound certificate for F_{n,n}");
  expr_flags(certify, c);
  certify->add_option("--n", c.n, "window size (default: inferred from the tags)")->expected(1);

  auto* find_cycle = app.add_subcommand("find-cycle", "search an induced cycle");
  window_flags(find_cycle, c);
  find_cycle->add_option("--length", c.lengths, "cycle lengths")->required();

  auto* report = app.add_subcommand("report", "experiment tables");
  report->add_option("--table", c.table, "widths, distinctness or reductions");
  report->add_option("--n", c.n, "sizes");
  report->add_option("--word", c.word, "word (distinctness, reductions)");
  report->add_option("--target", c.target, "F or X (reductions)");
  report->add_option("--rows", c.rows, "rows (distinctness)");
  report->add_option("--cols", c.cols, "columns (distinctness)");
  report->add_option("--length", c.lengths, "cycle lengths (distinctness)");
  budget_flags(report, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cout << cwlab::cli::error_object("usage", e.what());
    return 2;
  }
  c.command = app.get_subcommands().front()->get_name();

  const auto result = cwlab::cli::run(c);
  if (!c.out.empty() && result.exit_code < 2) {
    std::ofstream f(c.out);
    f << result.output;
    if (!f) {
      std::cout << cwlab::cli::error_object("io", "cannot write '" + c.out + "'");
      return 2;
    }
  } else {
    std::cout << result.output;
  }
  return result.exit_code;
}

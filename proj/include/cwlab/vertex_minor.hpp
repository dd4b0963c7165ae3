#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cwlab/error.hpp"
#include "cwlab/graph.hpp"
#include "cwlab/word.hpp"

namespace cwlab {

/// Complements the subgraph induced by the neighbourhood of v.
inline Graph local_complement(const Graph& g, const VertexId& v) {
  const std::vector<VertexId> nb(g.neighbours(v).begin(), g.neighbours(v).end());
  Graph out = g;
  for (std::size_t a = 0; a < nb.size(); ++a) {
    for (std::size_t b = a + 1; b < nb.size(); ++b) out.toggle_edge(nb[a], nb[b]);
  }
  return out;
}

/// Pivot on the edge xy: local complementation at x, then y, then x.
inline Graph pivot(const Graph& g, const VertexId& x, const VertexId& y) {
  if (!g.adjacent(x, y)) throw PreconditionError(x + y + " is not an edge");
  return local_complement(local_complement(local_complement(g, x), y), x);
}

/// Exchanges the names of x and y.
inline Graph swap_vertices(const Graph& g, const VertexId& x, const VertexId& y) {
  auto name = [&](const VertexId& v) { return v == x ? y : v == y ? x : v; };
  Graph out;
  for (const auto& v : g.vertices()) out.add_vertex(name(v));
  for (const auto& [a, b] : g.edges()) out.add_edge(name(a), name(b));
  return out;
}

/// Bipartite form of the pivot: complement between N(x)\{y} and N(y)\{x}.
/// On a bipartite graph this is pivot(g, x, y) with x and y exchanged; the
/// two agree exactly once x and y are deleted.
inline Graph pivot_bipartite(const Graph& g, const VertexId& x, const VertexId& y) {
  if (!g.adjacent(x, y)) throw PreconditionError(x + y + " is not an edge");
  VertexSet nx = g.neighbours(x);
  VertexSet ny = g.neighbours(y);
  nx.erase(y);
  ny.erase(x);
  return bipartite_complement(g, nx, ny);
}

/// Rank over GF(2) of the S x (V \ S) adjacency matrix.
inline int cut_rank(const Graph& g, const VertexSet& s) {
  check_subset(g, s);
  std::vector<VertexId> other;
  for (const auto& v : g.vertices()) {
    if (!s.count(v)) other.push_back(v);
  }
  const std::size_t words = (other.size() + 63) / 64;
  std::vector<std::vector<std::uint64_t>> rows;
  for (const auto& u : s) {
    std::vector<std::uint64_t> r(words, 0);
    for (std::size_t c = 0; c < other.size(); ++c) {
      if (g.adjacent(u, other[c])) r[c / 64] |= std::uint64_t{1} << (c % 64);
    }
    rows.push_back(std::move(r));
  }
  int rank = 0;
  std::size_t next = 0;
  for (std::size_t c = 0; c < other.size() && next < rows.size(); ++c) {
    const std::uint64_t m = std::uint64_t{1} << (c % 64);
    std::size_t pivot_row = next;
    while (pivot_row < rows.size() && !(rows[pivot_row][c / 64] & m)) ++pivot_row;
    if (pivot_row == rows.size()) continue;
    std::swap(rows[next], rows[pivot_row]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != next && (rows[r][c / 64] & m)) {
        for (std::size_t w = 0; w < words; ++w) rows[r][w] ^= rows[next][w];
      }
    }
    ++next;
    ++rank;
  }
  return rank;
}

enum class StepKind { LC, Pivot, DeleteVertex, DeleteColumn, DeleteRows };
enum class Rewrite { None, F00, F01, F10, F02, F211, F212 };

inline std::string to_string(StepKind k) {
  switch (k) {
    case StepKind::LC: return "LC";
    case StepKind::Pivot: return "Pivot";
    case StepKind::DeleteVertex: return "DeleteVertex";
    case StepKind::DeleteColumn: return "DeleteColumn";
    case StepKind::DeleteRows: return "DeleteRows";
  }
  return "?";
}

inline std::string to_string(Rewrite r) {
  switch (r) {
    case Rewrite::None: return "none";
    case Rewrite::F00: return "00->0";
    case Rewrite::F01: return "01->1";
    case Rewrite::F10: return "10->1";
    case Rewrite::F02: return "02->2";
    case Rewrite::F211: return "211->200";
    case Rewrite::F212: return "212->202";
  }
  return "?";
}

/// One rewriting step on a window. A factor reduction bundles its local
/// complementations (or pivot) with the column and row deletions it needs.
struct ReductionStep {
  StepKind kind = StepKind::LC;
  Rewrite rewrite = Rewrite::None;
  int column = 0;                   // left column tag of the rewritten factor
  std::vector<VertexId> lc_order;   // LC kind
  VertexId pivot_x, pivot_y;        // Pivot kind
  std::optional<int> deleted_column;
  std::vector<int> deleted_rows;
  std::vector<VertexId> deleted_vertices;
  std::string word_before;
  std::string word_after;
  std::size_t rows_before = 0;
  std::size_t rows_after = 0;
};

/// Replays a step: graph operations first, then deletions. The window's
/// letters become `step.word_after`.
inline GridGraph apply_step(const GridGraph& w, const ReductionStep& step) {
  if (w.letters != step.word_before) {
    throw PreconditionError("step expects letters " + step.word_before + " but window has " +
                            w.letters);
  }
  GridGraph out = w;
  for (const auto& v : step.lc_order) out.graph = local_complement(out.graph, v);
  if (step.kind == StepKind::Pivot) out.graph = pivot(out.graph, step.pivot_x, step.pivot_y);
  if (step.deleted_column) {
    for (const auto& v : out.column(*step.deleted_column)) out.graph.remove_vertex(v);
    out.cols.erase(out.cols.begin() + static_cast<long>(out.col_position(*step.deleted_column)));
  }
  for (int r : step.deleted_rows) {
    auto it = std::find(out.rows.begin(), out.rows.end(), r);
    if (it == out.rows.end()) throw PreconditionError("row " + std::to_string(r) + " not present");
    for (const auto& v : out.row(r)) out.graph.remove_vertex(v);
    out.rows.erase(it);
  }
  for (const auto& v : step.deleted_vertices) out.graph.remove_vertex(v);
  out.letters = step.word_after;
  if (out.letters.size() + 1 != out.cols.size()) {
    throw InvariantViolation("letters and columns disagree after step");
  }
  return out;
}

namespace detail {

inline std::size_t factor_position(const GridGraph& w, int j, const std::string& factor) {
  const std::size_t p = w.col_position(j);
  if (p + factor.size() > w.letters.size() || w.letters.compare(p, factor.size(), factor) != 0) {
    throw PreconditionError("no factor " + factor + " at column " + std::to_string(j) +
                            " (letters " + w.letters + ")");
  }
  return p;
}

// LC at every vertex of the middle column (ascending rows), then delete it.
// The 0 letter at `zero` (p or p+1) disappears.
inline ReductionStep middle_column_step(const GridGraph& w, int j, std::size_t p, Rewrite r,
                                        std::size_t zero) {
  ReductionStep s;
  s.kind = StepKind::LC;
  s.rewrite = r;
  s.column = j;
  s.lc_order = w.column(w.cols[p + 1]);
  s.deleted_column = w.cols[p + 1];
  s.word_before = w.letters;
  s.word_after = w.letters;
  s.word_after.erase(zero, 1);
  s.rows_before = w.rows.size();
  s.rows_after = w.rows.size();
  return s;
}

inline ReductionStep pivot_step(const GridGraph& w, int j, std::size_t p, Rewrite r) {
  if (w.rows.size() < 3) throw PreconditionError("pivot reductions need at least 3 rows");
  ReductionStep s;
  s.kind = StepKind::Pivot;
  s.rewrite = r;
  s.column = j;
  s.pivot_x = grid_id(w.rows.front(), w.cols[p + 1]);
  s.pivot_y = grid_id(w.rows.back(), w.cols[p + 2]);
  if (!w.graph.adjacent(s.pivot_x, s.pivot_y)) {
    throw InvariantViolation("pivot pair " + s.pivot_x + s.pivot_y + " is not an edge");
  }
  s.deleted_rows = {w.rows.front(), w.rows.back()};
  s.word_before = w.letters;
  s.word_after = w.letters;
  s.word_after[p + 1] = '0';
  if (r == Rewrite::F211) s.word_after[p + 2] = '0';
  s.rows_before = w.rows.size();
  s.rows_after = w.rows.size() - 2;
  return s;
}

}  // namespace detail

using Reduced = std::pair<GridGraph, ReductionStep>;

/// 00 -> 0: LC on each vertex of the middle column, delete that column.
inline Reduced reduce_00(const GridGraph& w, int j) {
  const std::size_t p = detail::factor_position(w, j, "00");
  auto s = detail::middle_column_step(w, j, p, Rewrite::F00, p);
  return {apply_step(w, s), s};
}

/// 01 -> 1. The row count must be even so the right column stays independent.
inline Reduced reduce_01(const GridGraph& w, int j) {
  const std::size_t p = detail::factor_position(w, j, "01");
  if (w.rows.size() % 2 != 0) {
    throw PreconditionError("01 reduction needs an even number of rows, got " +
                            std::to_string(w.rows.size()));
  }
  auto s = detail::middle_column_step(w, j, p, Rewrite::F01, p);
  return {apply_step(w, s), s};
}

/// 10 -> 1, the mirror image of 01 -> 1; same parity requirement.
inline Reduced reduce_10(const GridGraph& w, int j) {
  const std::size_t p = detail::factor_position(w, j, "10");
  if (w.rows.size() % 2 != 0) {
    throw PreconditionError("10 reduction needs an even number of rows, got " +
                            std::to_string(w.rows.size()));
  }
  auto s = detail::middle_column_step(w, j, p, Rewrite::F10, p + 1);
  return {apply_step(w, s), s};
}

/// 02 -> 2. Keeps only the rows at even positions of the ordered row set.
inline Reduced reduce_02(const GridGraph& w, int j) {
  const std::size_t p = detail::factor_position(w, j, "02");
  if (w.rows.size() < 2) throw PreconditionError("02 reduction needs at least 2 rows");
  auto s = detail::middle_column_step(w, j, p, Rewrite::F02, p);
  for (std::size_t i = 0; i < w.rows.size(); i += 2) s.deleted_rows.push_back(w.rows[i]);
  s.rows_after = w.rows.size() - s.deleted_rows.size();
  return {apply_step(w, s), s};
}

/// 211 -> 200: pivot (first row of the second column, last row of the
/// third column), delete the first and last rows.
inline Reduced reduce_211(const GridGraph& w, int j) {
  const std::size_t p = detail::factor_position(w, j, "211");
  auto s = detail::pivot_step(w, j, p, Rewrite::F211);
  return {apply_step(w, s), s};
}

/// 212 -> 202 with the same pivot and row deletions.
inline Reduced reduce_212(const GridGraph& w, int j) {
  const std::size_t p = detail::factor_position(w, j, "212");
  auto s = detail::pivot_step(w, j, p, Rewrite::F212);
  return {apply_step(w, s), s};
}

/// Drops the given rows; the word is unchanged.
inline Reduced delete_rows(const GridGraph& w, std::vector<int> rows) {
  ReductionStep s;
  s.kind = StepKind::DeleteRows;
  s.deleted_rows = std::move(rows);
  s.word_before = w.letters;
  s.word_after = w.letters;
  s.rows_before = w.rows.size();
  s.rows_after = w.rows.size() - s.deleted_rows.size();
  return {apply_step(w, s), s};
}

enum class Target { F, X };

struct ReductionTrace {
  Target target = Target::F;
  int n = 0;
  WordSpec word;
  int first_column = 0;  // window columns first_column .. last_column
  int last_column = 0;
  std::size_t row_budget = 0;  // default row count for the target
  GridGraph initial;
  std::vector<ReductionStep> steps;
  GridGraph reduced;
  std::vector<int> kept_rows;  // extraction of the target from `reduced`
  std::vector<int> kept_cols;
  GridGraph final_graph;  // renumbered to rows/cols 1..n
  bool matches_target = false;
};

/// Replays all steps from the initial window.
inline GridGraph replay(const ReductionTrace& t) {
  GridGraph w = t.initial;
  for (const auto& s : t.steps) w = apply_step(w, s);
  return w;
}

inline std::size_t default_row_budget(Target target, int n, bool has_one) {
  const auto un = static_cast<std::size_t>(n);
  if (target == Target::F) return un % 2 == 0 ? un : un + 1;
  if (!has_one) return un << (un - 1);
  return (un << un) + un * un;
}

namespace detail {

// Leftmost factor starting and ending with the target letter and holding n
// of them; the F route may not cross a 2.
inline std::optional<std::pair<long, long>> find_factor(const WordSpec& ws, char t, int n) {
  const long horizon = static_cast<long>(ws.prefix().size() + ws.period().size());
  const long reach = horizon + static_cast<long>(n + 1) * static_cast<long>(ws.period().size());
  for (long s = 1; s <= horizon; ++s) {
    if (ws.letter(s) != t) continue;
    int count = 0;
    for (long e = s; e <= reach; ++e) {
      const char c = ws.letter(e);
      if (t == '1' && c == '2') break;
      if (c == t && ++count == n) return std::make_pair(s, e);
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Rewrites the window of `ws` by vertex-minor steps until its word is a
/// run of the target letter, then extracts F_{n,n} or X_{n,n}. `rows`
/// overrides the row count (default: the row budget).
inline ReductionTrace reduce_to_target(const WordSpec& ws, Target target, int n,
                                       std::optional<std::size_t> rows = std::nullopt) {
  if (n < 1) throw PreconditionError("n must be positive");
  const char t = target == Target::F ? '1' : '2';
  const auto factor = detail::find_factor(ws, t, n);
  if (!factor) {
    throw PreconditionError(std::string("target ") + (target == Target::F ? "F" : "X") +
                            " is unreachable for word " + ws.to_string());
  }
  ReductionTrace tr;
  tr.target = target;
  tr.n = n;
  tr.word = ws;
  tr.first_column = static_cast<int>(factor->first);
  tr.last_column = static_cast<int>(factor->second + 1);
  const std::string beta = ws.factor(factor->first, factor->second);
  tr.row_budget = default_row_budget(target, n, beta.find('1') != std::string::npos);
  const std::size_t row_count = rows.value_or(tr.row_budget);
  if (row_count < static_cast<std::size_t>(n)) {
    throw PreconditionError("insufficient rows: " + std::to_string(row_count) + " < " +
                            std::to_string(n));
  }
  tr.initial = build_window(ws, row_range(1, static_cast<int>(row_count)), tr.first_column,
                            tr.last_column);

  GridGraph w = tr.initial;
  auto push = [&](Reduced r) {
    w = std::move(r.first);
    tr.steps.push_back(std::move(r.second));
  };
  auto insufficient = [&](const std::string& why) {
    throw PreconditionError("insufficient rows: " + why + " with " +
                            std::to_string(w.rows.size()) + " rows left (letters " + w.letters +
                            ")");
  };
  for (;;) {
    bool applied = false;
    for (std::size_t p = 0; p < w.letters.size() && !applied; ++p) {
      const std::string rest = w.letters.substr(p);
      const int j = w.cols[p];
      if (rest.rfind("00", 0) == 0) {
        push(reduce_00(w, j));
      } else if (rest.rfind("01", 0) == 0) {
        if (w.rows.size() % 2 != 0) {
          if (w.rows.size() < 3) insufficient("01 reduction");
          push(delete_rows(w, {w.rows.back()}));
        }
        push(reduce_01(w, j));
      } else if (rest.rfind("102", 0) == 0) {
        // A 0 between a 1 and a 2 goes without halving the rows.
        if (w.rows.size() % 2 != 0) {
          if (w.rows.size() < 3) insufficient("10 reduction");
          push(delete_rows(w, {w.rows.back()}));
        }
        push(reduce_10(w, j));
      } else if (rest.rfind("02", 0) == 0) {
        if (w.rows.size() < 2) insufficient("02 reduction");
        push(reduce_02(w, j));
      } else if (rest.rfind("211", 0) == 0) {
        if (w.rows.size() < 3) insufficient("211 reduction");
        push(reduce_211(w, j));
      } else if (rest.rfind("212", 0) == 0) {
        if (w.rows.size() < 3) insufficient("212 reduction");
        push(reduce_212(w, j));
      } else {
        continue;
      }
      applied = true;
    }
    if (!applied) break;
  }
  tr.reduced = w;
  if (w.letters.find_first_not_of(t) != std::string::npos) {
    throw InvariantViolation("reduction stalled at letters " + w.letters);
  }
  if (w.rows.size() < static_cast<std::size_t>(n) || w.cols.size() < static_cast<std::size_t>(n)) {
    insufficient("extraction");
  }
  tr.kept_rows.assign(w.rows.begin(), w.rows.begin() + n);
  tr.kept_cols.assign(w.cols.begin(), w.cols.begin() + n);

  Graph renumbered;
  for (int c = 1; c <= n; ++c) {
    for (int r = 1; r <= n; ++r) renumbered.add_vertex(grid_id(r, c));
  }
  auto rpos = [&](int tag) {
    return static_cast<int>(std::find(tr.kept_rows.begin(), tr.kept_rows.end(), tag) -
                            tr.kept_rows.begin()) + 1;
  };
  auto cpos = [&](int tag) {
    return static_cast<int>(std::find(tr.kept_cols.begin(), tr.kept_cols.end(), tag) -
                            tr.kept_cols.begin()) + 1;
  };
  for (const auto& [u, v] : w.graph.edges()) {
    const GridTag a = *parse_grid_id(u);
    const GridTag b = *parse_grid_id(v);
    const int ra = rpos(a.row), ca = cpos(a.col), rb = rpos(b.row), cb = cpos(b.col);
    if (ra > n || ca > n || rb > n || cb > n) continue;
    renumbered.add_edge(grid_id(ra, ca), grid_id(rb, cb));
  }
  const WordSpec target_word("", std::string(1, t));
  tr.final_graph = GridGraph{target_word, row_range(1, n), row_range(1, n),
                             std::string(static_cast<std::size_t>(n - 1), t), renumbered};
  const GridGraph expected = target == Target::F ? build_F(n) : build_X(n);
  tr.matches_target = tr.final_graph.graph == expected.graph;
  return tr;
}

inline nlohmann::json step_to_json(const ReductionStep& s) {
  nlohmann::json j;
  j["kind"] = to_string(s.kind);
  j["rewrite"] = to_string(s.rewrite);
  j["column"] = s.column;
  if (!s.lc_order.empty()) j["lc_order"] = s.lc_order;
  if (s.kind == StepKind::Pivot) j["pivot"] = {s.pivot_x, s.pivot_y};
  if (s.deleted_column) j["deleted_column"] = *s.deleted_column;
  if (!s.deleted_rows.empty()) j["deleted_rows"] = s.deleted_rows;
  if (!s.deleted_vertices.empty()) j["deleted_vertices"] = s.deleted_vertices;
  j["word_before"] = s.word_before;
  j["word_after"] = s.word_after;
  j["rows_before"] = s.rows_before;
  j["rows_after"] = s.rows_after;
  return j;
}

inline nlohmann::json trace_to_json(const ReductionTrace& t) {
  nlohmann::json j;
  j["word"] = t.word.to_string();
  j["target"] = t.target == Target::F ? "F" : "X";
  j["n"] = t.n;
  j["columns"] = {t.first_column, t.last_column};
  j["rows_initial"] = t.initial.rows.size();
  j["row_budget"] = t.row_budget;
  j["rows_remaining"] = t.reduced.rows.size();
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : t.steps) steps.push_back(step_to_json(s));
  j["steps"] = steps;
  j["extraction"] = {{"rows", t.kept_rows}, {"cols", t.kept_cols}};
  j["final_matches_target"] = t.matches_target;
  return j;
}

}  // namespace cwlab

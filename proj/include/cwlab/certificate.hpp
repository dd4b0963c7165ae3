#pragma once

// Lower-bound certificate for F_{n,n}: from any expression defining the
// window, find a set of at least floor(n/2) vertices that carry pairwise
// different labels at one union node.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cwlab/error.hpp"
#include "cwlab/expr.hpp"
#include "cwlab/graph.hpp"
#include "cwlab/word.hpp"

namespace cwlab {

enum class Colour { Red, Blue, Yellow };

inline std::string to_string(Colour c) {
  switch (c) {
    case Colour::Red: return "red";
    case Colour::Blue: return "blue";
    case Colour::Yellow: return "yellow";
  }
  return "?";
}

/// F window addressed by position: row i, column j in 1..n map to the
/// window's i-th row tag and j-th column tag.
struct FWindow {
  GridGraph grid;
  int n = 0;
  VertexId at(int i, int j) const {
    return grid_id(grid.rows[static_cast<std::size_t>(i - 1)],
                   grid.cols[static_cast<std::size_t>(j - 1)]);
  }
};

inline FWindow f_window(int n) { return {build_F(n), n}; }

/// Recovers the F window from the grid tags of the expression's vertices
/// and checks that e defines it.
inline FWindow infer_f_window(const CwExpr& e) {
  std::set<int> rows, cols;
  for (const auto& v : subtree_vertices(e)) {
    const auto tag = parse_grid_id(v);
    if (!tag) throw PreconditionError("vertex '" + v + "' has no grid tag");
    rows.insert(tag->row);
    cols.insert(tag->col);
  }
  if (rows.size() != cols.size() || *cols.rbegin() - *cols.begin() + 1 != static_cast<int>(cols.size())) {
    throw PreconditionError("vertices do not form an n x n window on consecutive columns");
  }
  FWindow w;
  w.n = static_cast<int>(rows.size());
  w.grid = build_window(WordSpec("", "1"), {rows.begin(), rows.end()}, *cols.begin(), *cols.rbegin());
  if (!defines(e, w.grid.graph)) throw PreconditionError("expression does not define F_{n,n}");
  return w;
}

/// Union node (preorder handle) whose subtree holds a full column while no
/// union below it does; the first such node in preorder.
inline NodeHandle lowest_full_column_node(const CwExpr& e, const FWindow& f) {
  const auto nodes = preorder_nodes(e);
  auto full = [&f](const VertexSet& s) {
    for (int j = 1; j <= f.n; ++j) {
      bool all = true;
      for (int i = 1; i <= f.n && all; ++i) all = s.count(f.at(i, j)) > 0;
      if (all) return true;
    }
    return false;
  };
  std::vector<char> qualifies(nodes.size(), 0);
  for (NodeHandle h = 0; h < nodes.size(); ++h) {
    if (nodes[h].kind() == CwExpr::Kind::Union) qualifies[h] = full(subtree_vertices(nodes[h]));
  }
  for (NodeHandle h = 0; h < nodes.size(); ++h) {
    if (!qualifies[h]) continue;
    // Preorder: the subtree of h occupies h+1 .. h+size-1.
    const std::size_t size = preorder_nodes(nodes[h]).size();
    bool lower = false;
    for (std::size_t d = h + 1; d < h + size && !lower; ++d) lower = qualifies[d];
    if (!lower) return h;
  }
  throw PreconditionError("no union node contains a full column");
}

/// Colouring in normalized coordinates. `reversed` and `swapped` record
/// the re-indexing: normalized column j is original column n+1-j when
/// reversed, and red/blue trade places when swapped.
struct Coloring {
  NodeHandle node = 0;
  int n = 0;
  int r = 0;  // non-yellow column, normalized
  bool reversed = false;
  bool swapped = false;
  std::map<VertexId, Colour> colour;  // original vertex ids
  std::vector<std::vector<Colour>> grid;  // grid[i-1][j-1], normalized

  Colour at(int i, int j) const {
    return grid[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
  }
  int original_column(int j) const { return reversed ? n + 1 - j : j; }
};

inline Coloring derive_coloring(const CwExpr& e, NodeHandle a, const FWindow& f) {
  const CwExpr node = node_at(e, a);
  if (node.kind() != CwExpr::Kind::Union) throw PreconditionError("node is not a union");
  const VertexSet blue = subtree_vertices(node.left());
  const VertexSet red = subtree_vertices(node.right());
  const int n = f.n;
  Coloring base;
  base.node = a;
  base.n = n;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      const VertexId v = f.at(i, j);
      base.colour[v] = red.count(v) ? Colour::Red : blue.count(v) ? Colour::Blue : Colour::Yellow;
    }
  }
  bool non_yellow = false;
  for (int j = 1; j <= n; ++j) {
    std::size_t cnt[3] = {0, 0, 0};
    for (int i = 1; i <= n; ++i) ++cnt[static_cast<int>(base.colour[f.at(i, j)])];
    if (cnt[2] == 0) non_yellow = true;
    if (cnt[0] == static_cast<std::size_t>(n) || cnt[1] == static_cast<std::size_t>(n)) {
      throw InvariantViolation("column " + std::to_string(j) + " is entirely " +
                               (cnt[0] == static_cast<std::size_t>(n) ? "red" : "blue"));
    }
  }
  if (!non_yellow) throw InvariantViolation("no non-yellow column below the chosen node");

  std::optional<Coloring> best;
  const int half_up = (n + 1) / 2;
  for (int variant = 0; variant < 4; ++variant) {
    Coloring c = base;
    c.swapped = variant % 2 == 1;
    c.reversed = variant >= 2;
    c.grid.assign(static_cast<std::size_t>(n), std::vector<Colour>(static_cast<std::size_t>(n)));
    for (int i = 1; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        Colour col = base.colour[f.at(i, c.original_column(j))];
        if (c.swapped && col != Colour::Yellow) col = col == Colour::Red ? Colour::Blue : Colour::Red;
        c.grid[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] = col;
      }
    }
    for (int j = 1; j <= half_up; ++j) {
      int reds = 0;
      bool yellow = false;
      for (int i = 1; i <= n; ++i) {
        reds += c.at(i, j) == Colour::Red;
        yellow = yellow || c.at(i, j) == Colour::Yellow;
      }
      if (!yellow && 2 * reds >= n) {
        c.r = j;
        if (!best || c.r < best->r) best = c;
        break;
      }
    }
  }
  if (!best) throw InvariantViolation("no admissible non-yellow column after normalization");
  return *best;
}

struct WitnessSet {
  VertexSet U;  // original vertex ids
  std::vector<std::pair<int, int>> cells;  // normalized (row, column)
  std::size_t bound = 0;  // floor(n/2)
  int iterations = 0;
  bool row_segment = false;  // terminated by taking a row segment
};

/// The column-walk procedure on a normalized colouring.
inline WitnessSet extract_witness(const Coloring& c, const FWindow& f) {
  const int n = c.n;
  WitnessSet w;
  w.bound = static_cast<std::size_t>(n / 2);
  auto vertex = [&](int i, int j) { return f.at(i, c.original_column(j)); };
  int j = c.r;
  std::set<int> I;
  for (int i = 1; i <= n; ++i) {
    if (c.at(i, j) == Colour::Red) I.insert(i);
  }
  for (;;) {
    ++w.iterations;
    if (j + 1 > n) throw InvariantViolation("procedure ran past the last column");
    std::vector<int> K;
    for (int i : I) {
      if (c.at(i, j + 1) != Colour::Red) K.push_back(i);
    }
    for (int k : K) {
      w.cells.emplace_back(k, j);
      I.erase(k);
    }
    if (I.empty()) break;
    ++j;
    if (j == n) {
      const int i = *I.begin();
      w.cells.clear();
      for (int m = c.r; m <= n - 1; ++m) {
        if (c.at(i, m) != Colour::Red) throw InvariantViolation("row segment is not red");
        w.cells.emplace_back(i, m);
      }
      w.row_segment = true;
      break;
    }
  }
  for (const auto& [i, jj] : w.cells) w.U.insert(vertex(i, jj));
  if (w.U.size() < w.bound) {
    throw InvariantViolation("witness has " + std::to_string(w.U.size()) + " vertices, below " +
                             std::to_string(w.bound));
  }
  if (w.iterations > n - c.r + 1) throw InvariantViolation("procedure took too many iterations");
  return w;
}

inline bool verify_distinct_labels(const CwExpr& e, NodeHandle a, const VertexSet& U) {
  const auto labels = labels_at_node(e, a);
  std::set<Label> seen;
  for (const auto& v : U) {
    auto it = labels.find(v);
    if (it == labels.end()) throw PreconditionError("vertex '" + v + "' is not below the node");
    if (!seen.insert(it->second).second) return false;
  }
  return true;
}

struct Certificate {
  FWindow window;
  NodeHandle node = 0;
  std::optional<Coloring> coloring;  // absent when n = 1
  WitnessSet witness;
  std::map<VertexId, Label> labels;  // labels of U at the node
  bool distinct = false;
};

/// Full pipeline. For n = 1 the expression has no union; the single vertex
/// is the witness.
inline Certificate certify(const CwExpr& e, std::optional<FWindow> window = std::nullopt) {
  Certificate cert;
  cert.window = window ? *window : infer_f_window(e);
  if (window && !defines(e, window->grid.graph)) {
    throw PreconditionError("expression does not define F_{n,n}");
  }
  const FWindow& f = cert.window;
  if (f.n == 1) {
    cert.node = 0;
    cert.witness.U = {f.at(1, 1)};
    cert.witness.cells = {{1, 1}};
    cert.witness.bound = 0;
  } else {
    cert.node = lowest_full_column_node(e, f);
    cert.coloring = derive_coloring(e, cert.node, f);
    cert.witness = extract_witness(*cert.coloring, f);
  }
  const auto at = labels_at_node(e, cert.node);
  for (const auto& v : cert.witness.U) cert.labels[v] = at.at(v);
  cert.distinct = verify_distinct_labels(e, cert.node, cert.witness.U);
  return cert;
}

inline nlohmann::json certificate_to_json(const Certificate& c) {
  nlohmann::json j;
  j["n"] = c.window.n;
  j["node"] = c.node;
  if (c.coloring) {
    j["r"] = c.coloring->r;
    j["reversed"] = c.coloring->reversed;
    j["swapped"] = c.coloring->swapped;
    nlohmann::json hist = nlohmann::json::array();
    for (int col = 1; col <= c.window.n; ++col) {
      int cnt[3] = {0, 0, 0};
      for (int i = 1; i <= c.window.n; ++i) {
        ++cnt[static_cast<int>(c.coloring->colour.at(c.window.at(i, col)))];
      }
      hist.push_back({{"column", col}, {"red", cnt[0]}, {"blue", cnt[1]}, {"yellow", cnt[2]}});
    }
    j["histogram"] = hist;
    j["iterations"] = c.witness.iterations;
    j["row_segment"] = c.witness.row_segment;
  }
  nlohmann::json u = nlohmann::json::object();
  for (const auto& [v, l] : c.labels) u[v] = l;
  j["U"] = u;
  j["size"] = c.witness.U.size();
  j["bound"] = c.witness.bound;
  j["distinct"] = c.distinct;
  j["verdict"] = c.distinct && c.witness.U.size() >= c.witness.bound ? "pass" : "fail";
  return j;
}

}  // namespace cwlab

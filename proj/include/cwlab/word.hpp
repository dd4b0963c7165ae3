#pragma once

#include <algorithm>
#include <charconv>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cwlab/error.hpp"
#include "cwlab/graph.hpp"

namespace cwlab {

/// Eventually periodic infinite word over {0,1,2}: `prefix` followed by
/// `period` repeated forever. Positions are 1-based.
class WordSpec {
 public:
  WordSpec() : period_("0") {}
  WordSpec(std::string prefix, std::string period)
      : prefix_(std::move(prefix)), period_(std::move(period)) {
    validate();
  }

  /// Text form `prefix|period`, e.g. `|01` or `2|001`.
  static WordSpec parse(std::string_view text) {
    const auto bar = text.find('|');
    if (bar == std::string_view::npos) throw ParseError("word needs a '|'", text.size());
    if (text.find('|', bar + 1) != std::string_view::npos) {
      throw ParseError("word has more than one '|'", text.find('|', bar + 1));
    }
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (i != bar && (text[i] < '0' || text[i] > '2')) {
        throw ParseError(std::string("letter '") + text[i] + "' is not in {0,1,2}", i);
      }
    }
    if (bar + 1 == text.size()) throw ParseError("period must be nonempty", text.size());
    return WordSpec(std::string(text.substr(0, bar)), std::string(text.substr(bar + 1)));
  }

  const std::string& prefix() const { return prefix_; }
  const std::string& period() const { return period_; }

  /// Letter at position j as '0', '1' or '2'.
  char letter(long j) const {
    if (j < 1) throw PreconditionError("word positions start at 1");
    const auto p = static_cast<long>(prefix_.size());
    if (j <= p) return prefix_[static_cast<std::size_t>(j - 1)];
    const auto q = static_cast<long>(period_.size());
    return period_[static_cast<std::size_t>((j - p - 1) % q)];
  }

  /// Letters at positions from..to inclusive (empty when to < from).
  std::string factor(long from, long to) const {
    std::string out;
    for (long j = from; j <= to; ++j) out.push_back(letter(j));
    return out;
  }

  std::string to_string() const { return prefix_ + "|" + period_; }

  friend bool operator==(const WordSpec&, const WordSpec&) = default;

 private:
  void validate() const {
    if (period_.empty()) throw PreconditionError("period must be nonempty");
    for (char c : prefix_ + period_) {
      if (c < '0' || c > '2') throw PreconditionError("letters must be 0, 1 or 2");
    }
  }

  std::string prefix_;
  std::string period_;
};

/// Adjacency between left-column row i and right-column row k under a letter:
/// 0 keeps the row matching, 1 complements it, 2 adds the forward edges.
constexpr bool edge_rule(char letter, int i, int k) {
  switch (letter) {
    case '0':
      return i == k;
    case '1':
      return i != k;
    case '2':
      return i <= k;
    default:
      return false;
  }
}

struct GridTag {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const GridTag&, const GridTag&) = default;
};

inline VertexId grid_id(int row, int col) {
  return "r" + std::to_string(row) + "c" + std::to_string(col);
}

inline std::optional<GridTag> parse_grid_id(std::string_view id) {
  if (id.size() < 4 || id[0] != 'r') return std::nullopt;
  const auto c = id.find('c');
  if (c == std::string_view::npos) return std::nullopt;
  GridTag tag;
  const char* b = id.data();
  auto r1 = std::from_chars(b + 1, b + c, tag.row);
  auto r2 = std::from_chars(b + c + 1, b + id.size(), tag.col);
  if (r1.ec != std::errc() || r1.ptr != b + c || r2.ec != std::errc() ||
      r2.ptr != b + id.size() || tag.row < 1 || tag.col < 1 || c == 1) {
    return std::nullopt;
  }
  if (grid_id(tag.row, tag.col) != id) return std::nullopt;  // reject leading zeros
  return tag;
}

/// Finite window of P^alpha. `cols` lists the surviving column tags in
/// increasing order and `letters[i]` governs the pair cols[i], cols[i+1].
/// For a fresh window that is exactly the word on the column interval;
/// reductions delete columns and merge the letters around them.
struct GridGraph {
  WordSpec word;
  std::vector<int> rows;
  std::vector<int> cols;
  std::string letters;
  Graph graph;

  std::size_t col_position(int col) const {
    auto it = std::lower_bound(cols.begin(), cols.end(), col);
    if (it == cols.end() || *it != col) {
      throw PreconditionError("column " + std::to_string(col) + " is not in the window");
    }
    return static_cast<std::size_t>(it - cols.begin());
  }

  std::vector<VertexId> column(int col) const {
    std::vector<VertexId> out;
    for (int r : rows) out.push_back(grid_id(r, col));
    return out;
  }

  std::vector<VertexId> row(int r) const {
    std::vector<VertexId> out;
    for (int c : cols) out.push_back(grid_id(r, c));
    return out;
  }
};

inline void check_rows(const std::vector<int>& rows) {
  if (rows.empty()) throw PreconditionError("row set must be nonempty");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 1) throw PreconditionError("rows are positive integers");
    if (i > 0 && rows[i] <= rows[i - 1]) throw PreconditionError("rows must be increasing");
  }
}

/// Window on explicit row and column tags with the given gap letters.
inline GridGraph build_segment(const WordSpec& word, std::vector<int> rows, std::vector<int> cols,
                               std::string letters) {
  check_rows(rows);
  if (cols.empty()) throw PreconditionError("column set must be nonempty");
  if (letters.size() + 1 != cols.size()) {
    throw PreconditionError("need exactly one letter per consecutive column pair");
  }
  GridGraph w{word, std::move(rows), std::move(cols), std::move(letters), Graph{}};
  for (int c : w.cols) {
    for (int r : w.rows) w.graph.add_vertex(grid_id(r, c));
  }
  for (std::size_t p = 0; p + 1 < w.cols.size(); ++p) {
    for (int i : w.rows) {
      for (int k : w.rows) {
        if (edge_rule(w.letters[p], i, k)) {
          w.graph.add_edge(grid_id(i, w.cols[p]), grid_id(k, w.cols[p + 1]));
        }
      }
    }
  }
  return w;
}

inline std::vector<int> row_range(int first, int last) {
  std::vector<int> out;
  for (int r = first; r <= last; ++r) out.push_back(r);
  return out;
}

/// Induced window of P^alpha on `rows` and the column interval [c1, c2].
inline GridGraph build_window(const WordSpec& ws, std::vector<int> rows, int c1, int c2) {
  if (c1 < 1 || c2 < c1) throw PreconditionError("column interval must be nonempty");
  return build_segment(ws, std::move(rows), row_range(c1, c2), ws.factor(c1, c2 - 1));
}

inline GridGraph build_F(int n) {
  if (n < 1) throw PreconditionError("n must be positive");
  return build_window(WordSpec("", "1"), row_range(1, n), 1, n);
}

inline GridGraph build_X(int n) {
  if (n < 1) throw PreconditionError("n must be positive");
  return build_window(WordSpec("", "2"), row_range(1, n), 1, n);
}

inline GridGraph build_H(const WordSpec& ws, int k, int t, int start = 1) {
  if (k < 1 || t < 1) throw PreconditionError("k and t must be positive");
  return build_window(ws, row_range(1, k), start, start + t - 1);
}

/// Tag-level check that a window's graph is what its letters prescribe.
inline bool grid_consistent(const GridGraph& w) {
  return w.graph == build_segment(w.word, w.rows, w.cols, w.letters).graph;
}

/// Induced embedding of g into H_{k,t} of `ws` (columns start..start+t-1),
/// as vertex -> grid tag. Throws BudgetExceeded when the search gives up.
inline std::optional<std::map<VertexId, GridTag>> embed_check(const Graph& g, const WordSpec& ws,
                                                              int k, int t, int start = 1,
                                                              std::size_t max_vertices = 12) {
  if (g.size() > max_vertices) {
    throw PreconditionError("pattern has more than " + std::to_string(max_vertices) +
                            " vertices");
  }
  const GridGraph host = build_H(ws, k, t, start);
  auto found = find_induced_embedding(g, host.graph);
  if (!found) return std::nullopt;
  std::map<VertexId, GridTag> out;
  for (const auto& [v, h] : *found) out[v] = *parse_grid_id(h);
  return out;
}

}  // namespace cwlab

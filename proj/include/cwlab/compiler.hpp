#pragma once

// Linear clique-width upper bounds by composing expressions of parts.
//
// Parts U_1, U_2, ... are added in order. While part i is built its labels
// are lifted to pairs (original label, U_i-class), so vertices of different
// U_i-classes never share a label. Labels 1..ell are reserved for the
// classes of the prefix U_1 + ... + U_{i-1}; each newly created vertex is
// joined to every prefix class it is completely adjacent to. At the end of
// the part every vertex is renamed to the label of its prefix class, which
// leaves at most ell labels in use.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cwlab/error.hpp"
#include "cwlab/expr.hpp"
#include "cwlab/graph.hpp"
#include "cwlab/word.hpp"

namespace cwlab {

struct Part {
  VertexSet vertices;
  CwExpr expr;  // linear, defines G[vertices]
};

/// Ordered parts with their class maps. `part_classes[i]` is the
/// U_i-similarity partition and `prefix_classes[i]` the partition of
/// U_1 + ... + U_i.
struct PartSequence {
  std::vector<Part> parts;
  std::vector<SimilarityPartition> part_classes;
  std::vector<SimilarityPartition> prefix_classes;
};

inline PartSequence make_part_sequence(const Graph& g, std::vector<Part> parts) {
  PartSequence ps;
  VertexSet seen;
  VertexSet prefix;
  for (auto& p : parts) {
    if (p.vertices.empty()) continue;
    check_subset(g, p.vertices);
    for (const auto& v : p.vertices) {
      if (!seen.insert(v).second) throw PreconditionError("parts overlap at '" + v + "'");
    }
    prefix.insert(p.vertices.begin(), p.vertices.end());
    ps.part_classes.push_back(similarity_partition(g, p.vertices));
    ps.prefix_classes.push_back(similarity_partition(g, prefix));
    ps.parts.push_back(std::move(p));
  }
  if (seen != g.vertex_set()) throw PreconditionError("parts do not cover the graph");
  return ps;
}

struct CompileReport {
  std::size_t m = 0;
  std::size_t ell = 0;
  std::size_t bound = 0;     // ell * (m + 1)
  std::size_t labels = 0;    // labels_used of the output
  std::size_t max_live = 0;  // most labels carried at once
  std::size_t parts = 0;
  std::size_t max_part_mu = 0;
  std::size_t max_prefix_mu = 0;
  bool defines = false;
  bool linear = false;
};

inline nlohmann::json report_to_json(const CompileReport& r) {
  return {{"m", r.m},         {"ell", r.ell},
          {"bound", r.bound}, {"labels", r.labels},
          {"max_live", r.max_live}, {"parts", r.parts},
          {"max_part_mu", r.max_part_mu}, {"max_prefix_mu", r.max_prefix_mu},
          {"defines", r.defines}, {"linear", r.linear}};
}

struct Composition {
  CwExpr expr;
  CompileReport report;
};

/// Same expression with its labels renamed to 1..labels_used, in order of
/// first use.
inline CwExpr compact_labels(const CwExpr& e) {
  std::map<Label, Label> rename;
  auto to = [&rename](Label l) {
    auto it = rename.find(l);
    if (it != rename.end()) return it->second;
    const Label fresh = static_cast<Label>(rename.size()) + 1;
    rename[l] = fresh;
    return fresh;
  };
  std::vector<LinearEvent> events;
  if (is_linear(e)) {
    events = linearize(e);
    for (auto& ev : events) {
      ev.a = to(ev.a);
      if (ev.kind != LinearEvent::Kind::Add) ev.b = to(ev.b);
    }
    return from_events(events);
  }
  std::function<CwExpr(const CwExpr&)> walk = [&](const CwExpr& x) -> CwExpr {
    switch (x.kind()) {
      case CwExpr::Kind::Create:
        return CwExpr::create(to(x.label()), x.vertex());
      case CwExpr::Kind::Union: {
        CwExpr l = walk(x.left());
        return CwExpr::join(l, walk(x.right()));
      }
      case CwExpr::Kind::Eta: {
        CwExpr c = walk(x.child());
        const Label a = to(x.first());
        return CwExpr::eta(a, to(x.second()), c);
      }
      case CwExpr::Kind::Rho: {
        CwExpr c = walk(x.child());
        const Label a = to(x.first());
        return CwExpr::rho(a, to(x.second()), c);
      }
    }
    return x;
  };
  return walk(e);
}

/// Composes the part expressions into one linear expression for g.
/// Requires labels_used(part) <= m, mu(U_i) <= ell and mu(prefix) <= ell.
inline Composition compose_linear(const Graph& g, const PartSequence& ps, std::size_t m,
                                  std::size_t ell) {
  if (ps.parts.empty()) throw PreconditionError("no parts");
  if (m < 1 || ell < 1) throw PreconditionError("m and ell must be positive");
  CompileReport rep;
  rep.m = m;
  rep.ell = ell;
  rep.bound = ell * (m + 1);
  rep.parts = ps.parts.size();

  const auto L = static_cast<Label>(ell);
  auto lift = [L](Label o, std::size_t c) { return L + (o - 1) * L + static_cast<Label>(c) + 1; };

  std::vector<LinearEvent> out;
  auto emit_rho = [&out](Label a, Label b) {
    if (a != b) out.push_back({LinearEvent::Kind::Rho, a, b, {}});
  };
  std::map<VertexId, Label> label_of;
  std::map<Label, std::size_t> live;  // label -> number of holders
  auto set_label = [&](const VertexId& v, Label l) {
    auto it = label_of.find(v);
    if (it != label_of.end() && --live[it->second] == 0) live.erase(it->second);
    label_of[v] = l;
    ++live[l];
  };
  auto rename_all = [&](Label a, Label b) {
    if (a == b || !live.count(a)) return;
    for (auto& [v, l] : label_of) {
      if (l == a) l = b;
    }
    live[b] += live[a];
    live.erase(a);
    emit_rho(a, b);
  };

  // Prefix class index -> its label in 1..ell.
  std::vector<Label> prefix_label;
  const SimilarityPartition* prefix = nullptr;

  for (std::size_t i = 0; i < ps.parts.size(); ++i) {
    const Part& part = ps.parts[i];
    const SimilarityPartition& cls = ps.part_classes[i];
    const std::string where = "part " + std::to_string(i + 1);
    rep.max_part_mu = std::max(rep.max_part_mu, cls.mu());
    rep.max_prefix_mu = std::max(rep.max_prefix_mu, ps.prefix_classes[i].mu());
    if (cls.mu() > ell) {
      throw PreconditionError(where + ": mu(U) = " + std::to_string(cls.mu()) + " exceeds ell = " +
                              std::to_string(ell));
    }
    if (ps.prefix_classes[i].mu() > ell) {
      throw PreconditionError(where + ": mu of the prefix = " +
                              std::to_string(ps.prefix_classes[i].mu()) + " exceeds ell = " +
                              std::to_string(ell));
    }
    if (!is_linear(part.expr)) throw PreconditionError(where + ": expression is not linear");
    const CwExpr pe = compact_labels(part.expr);
    if (labels_used(pe) > m) {
      throw PreconditionError(where + ": expression uses " + std::to_string(labels_used(pe)) +
                              " labels, more than m = " + std::to_string(m));
    }
    if (!defines(pe, induced_subgraph(g, part.vertices))) {
      throw PreconditionError(where + ": expression does not define the induced subgraph");
    }

    // Class-to-class blocks between U_i and the prefix must be complete or
    // empty; joined[c] lists the prefix labels class c is complete to.
    std::vector<std::vector<Label>> joined(cls.mu());
    if (prefix) {
      for (std::size_t c = 0; c < cls.mu(); ++c) {
        for (std::size_t q = 0; q < prefix->mu(); ++q) {
          std::size_t edges = 0;
          for (const auto& u : cls.classes[c]) {
            for (const auto& w : prefix->classes[q]) edges += g.adjacent(u, w) ? 1 : 0;
          }
          const std::size_t full = cls.classes[c].size() * prefix->classes[q].size();
          if (edges != 0 && edges != full) {
            throw InvariantViolation(where + ": block between class " + std::to_string(c) +
                                     " and prefix class " + std::to_string(q) +
                                     " is neither complete nor empty");
          }
          if (edges == full) joined[c].push_back(prefix_label[q]);
        }
      }
    }

    for (const auto& ev : linearize(pe)) {
      switch (ev.kind) {
        case LinearEvent::Kind::Add: {
          if (!part.vertices.count(ev.vertex)) {
            throw PreconditionError(where + ": creates '" + ev.vertex + "' outside the part");
          }
          const std::size_t c = cls.class_of(ev.vertex);
          const Label l = lift(ev.a, c);
          out.push_back({LinearEvent::Kind::Add, l, 0, ev.vertex});
          set_label(ev.vertex, l);
          for (Label a : joined[c]) out.push_back({LinearEvent::Kind::Eta, l, a, {}});
          break;
        }
        case LinearEvent::Kind::Eta:
          for (std::size_t c1 = 0; c1 < ell; ++c1) {
            if (!live.count(lift(ev.a, c1))) continue;
            for (std::size_t c2 = 0; c2 < ell; ++c2) {
              if (live.count(lift(ev.b, c2))) {
                out.push_back({LinearEvent::Kind::Eta, lift(ev.a, c1), lift(ev.b, c2), {}});
              }
            }
          }
          break;
        case LinearEvent::Kind::Rho:
          for (std::size_t c = 0; c < ell; ++c) rename_all(lift(ev.a, c), lift(ev.b, c));
          break;
      }
    }

    // Collapse onto the classes of the grown prefix.
    const SimilarityPartition& next = ps.prefix_classes[i];
    std::vector<Label> target(next.mu(), 0);
    std::set<Label> taken;
    std::map<Label, std::size_t> label_class;  // every live label -> next class
    for (const auto& [v, l] : label_of) {
      const std::size_t q = next.class_of(v);
      auto [it, fresh] = label_class.emplace(l, q);
      if (!fresh && it->second != q) {
        throw InvariantViolation(where + ": label " + std::to_string(l) +
                                 " is shared by two classes of the prefix");
      }
    }
    for (std::size_t q = 0; q < next.mu(); ++q) {
      for (const auto& v : next.classes[q]) {
        const Label l = label_of.at(v);
        if (l <= L && (target[q] == 0 || l < target[q])) target[q] = l;
      }
      if (target[q]) taken.insert(target[q]);
    }
    Label spare = 1;
    for (std::size_t q = 0; q < next.mu(); ++q) {
      if (target[q]) continue;
      while (taken.count(spare)) ++spare;
      target[q] = spare;
      taken.insert(spare);
    }
    const auto snapshot = label_class;
    for (const auto& [l, q] : snapshot) {
      if (l <= L) rename_all(l, target[q]);
    }
    for (const auto& [l, q] : snapshot) {
      if (l > L) rename_all(l, target[q]);
    }
    prefix = &next;
    prefix_label = target;
  }

  Composition result{from_events(out), rep};
  result.report.labels = labels_used(result.expr);
  result.report.max_live = max_live_labels(result.expr);
  result.report.defines = defines(result.expr, g);
  result.report.linear = is_linear(result.expr);
  if (!result.report.defines) throw InvariantViolation("composed expression does not define G");
  if (!result.report.linear) throw InvariantViolation("composed expression is not linear");
  if (result.report.labels > rep.bound || result.report.max_live > rep.bound) {
    throw InvariantViolation("composed expression uses " + std::to_string(result.report.labels) +
                             " labels, bound is " + std::to_string(rep.bound));
  }
  return result;
}

/// Three-label linear expression for a path forest whose paths follow
/// `order`: each vertex may only be adjacent to its predecessor.
inline CwExpr path_builder(const Graph& g, const std::vector<VertexId>& order) {
  if (order.empty()) throw PreconditionError("empty path");
  std::vector<LinearEvent> ev;
  for (std::size_t i = 0; i < order.size(); ++i) {
    ev.push_back({LinearEvent::Kind::Add, 3, 0, order[i]});
    if (i > 0 && g.adjacent(order[i - 1], order[i])) ev.push_back({LinearEvent::Kind::Eta, 3, 2, {}});
    if (i + 1 == order.size()) break;
    if (i > 0) ev.push_back({LinearEvent::Kind::Rho, 2, 1, {}});
    ev.push_back({LinearEvent::Kind::Rho, 3, 2, {}});
  }
  return compact_labels(from_events(ev));
}

/// Parts = rows of a grid-tagged graph, each built along increasing column.
inline PartSequence row_parts(const Graph& g) {
  std::map<int, std::vector<std::pair<int, VertexId>>> rows;
  for (const auto& v : g.vertices()) {
    const auto tag = parse_grid_id(v);
    if (!tag) throw PreconditionError("vertex '" + v + "' has no grid tag");
    rows[tag->row].emplace_back(tag->col, v);
  }
  std::vector<Part> parts;
  for (auto& [r, cells] : rows) {
    std::sort(cells.begin(), cells.end());
    std::vector<VertexId> order;
    for (const auto& [c, v] : cells) order.push_back(v);
    const Graph sub = induced_subgraph(g, VertexSet(order.begin(), order.end()));
    parts.push_back({VertexSet(order.begin(), order.end()), path_builder(sub, order)});
  }
  return make_part_sequence(g, std::move(parts));
}

inline PartSequence build_rows_parts(const GridGraph& h) { return row_parts(h.graph); }

inline std::size_t max_mu(const PartSequence& ps) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < ps.parts.size(); ++i) {
    best = std::max({best, ps.part_classes[i].mu(), ps.prefix_classes[i].mu()});
  }
  return best;
}

/// Row-by-row composition with m = 3; ell defaults to the largest mu met
/// (at most the number of columns on a window).
inline Composition compile_rows(const Graph& g, std::optional<std::size_t> ell = std::nullopt) {
  const PartSequence ps = row_parts(g);
  return compose_linear(g, ps, 3, ell.value_or(std::max<std::size_t>(1, max_mu(ps))));
}

/// H_{k,t} compiled with ell = t; output labels <= 4t.
inline Composition compile_window(const GridGraph& h) {
  return compile_rows(h.graph, h.cols.size());
}

// ---------------------------------------------------------------------------
// Graphs of the subclass: induced subgraphs of H_{n,n} with no H_{k,k}.

struct BlackWhiteLayout {
  WordSpec word;
  int k = 1;
  int n = 0;  // host is H_{n,n}, n a multiple of k
  GridGraph host;
  VertexSet black;
  Graph graph;  // host induced on the black vertices
  int blocks() const { return n / k; }
  int block_of(int col) const { return (col - 1) / k + 1; }
};

/// Places the grid-tagged graph g into the smallest padded host H_{n,n}
/// (n >= min_n). g must be the induced subgraph of the host on its tags.
inline BlackWhiteLayout make_layout(const WordSpec& word, const Graph& g, int k, int min_n = 1) {
  if (k < 1) throw PreconditionError("k must be positive");
  int n = std::max(min_n, 1);
  for (const auto& v : g.vertices()) {
    const auto tag = parse_grid_id(v);
    if (!tag) throw PreconditionError("vertex '" + v + "' has no grid tag");
    n = std::max({n, tag->row, tag->col});
  }
  if (n % k) n += k - n % k;
  BlackWhiteLayout lay;
  lay.word = word;
  lay.k = k;
  lay.n = n;
  lay.host = build_H(word, n, n);
  lay.black = g.vertex_set();
  lay.graph = induced_subgraph(lay.host.graph, lay.black);
  if (!(lay.graph == g)) throw PreconditionError("graph is not induced by its tags in the host");
  return lay;
}

/// True when no window H_{k,k} of the word (any column offset) is an
/// induced subgraph of g.
inline bool is_h_free(const Graph& g, const WordSpec& word, int k,
                      std::uint64_t max_expansions = 50'000'000) {
  if (g.size() < static_cast<std::size_t>(k) * static_cast<std::size_t>(k)) return true;
  const long offsets = static_cast<long>(word.prefix().size() + word.period().size());
  std::set<std::string> seen;
  for (long s = 1; s <= offsets; ++s) {
    if (!seen.insert(word.factor(s, s + k - 2)).second) continue;
    const GridGraph h = build_H(word, k, k, static_cast<int>(s));
    if (find_induced_embedding(h.graph, g, max_expansions)) return false;
  }
  return true;
}

struct BlackWhitePartition {
  PartSequence parts;           // nonempty parts only
  std::vector<VertexSet> raw;   // U_1 .. U_t, possibly empty
  VertexSet boundary;
  std::size_t max_part_mu = 0;
  std::size_t max_prefix_mu = 0;
  std::size_t full_rows_max = 0;  // most entirely black rows in one block
};

/// Splits the black vertices into U_1..U_t block by block. Each row of block
/// i either goes to U_i whole except its first vertex (entirely black row),
/// or is cut at its first white vertex with the part before going to
/// U_{i-1}.
inline BlackWhitePartition partition_black_white(const BlackWhiteLayout& lay, bool check_free = false) {
  const int k = lay.k;
  const int t = lay.blocks();
  if (check_free && !is_h_free(lay.graph, lay.word, k)) {
    throw PreconditionError("graph contains H_{" + std::to_string(k) + "," + std::to_string(k) + "}");
  }
  BlackWhitePartition out;
  out.raw.assign(static_cast<std::size_t>(t), {});
  auto black = [&](int r, int c) { return lay.black.count(grid_id(r, c)) > 0; };
  std::map<VertexId, int> part_of;
  auto put = [&](int i, int r, int c) {
    out.raw[static_cast<std::size_t>(i - 1)].insert(grid_id(r, c));
    part_of[grid_id(r, c)] = i;
  };
  for (int r = 1; r <= lay.n; ++r) {
    for (int c = 1; c <= k; ++c) {
      if (black(r, c)) put(1, r, c);
    }
  }
  for (int i = 2; i <= t; ++i) {
    std::size_t full_rows = 0;
    const int first = (i - 1) * k + 1;
    for (int r = 1; r <= lay.n; ++r) {
      int white = -1;
      for (int c = first; c < first + k; ++c) {
        if (!black(r, c)) {
          white = c;
          break;
        }
      }
      if (white < 0) {
        ++full_rows;
        put(i - 1, r, first);
        for (int c = first + 1; c < first + k; ++c) put(i, r, c);
      } else {
        for (int c = first; c < white; ++c) put(i - 1, r, c);
        for (int c = white + 1; c < first + k; ++c) {
          if (black(r, c)) put(i, r, c);
        }
      }
    }
    out.full_rows_max = std::max(out.full_rows_max, full_rows);
  }
  for (const auto& [v, i] : part_of) {
    const GridTag tag = *parse_grid_id(v);
    auto in = [&](int r, int c, int p) {
      auto it = part_of.find(grid_id(r, c));
      return c >= 1 && it != part_of.end() && it->second == p;
    };
    if (in(tag.row, tag.col - 1, i - 1) || in(tag.row, tag.col + 1, i + 1)) out.boundary.insert(v);
  }

  std::vector<Part> parts;
  for (const auto& u : out.raw) {
    if (u.empty()) continue;
    const Graph sub = induced_subgraph(lay.graph, u);
    parts.push_back({u, compile_rows(sub).expr});
  }
  if (parts.empty()) throw PreconditionError("graph has no vertices");
  out.parts = make_part_sequence(lay.graph, std::move(parts));
  out.max_part_mu = 0;
  for (std::size_t i = 0; i < out.parts.parts.size(); ++i) {
    out.max_part_mu = std::max(out.max_part_mu, out.parts.part_classes[i].mu());
    out.max_prefix_mu = std::max(out.max_prefix_mu, out.parts.prefix_classes[i].mu());
  }
  const auto limit = static_cast<std::size_t>(4 * k - 2);
  if (out.max_part_mu > limit || out.max_prefix_mu > limit) {
    throw InvariantViolation("similarity bound 4k-2 = " + std::to_string(limit) +
                             " violated: mu(U_i) up to " + std::to_string(out.max_part_mu) +
                             ", prefix mu up to " + std::to_string(out.max_prefix_mu));
  }
  return out;
}

struct SubclassCompilation {
  Composition composition;
  BlackWhitePartition partition;
  std::size_t max_part_labels = 0;  // each part is built with <= 8k labels
};

/// Part expressions by rows (<= 8k labels each), composed with m = 8k and
/// ell = 4k-2; output labels <= (4k-2)(8k+1).
inline SubclassCompilation compile_subclass_graph(const BlackWhiteLayout& lay,
                                                  bool check_free = false) {
  const int k = lay.k;
  if (lay.black.size() == 1) {
    const VertexId v = *lay.black.begin();
    CompileReport r;
    r.m = 8 * static_cast<std::size_t>(k);
    r.ell = static_cast<std::size_t>(4 * k - 2);
    r.bound = r.ell * (r.m + 1);
    r.labels = r.max_live = r.parts = r.max_part_mu = r.max_prefix_mu = 1;
    r.defines = r.linear = true;
    return {{CwExpr::create(1, v), r}, {}, 1};
  }
  SubclassCompilation out;
  out.partition = partition_black_white(lay, check_free);
  for (const auto& p : out.partition.parts.parts) {
    out.max_part_labels = std::max(out.max_part_labels, labels_used(p.expr));
  }
  if (out.max_part_labels > 8 * static_cast<std::size_t>(k)) {
    throw InvariantViolation("part expression uses " + std::to_string(out.max_part_labels) +
                             " labels, more than 8k");
  }
  out.composition = compose_linear(lay.graph, out.partition.parts, 8 * static_cast<std::size_t>(k),
                                   static_cast<std::size_t>(4 * k - 2));
  return out;
}

/// Seeded greedy sample: visits the host's vertices in random order and
/// keeps each one whose addition leaves the graph H_{k,k}-free, up to
/// `size` vertices.
inline Graph sample_h_free(const WordSpec& word, int k, int host_n, std::size_t size,
                           std::uint64_t seed) {
  const GridGraph host = build_H(word, host_n, host_n);
  std::vector<VertexId> order = host.graph.vertices();
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  VertexSet chosen;
  for (const auto& v : order) {
    if (chosen.size() >= size) break;
    chosen.insert(v);
    if (!is_h_free(induced_subgraph(host.graph, chosen), word, k)) chosen.erase(v);
  }
  return induced_subgraph(host.graph, chosen);
}

}  // namespace cwlab

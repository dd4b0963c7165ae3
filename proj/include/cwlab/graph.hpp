#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cwlab/error.hpp"

namespace cwlab {

using VertexId = std::string;
using VertexSet = std::set<VertexId>;

/// Finite undirected simple graph over opaque string ids. Equality is
/// id-level: same vertex set and same edge set.
class Graph {
 public:
  Graph() = default;

  void add_vertex(const VertexId& v) { adj_.try_emplace(v); }

  // Missing endpoints are added.
  void add_edge(const VertexId& u, const VertexId& v) {
    if (u == v) throw GraphError("self-loop on '" + u + "'");
    adj_[u].insert(v);
    adj_[v].insert(u);
  }

  void remove_edge(const VertexId& u, const VertexId& v) {
    check_pair(u, v);
    adj_[u].erase(v);
    adj_[v].erase(u);
  }

  void toggle_edge(const VertexId& u, const VertexId& v) {
    if (adjacent(u, v)) {
      remove_edge(u, v);
    } else {
      add_edge(u, v);
    }
  }

  void remove_vertex(const VertexId& v) {
    auto it = adj_.find(v);
    if (it == adj_.end()) throw GraphError("unknown vertex '" + v + "'");
    for (const auto& w : it->second) adj_[w].erase(v);
    adj_.erase(it);
  }

  bool has_vertex(const VertexId& v) const { return adj_.count(v) != 0; }

  bool adjacent(const VertexId& u, const VertexId& v) const {
    auto it = adj_.find(u);
    return it != adj_.end() && it->second.count(v) != 0;
  }

  const VertexSet& neighbours(const VertexId& v) const {
    auto it = adj_.find(v);
    if (it == adj_.end()) throw GraphError("unknown vertex '" + v + "'");
    return it->second;
  }

  std::size_t degree(const VertexId& v) const { return neighbours(v).size(); }
  std::size_t size() const { return adj_.size(); }
  bool empty() const { return adj_.empty(); }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& [v, nb] : adj_) twice += nb.size();
    return twice / 2;
  }

  /// Vertices in lexicographic order.
  std::vector<VertexId> vertices() const {
    std::vector<VertexId> out;
    out.reserve(adj_.size());
    for (const auto& [v, nb] : adj_) out.push_back(v);
    return out;
  }

  VertexSet vertex_set() const {
    VertexSet out;
    for (const auto& [v, nb] : adj_) out.insert(v);
    return out;
  }

  /// Edges with the lexicographically smaller endpoint first, sorted.
  std::vector<std::pair<VertexId, VertexId>> edges() const {
    std::vector<std::pair<VertexId, VertexId>> out;
    for (const auto& [v, nb] : adj_) {
      for (const auto& w : nb) {
        if (v < w) out.emplace_back(v, w);
      }
    }
    return out;
  }

  friend bool operator==(const Graph& a, const Graph& b) { return a.adj_ == b.adj_; }

 private:
  void check_pair(const VertexId& u, const VertexId& v) const {
    if (u == v) throw GraphError("self-loop on '" + u + "'");
    if (!has_vertex(u)) throw GraphError("unknown vertex '" + u + "'");
    if (!has_vertex(v)) throw GraphError("unknown vertex '" + v + "'");
  }

  std::map<VertexId, VertexSet> adj_;
};

inline Graph make_graph(const std::vector<VertexId>& vertices,
                        const std::vector<std::pair<VertexId, VertexId>>& edges) {
  Graph g;
  for (const auto& v : vertices) g.add_vertex(v);
  for (const auto& [u, v] : edges) g.add_edge(u, v);
  return g;
}

/// Cycle along the listed vertices.
inline Graph make_cycle(const std::vector<VertexId>& order) {
  Graph g;
  for (const auto& v : order) g.add_vertex(v);
  for (std::size_t i = 0; i < order.size(); ++i) {
    g.add_edge(order[i], order[(i + 1) % order.size()]);
  }
  return g;
}

inline Graph make_path(const std::vector<VertexId>& order) {
  Graph g;
  for (const auto& v : order) g.add_vertex(v);
  for (std::size_t i = 0; i + 1 < order.size(); ++i) g.add_edge(order[i], order[i + 1]);
  return g;
}

inline void check_subset(const Graph& g, const VertexSet& u) {
  for (const auto& v : u) {
    if (!g.has_vertex(v)) throw GraphError("unknown vertex '" + v + "'");
  }
}

inline Graph induced_subgraph(const Graph& g, const VertexSet& u) {
  check_subset(g, u);
  Graph out;
  for (const auto& v : u) out.add_vertex(v);
  for (const auto& v : u) {
    for (const auto& w : g.neighbours(v)) {
      if (v < w && u.count(w)) out.add_edge(v, w);
    }
  }
  return out;
}

/// Classes of U-similarity: vertices of U grouped by their neighbourhood
/// outside U. Classes are ordered by their smallest member.
struct SimilarityPartition {
  VertexSet ground;
  std::vector<std::vector<VertexId>> classes;

  std::size_t mu() const { return classes.size(); }

  /// Index of the class containing v.
  std::size_t class_of(const VertexId& v) const {
    for (std::size_t i = 0; i < classes.size(); ++i) {
      if (std::binary_search(classes[i].begin(), classes[i].end(), v)) return i;
    }
    throw GraphError("vertex '" + v + "' is not in the ground set");
  }
};

inline std::vector<VertexId> outside_neighbourhood(const Graph& g, const VertexId& v,
                                                   const VertexSet& u) {
  std::vector<VertexId> out;
  for (const auto& w : g.neighbours(v)) {
    if (!u.count(w)) out.push_back(w);
  }
  return out;
}

inline SimilarityPartition similarity_partition(const Graph& g, const VertexSet& u) {
  check_subset(g, u);
  std::map<std::vector<VertexId>, std::vector<VertexId>> groups;
  for (const auto& v : u) groups[outside_neighbourhood(g, v, u)].push_back(v);
  SimilarityPartition p;
  p.ground = u;
  for (auto& [key, members] : groups) p.classes.push_back(std::move(members));
  std::sort(p.classes.begin(), p.classes.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return p;
}

/// Toggles adjacency of every pair (x, y) with x in v1 and y in v2. With
/// `require_independent` both sides must be independent sets of g.
inline Graph bipartite_complement(const Graph& g, const VertexSet& v1, const VertexSet& v2,
                                  bool require_independent = false) {
  check_subset(g, v1);
  check_subset(g, v2);
  for (const auto& v : v1) {
    if (v2.count(v)) throw GraphError("sides overlap in '" + v + "'");
  }
  if (require_independent) {
    for (const auto* side : {&v1, &v2}) {
      for (const auto& v : *side) {
        for (const auto& w : g.neighbours(v)) {
          if (side->count(w)) throw GraphError("side is not independent: " + v + "-" + w);
        }
      }
    }
  }
  Graph out = g;
  for (const auto& x : v1) {
    for (const auto& y : v2) out.toggle_edge(x, y);
  }
  return out;
}

/// Dense index view used by the search routines. Index order follows the
/// lexicographic vertex order, so results do not depend on insertion order.
struct DenseGraph {
  std::vector<VertexId> ids;
  std::vector<std::vector<char>> adj;
  std::vector<std::vector<std::size_t>> nbrs;

  explicit DenseGraph(const Graph& g) : ids(g.vertices()) {
    const std::size_t n = ids.size();
    std::map<VertexId, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index[ids[i]] = i;
    adj.assign(n, std::vector<char>(n, 0));
    nbrs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& w : g.neighbours(ids[i])) {
        const std::size_t j = index.at(w);
        adj[i][j] = 1;
        nbrs[i].push_back(j);
      }
    }
  }
  std::size_t size() const { return ids.size(); }
};

struct SearchLimits {
  std::size_t max_vertices = 64;
  std::size_t max_expansions = 50'000'000;
};

/// Chordless cycle of length `len`, listed in cycle order, or nullopt when
/// none exists. Throws BudgetExceeded when the expansion cap is hit.
inline std::optional<std::vector<VertexId>> find_induced_cycle(const Graph& g, std::size_t len,
                                                               SearchLimits limits = {}) {
  if (len < 3) throw PreconditionError("cycle length must be at least 3");
  if (g.size() > limits.max_vertices) {
    throw PreconditionError("graph has " + std::to_string(g.size()) +
                            " vertices, above the search guard of " +
                            std::to_string(limits.max_vertices));
  }
  const DenseGraph d(g);
  const std::size_t n = d.size();
  std::vector<std::size_t> path;
  std::vector<char> on_path(n, 0);
  std::size_t expansions = 0;

  // Extends an induced path whose first vertex is the minimum index of the cycle.
  auto extend = [&](auto&& self) -> bool {
    const std::size_t m = path.size();
    const std::size_t last = path.back();
    for (std::size_t w : d.nbrs[last]) {
      if (w <= path[0] || on_path[w]) continue;
      if (++expansions > limits.max_expansions) {
        throw BudgetExceeded("induced cycle search exceeded its expansion budget");
      }
      const bool closing = (m + 1 == len);
      bool ok = true;
      for (std::size_t i = 1; i + 1 < m && ok; ++i) ok = !d.adj[w][path[i]];
      if (!ok) continue;
      if (m >= 2) {
        if (closing != static_cast<bool>(d.adj[w][path[0]])) continue;
      }
      if (closing) {
        if (path[1] > w) continue;  // each cycle once per direction
        path.push_back(w);
        return true;
      }
      path.push_back(w);
      on_path[w] = 1;
      if (self(self)) return true;
      on_path[w] = 0;
      path.pop_back();
    }
    return false;
  };

  for (std::size_t s = 0; s < n; ++s) {
    path.assign(1, s);
    on_path.assign(n, 0);
    on_path[s] = 1;
    if (extend(extend)) {
      std::vector<VertexId> out;
      for (std::size_t i : path) out.push_back(d.ids[i]);
      return out;
    }
  }
  return std::nullopt;
}

/// Induced embedding of `pattern` into `host` as a map pattern vertex ->
/// host vertex, or nullopt. Plain backtracking with degree filtering.
inline std::optional<std::map<VertexId, VertexId>> find_induced_embedding(
    const Graph& pattern, const Graph& host, std::size_t max_expansions = 50'000'000) {
  if (pattern.size() > host.size()) return std::nullopt;
  const DenseGraph p(pattern);
  const DenseGraph h(host);
  const std::size_t np = p.size();
  if (np == 0) return std::map<VertexId, VertexId>{};

  // Order pattern vertices so that each one (after the first of its
  // component) has an already placed neighbour.
  std::vector<std::size_t> order;
  std::vector<char> seen(np, 0);
  for (std::size_t root = 0; root < np; ++root) {
    if (seen[root]) continue;
    seen[root] = 1;
    std::vector<std::size_t> queue{root};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      order.push_back(queue[qi]);
      for (std::size_t w : p.nbrs[queue[qi]]) {
        if (!seen[w]) {
          seen[w] = 1;
          queue.push_back(w);
        }
      }
    }
  }

  std::vector<std::size_t> image(np, 0);
  std::vector<char> used(h.size(), 0);
  std::size_t expansions = 0;

  auto place = [&](auto&& self, std::size_t depth) -> bool {
    if (depth == np) return true;
    const std::size_t pv = order[depth];
    for (std::size_t hv = 0; hv < h.size(); ++hv) {
      if (used[hv] || h.nbrs[hv].size() < p.nbrs[pv].size()) continue;
      if (++expansions > max_expansions) {
        throw BudgetExceeded("embedding search exceeded its expansion budget");
      }
      bool ok = true;
      for (std::size_t i = 0; i < depth && ok; ++i) {
        const std::size_t q = order[i];
        ok = (p.adj[pv][q] != 0) == (h.adj[hv][image[q]] != 0);
      }
      if (!ok) continue;
      image[pv] = hv;
      used[hv] = 1;
      if (self(self, depth + 1)) return true;
      used[hv] = 0;
    }
    return false;
  };

  if (!place(place, 0)) return std::nullopt;
  std::map<VertexId, VertexId> out;
  for (std::size_t i = 0; i < np; ++i) out[p.ids[i]] = h.ids[image[i]];
  return out;
}

// Serialization: {"vertices": [...], "edges": [[u, v], ...]} with u < v.

inline nlohmann::json graph_to_json(const Graph& g) {
  nlohmann::json j;
  j["vertices"] = g.vertices();
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back({u, v});
  j["edges"] = edges;
  return j;
}

inline Graph graph_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("vertices") || !j.contains("edges")) {
    throw GraphError("graph JSON needs \"vertices\" and \"edges\"");
  }
  Graph g;
  for (const auto& v : j.at("vertices")) {
    if (!v.is_string()) throw GraphError("vertex ids must be strings");
    g.add_vertex(v.get<std::string>());
  }
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
      throw GraphError("edges must be 2-element string arrays");
    }
    for (const auto& end : e) {
      if (!g.has_vertex(end.get<std::string>())) {
        throw GraphError("edge endpoint '" + end.get<std::string>() + "' is not a listed vertex");
      }
    }
    g.add_edge(e[0].get<std::string>(), e[1].get<std::string>());
  }
  return g;
}

inline std::string graph_to_dot(const Graph& g, const std::string& name = "G") {
  std::ostringstream out;
  out << "graph " << name << " {\n";
  for (const auto& v : g.vertices()) out << "  \"" << v << "\";\n";
  for (const auto& [u, v] : g.edges()) out << "  \"" << u << "\" -- \"" << v << "\";\n";
  out << "}\n";
  return out.str();
}

}  // namespace cwlab

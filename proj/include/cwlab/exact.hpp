#pragma once

// Exact clique-width and linear clique-width for small graphs.
//
// Both searches work on subsets S of processed vertices. Edges inside S are
// always added as soon as both endpoints exist, and labels are merged as
// soon as their vertices have the same neighbourhood outside S. Under that
// normal form the labelled graph at S is determined by S alone: its label
// classes are the S-similarity classes, so a state is just a bitmask.
//
// Linear search: a forward DP over subsets. Adding v to S costs mu(S) labels
// when v can be created directly into an existing class (same future
// neighbourhood, no edge to that class, and every class joined to v is
// already joined to that class), otherwise mu(S) + 1.
//
// General search: iterative deepening on k. S is buildable with k labels if
// it splits into buildable S1, S2 whose classes fit into k labels at the
// moment of the union. Two classes from opposite sides may share a label
// when they are non-adjacent, S-similar, and every eta needed across the
// union stays inside E(G) once shared labels are taken into account.

#include <bit>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "cwlab/error.hpp"
#include "cwlab/expr.hpp"
#include "cwlab/graph.hpp"

namespace cwlab {

struct SearchBudget {
  int max_k = 12;
  std::uint64_t max_nodes = 4'000'000'000ULL;
  double time_cap = 60.0;  // seconds
};

struct WidthResult {
  int width = 0;
  CwExpr witness;
  std::uint64_t nodes = 0;
};

namespace detail {

using Mask = std::uint32_t;

inline Mask bit(std::size_t i) { return Mask{1} << i; }

class SubsetGraph {
 public:
  explicit SubsetGraph(const Graph& g) : dense_(g) {
    n_ = dense_.size();
    if (n_ > 24) throw PreconditionError("exact search supports at most 24 vertices");
    full_ = n_ == 32 ? ~Mask{0} : (bit(n_) - 1);
    adj_.assign(n_, 0);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j : dense_.nbrs[i]) adj_[i] |= bit(j);
    }
  }

  std::size_t n() const { return n_; }
  Mask full() const { return full_; }
  Mask adj(std::size_t v) const { return adj_[v]; }
  const VertexId& id(std::size_t v) const { return dense_.ids[v]; }

  /// Neighbourhood of v outside s.
  Mask key(std::size_t v, Mask s) const { return adj_[v] & ~s & full_; }

  /// S-similarity classes as masks, ordered by lowest member.
  std::vector<Mask> classes(Mask s) const {
    std::vector<Mask> out;
    std::vector<Mask> keys;
    for (Mask rest = s; rest; rest &= rest - 1) {
      const auto v = static_cast<std::size_t>(std::countr_zero(rest));
      const Mask k = key(v, s);
      bool placed = false;
      for (std::size_t c = 0; c < out.size(); ++c) {
        if (keys[c] == k) {
          out[c] |= bit(v);
          placed = true;
          break;
        }
      }
      if (!placed) {
        out.push_back(bit(v));
        keys.push_back(k);
      }
    }
    return out;
  }

  bool complete(Mask a, Mask b) const {
    for (Mask rest = a; rest; rest &= rest - 1) {
      const auto v = static_cast<std::size_t>(std::countr_zero(rest));
      if ((adj_[v] & b) != b) return false;
    }
    return true;
  }

 private:
  DenseGraph dense_;
  std::size_t n_ = 0;
  Mask full_ = 0;
  std::vector<Mask> adj_;
};

inline std::size_t low_index(Mask m) { return static_cast<std::size_t>(std::countr_zero(m)); }

class BudgetClock {
 public:
  explicit BudgetClock(const SearchBudget& b)
      : budget_(b), start_(std::chrono::steady_clock::now()) {}

  /// Counts one node; false once the node or time budget is spent.
  bool tick() {
    ++nodes_;
    if (nodes_ > budget_.max_nodes) return false;
    if ((nodes_ & 0xFFFF) == 0) {
      const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start_;
      if (el.count() > budget_.time_cap) return false;
    }
    return true;
  }
  std::uint64_t nodes() const { return nodes_; }

 private:
  SearchBudget budget_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t nodes_ = 0;
};

// Index of a class of `s` that v can be created into directly, or -1.
inline int absorbing_class(const SubsetGraph& g, Mask s, const std::vector<Mask>& cls,
                           std::size_t v) {
  const Mask next = s | bit(v);
  const Mask to_s = g.adj(v) & s;
  for (std::size_t c = 0; c < cls.size(); ++c) {
    const Mask a = cls[c];
    if (g.adj(v) & a) continue;
    if (g.key(v, next) != g.key(low_index(a), next)) continue;
    bool ok = true;
    for (Mask rest = a; rest && ok; rest &= rest - 1) {
      ok = (to_s & ~g.adj(low_index(rest))) == 0;
    }
    if (ok) return static_cast<int>(c);
  }
  return -1;
}

struct Group {
  Mask first = 0;   // part from S1
  Mask second = 0;  // part from S2
  Mask all() const { return first | second; }
};

class UnionPlanner {
 public:
  UnionPlanner(const SubsetGraph& g, Mask s, const std::vector<Mask>& c1,
               const std::vector<Mask>& c2)
      : g_(g), s_(s), c1_(c1), c2_(c2) {}

  /// Groups (shared labels) for a union with at most k distinct labels.
  std::optional<std::vector<Group>> plan(int k) {
    const int p = static_cast<int>(c1_.size());
    const int q = static_cast<int>(c2_.size());
    need_ = p + q - k;
    if (need_ > std::min(p, q)) return std::nullopt;
    partner_.assign(c1_.size(), -1);
    used_.assign(c2_.size(), 0);
    if (search(0, 0)) return groups();
    return std::nullopt;
  }

 private:
  bool compatible(std::size_t i, std::size_t j) const {
    for (Mask rest = c1_[i]; rest; rest &= rest - 1) {
      if (g_.adj(low_index(rest)) & c2_[j]) return false;
    }
    return g_.key(low_index(c1_[i]), s_) == g_.key(low_index(c2_[j]), s_);
  }

  std::vector<Group> groups() const {
    std::vector<Group> out;
    for (std::size_t i = 0; i < c1_.size(); ++i) {
      Group gr{c1_[i], partner_[i] >= 0 ? c2_[static_cast<std::size_t>(partner_[i])] : 0};
      out.push_back(gr);
    }
    for (std::size_t j = 0; j < c2_.size(); ++j) {
      if (!used_[j]) out.push_back(Group{0, c2_[j]});
    }
    return out;
  }

  bool needs_eta(const Group& a, const Group& b) const {
    if (a.first && b.second && (g_.adj(low_index(a.first)) & b.second)) return true;
    if (b.first && a.second && (g_.adj(low_index(b.first)) & a.second)) return true;
    return false;
  }

  bool valid(const std::vector<Group>& gs) const {
    for (std::size_t x = 0; x < gs.size(); ++x) {
      for (std::size_t y = x + 1; y < gs.size(); ++y) {
        if (needs_eta(gs[x], gs[y]) && !g_.complete(gs[x].all(), gs[y].all())) return false;
      }
    }
    return true;
  }

  bool search(std::size_t i, int matched) {
    const int remaining = static_cast<int>(c1_.size() - i);
    if (matched + remaining < need_) return false;
    if (matched >= need_) return valid(groups());
    for (std::size_t j = 0; j < c2_.size(); ++j) {
      if (used_[j] || !compatible(i, j)) continue;
      partner_[i] = static_cast<int>(j);
      used_[j] = 1;
      if (search(i + 1, matched + 1)) return true;
      partner_[i] = -1;
      used_[j] = 0;
    }
    return search(i + 1, matched);
  }

  const SubsetGraph& g_;
  Mask s_;
  const std::vector<Mask>& c1_;
  const std::vector<Mask>& c2_;
  int need_ = 0;
  std::vector<int> partner_;
  std::vector<char> used_;
};

}  // namespace detail

/// Exact linear clique-width with a linear witness expression, or nullopt
/// when the budget (or max_k) is exhausted first.
inline std::optional<WidthResult> exact_lcwd(const Graph& graph, SearchBudget budget = {}) {
  using namespace detail;
  if (graph.empty()) throw PreconditionError("graph has no vertices");
  const SubsetGraph g(graph);
  const std::size_t n = g.n();
  constexpr std::uint8_t kInf = 0xFF;
  std::vector<std::uint8_t> best(std::size_t{1} << n, kInf);
  std::vector<std::uint8_t> last(std::size_t{1} << n, 0);
  BudgetClock clock(budget);
  best[0] = 0;
  for (Mask s = 0; s < g.full(); ++s) {
    if (best[s] == kInf) continue;
    const auto cls = g.classes(s);
    const int mu = static_cast<int>(cls.size());
    for (std::size_t v = 0; v < n; ++v) {
      if (s & bit(v)) continue;
      if (!clock.tick()) return std::nullopt;
      int cost = mu + 1;
      if (s != 0 && absorbing_class(g, s, cls, v) >= 0) cost = mu;
      cost = std::max<int>(cost, best[s]);
      if (cost > budget.max_k) continue;
      const Mask t = s | bit(v);
      if (cost < best[t]) {
        best[t] = static_cast<std::uint8_t>(cost);
        last[t] = static_cast<std::uint8_t>(v);
      }
    }
  }
  if (best[g.full()] == kInf) return std::nullopt;
  const int width = best[g.full()];

  std::vector<std::size_t> order;
  for (Mask s = g.full(); s; s &= ~bit(last[s])) order.push_back(last[s]);
  std::reverse(order.begin(), order.end());

  std::vector<Label> lab(n, 0);
  std::vector<LinearEvent> events;
  Mask s = 0;
  for (std::size_t v : order) {
    const auto cls = g.classes(s);
    const int into = s ? absorbing_class(g, s, cls, v) : -1;
    Label l = 0;
    if (into >= 0) {
      l = lab[low_index(cls[static_cast<std::size_t>(into)])];
    } else {
      std::vector<char> taken(static_cast<std::size_t>(width) + 2, 0);
      for (Mask c : cls) taken[static_cast<std::size_t>(lab[low_index(c)])] = 1;
      l = 1;
      while (taken[static_cast<std::size_t>(l)]) ++l;
    }
    events.push_back({LinearEvent::Kind::Add, l, 0, g.id(v)});
    lab[v] = l;
    for (Mask c : cls) {
      if ((g.adj(v) & c) == c) events.push_back({LinearEvent::Kind::Eta, l, lab[low_index(c)], {}});
    }
    s |= bit(v);
    for (Mask c : g.classes(s)) {
      Label target = lab[low_index(c)];
      for (Mask rest = c; rest; rest &= rest - 1) target = std::min(target, lab[low_index(rest)]);
      std::vector<Label> renamed;
      for (Mask rest = c; rest; rest &= rest - 1) {
        const std::size_t u = low_index(rest);
        if (lab[u] != target) {
          if (std::find(renamed.begin(), renamed.end(), lab[u]) == renamed.end()) {
            events.push_back({LinearEvent::Kind::Rho, lab[u], target, {}});
            renamed.push_back(lab[u]);
          }
          lab[u] = target;
        }
      }
    }
  }
  WidthResult out{width, from_events(events), clock.nodes()};
  if (!defines(out.witness, graph) || static_cast<int>(labels_used(out.witness)) != width) {
    throw InvariantViolation("linear witness does not reproduce the graph");
  }
  return out;
}

namespace detail {

class GeneralSearch {
 public:
  GeneralSearch(const SubsetGraph& g, BudgetClock& clock) : g_(g), clock_(clock) {
    const std::size_t states = std::size_t{1} << g.n();
    classes_.resize(states);
    cached_.assign(states, 0);
    mu_.resize(states);
    for (Mask s = 0; s <= g.full(); ++s) {
      mu_[s] = static_cast<std::uint8_t>(g.classes(s).size());
      if (s == g.full()) break;
    }
  }

  /// 1 feasible, 0 infeasible, -1 budget exhausted.
  int decide(int k) {
    k_ = k;
    const std::size_t states = std::size_t{1} << g_.n();
    feasible_.assign(states, 0);
    split_.assign(states, 0);
    for (Mask s = 1; s <= g_.full(); ++s) {
      if (std::has_single_bit(s)) {
        feasible_[s] = 1;
      } else if (mu_[s] <= k) {
        const Mask low = s & (~s + 1);
        const Mask rest = s ^ low;
        // Submasks of rest, excluding rest itself: S1 = low | sub.
        for (Mask sub = (rest - 1) & rest;; sub = (sub - 1) & rest) {
          const Mask s1 = low | sub;
          const Mask s2 = s ^ s1;
          if (feasible_[s1] && feasible_[s2]) {
            if (!clock_.tick()) return -1;
            if (mu_[s1] + mu_[s2] <= k || plan(s, s1, s2)) {
              feasible_[s] = 1;
              split_[s] = s1;
              break;
            }
          }
          if (sub == 0) break;
        }
      }
      if (s == g_.full()) break;
    }
    return feasible_[g_.full()] ? 1 : 0;
  }

  CwExpr witness() {
    std::vector<Label> target{1};
    return build(g_.full(), class_list(g_.full()), target);
  }

 private:
  const std::vector<Mask>& class_list(Mask s) {
    if (!cached_[s]) {
      classes_[s] = g_.classes(s);
      cached_[s] = 1;
    }
    return classes_[s];
  }

  std::optional<std::vector<Group>> plan(Mask s, Mask s1, Mask s2) {
    UnionPlanner planner(g_, s, class_list(s1), class_list(s2));
    return planner.plan(k_);
  }

  // Builds S so that class i of `cls` (the S-classes) ends with label target[i].
  CwExpr build(Mask s, const std::vector<Mask>& cls, const std::vector<Label>& target) {
    if (std::has_single_bit(s)) return CwExpr::create(target[0], g_.id(low_index(s)));
    const Mask s1 = split_[s];
    const Mask s2 = s ^ s1;
    const std::vector<Mask> c1 = class_list(s1);
    const std::vector<Mask> c2 = class_list(s2);
    std::vector<Group> groups;
    if (static_cast<int>(c1.size() + c2.size()) <= k_) {
      for (Mask c : c1) groups.push_back(Group{c, 0});
      for (Mask c : c2) groups.push_back(Group{0, c});
    } else {
      groups = *plan(s, s1, s2);
    }

    // One group per S-class takes the class's target; the rest take spare labels.
    std::vector<Label> glab(groups.size(), 0);
    std::vector<std::size_t> gclass(groups.size(), 0);
    std::vector<char> taken(static_cast<std::size_t>(k_) + 2, 0);
    for (Label t : target) taken[static_cast<std::size_t>(t)] = 1;
    for (std::size_t x = 0; x < groups.size(); ++x) {
      for (std::size_t c = 0; c < cls.size(); ++c) {
        if (groups[x].all() & cls[c]) gclass[x] = c;
      }
    }
    std::vector<char> class_done(cls.size(), 0);
    for (std::size_t x = 0; x < groups.size(); ++x) {
      if (!class_done[gclass[x]]) {
        glab[x] = target[gclass[x]];
        class_done[gclass[x]] = 1;
      } else {
        Label l = 1;
        while (taken[static_cast<std::size_t>(l)]) ++l;
        glab[x] = l;
        taken[static_cast<std::size_t>(l)] = 1;
      }
    }

    auto child_targets = [&](const std::vector<Mask>& side, bool first) {
      std::vector<Label> t;
      for (Mask c : side) {
        for (std::size_t x = 0; x < groups.size(); ++x) {
          if ((first ? groups[x].first : groups[x].second) == c) t.push_back(glab[x]);
        }
      }
      return t;
    };
    CwExpr e = CwExpr::join(build(s1, c1, child_targets(c1, true)),
                            build(s2, c2, child_targets(c2, false)));
    for (std::size_t x = 0; x < groups.size(); ++x) {
      for (std::size_t y = x + 1; y < groups.size(); ++y) {
        const Group& a = groups[x];
        const Group& b = groups[y];
        const bool need = (a.first && b.second && (g_.adj(low_index(a.first)) & b.second)) ||
                          (b.first && a.second && (g_.adj(low_index(b.first)) & a.second));
        if (need) e = CwExpr::eta(glab[x], glab[y], e);
      }
    }
    for (std::size_t x = 0; x < groups.size(); ++x) {
      if (glab[x] != target[gclass[x]]) e = CwExpr::rho(glab[x], target[gclass[x]], e);
    }
    return e;
  }

  const SubsetGraph& g_;
  BudgetClock& clock_;
  int k_ = 0;
  std::vector<std::vector<Mask>> classes_;
  std::vector<char> cached_;
  std::vector<std::uint8_t> mu_;
  std::vector<char> feasible_;
  std::vector<Mask> split_;
};

}  // namespace detail

/// Exact clique-width with a witness expression, or nullopt when the budget
/// (or max_k) is exhausted before a proven value.
inline std::optional<WidthResult> exact_cwd(const Graph& graph, SearchBudget budget = {}) {
  using namespace detail;
  if (graph.empty()) throw PreconditionError("graph has no vertices");
  const SubsetGraph g(graph);
  if (g.n() > 20) throw PreconditionError("general exact search supports at most 20 vertices");
  BudgetClock clock(budget);
  GeneralSearch search(g, clock);
  for (int k = 1; k <= budget.max_k; ++k) {
    const int verdict = search.decide(k);
    if (verdict < 0) return std::nullopt;
    if (verdict == 1) {
      WidthResult out{k, search.witness(), clock.nodes()};
      if (!defines(out.witness, graph) || static_cast<int>(labels_used(out.witness)) != k) {
        throw InvariantViolation("witness does not reproduce the graph");
      }
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace cwlab

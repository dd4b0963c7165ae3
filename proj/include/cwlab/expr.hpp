#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cwlab/error.hpp"
#include "cwlab/graph.hpp"

namespace cwlab {

using Label = int;

/// Immutable clique-width expression over the four operations: vertex
/// creation, disjoint union, eta (join two labels) and rho (rename).
/// Subtrees are shared, so copies are cheap.
class CwExpr {
 public:
  enum class Kind { Create, Union, Eta, Rho };

  CwExpr() = default;

  static CwExpr create(Label label, VertexId v) {
    check_label(label);
    if (v.empty() || !std::all_of(v.begin(), v.end(), [](unsigned char c) { return std::isalnum(c); })) {
      throw PreconditionError("vertex id '" + v + "' must be nonempty and alphanumeric");
    }
    return CwExpr(std::make_shared<const Node>(Node{Kind::Create, label, 0, std::move(v), {}, {}}));
  }

  static CwExpr join(CwExpr left, CwExpr right) {
    left.check_valid();
    right.check_valid();
    return CwExpr(std::make_shared<const Node>(
        Node{Kind::Union, 0, 0, {}, std::move(left.node_), std::move(right.node_)}));
  }

  static CwExpr eta(Label i, Label j, CwExpr child) {
    check_label(i);
    check_label(j);
    if (i == j) throw PreconditionError("eta needs two different labels");
    child.check_valid();
    return CwExpr(std::make_shared<const Node>(Node{Kind::Eta, i, j, {}, std::move(child.node_), {}}));
  }

  static CwExpr rho(Label from, Label to, CwExpr child) {
    check_label(from);
    check_label(to);
    child.check_valid();
    return CwExpr(std::make_shared<const Node>(Node{Kind::Rho, from, to, {}, std::move(child.node_), {}}));
  }

  bool valid() const { return node_ != nullptr; }
  Kind kind() const { return node().kind; }
  /// Creation label (Create), first label (Eta) or source label (Rho).
  Label first() const { return node().a; }
  /// Second label (Eta) or target label (Rho).
  Label second() const { return node().b; }
  Label label() const { return node().a; }
  const VertexId& vertex() const { return node().vertex; }
  CwExpr child() const { return CwExpr(node().left); }
  CwExpr left() const { return CwExpr(node().left); }
  CwExpr right() const { return CwExpr(node().right); }

  friend bool operator==(const CwExpr& a, const CwExpr& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    const Node& x = *a.node_;
    const Node& y = *b.node_;
    if (x.kind != y.kind || x.a != y.a || x.b != y.b || x.vertex != y.vertex) return false;
    return CwExpr(x.left) == CwExpr(y.left) && CwExpr(x.right) == CwExpr(y.right);
  }

 private:
  struct Node {
    Kind kind;
    Label a;
    Label b;
    VertexId vertex;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
  };

  explicit CwExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static void check_label(Label l) {
    if (l < 1) throw PreconditionError("labels are positive integers");
  }
  void check_valid() const {
    if (!node_) throw PreconditionError("empty expression");
  }
  const Node& node() const {
    check_valid();
    return *node_;
  }

  std::shared_ptr<const Node> node_;
};

struct LabeledGraph {
  Graph graph;
  std::map<VertexId, Label> labels;

  std::set<Label> label_set() const {
    std::set<Label> out;
    for (const auto& [v, l] : labels) out.insert(l);
    return out;
  }
};

namespace detail {

template <typename Visit>
LabeledGraph eval_visit(const CwExpr& e, Visit& visit) {
  LabeledGraph out;
  switch (e.kind()) {
    case CwExpr::Kind::Create:
      out.graph.add_vertex(e.vertex());
      out.labels[e.vertex()] = e.label();
      break;
    case CwExpr::Kind::Union: {
      out = eval_visit(e.left(), visit);
      LabeledGraph other = eval_visit(e.right(), visit);
      if (other.labels.size() > out.labels.size()) std::swap(out, other);
      for (const auto& [v, l] : other.labels) {
        if (out.labels.count(v)) throw GraphError("vertex '" + v + "' is created twice");
        out.graph.add_vertex(v);
        out.labels[v] = l;
      }
      for (const auto& [u, v] : other.graph.edges()) out.graph.add_edge(u, v);
      break;
    }
    case CwExpr::Kind::Eta: {
      out = eval_visit(e.child(), visit);
      std::vector<VertexId> side_i;
      std::vector<VertexId> side_j;
      for (const auto& [v, l] : out.labels) {
        if (l == e.first()) side_i.push_back(v);
        if (l == e.second()) side_j.push_back(v);
      }
      for (const auto& x : side_i) {
        for (const auto& y : side_j) out.graph.add_edge(x, y);
      }
      break;
    }
    case CwExpr::Kind::Rho:
      out = eval_visit(e.child(), visit);
      for (auto& [v, l] : out.labels) {
        if (l == e.first()) l = e.second();
      }
      break;
  }
  visit(e, out);
  return out;
}

}  // namespace detail

/// Bottom-up evaluation. Throws GraphError if a vertex id is created twice.
inline LabeledGraph eval(const CwExpr& e) {
  auto ignore = [](const CwExpr&, const LabeledGraph&) {};
  return detail::eval_visit(e, ignore);
}

/// Largest number of distinct labels carried by the labelled graph at any
/// node of the expression.
inline std::size_t max_live_labels(const CwExpr& e) {
  std::size_t best = 0;
  auto visit = [&best](const CwExpr&, const LabeledGraph& g) {
    best = std::max(best, g.label_set().size());
  };
  detail::eval_visit(e, visit);
  return best;
}

inline bool defines(const CwExpr& e, const Graph& g) { return eval(e).graph == g; }

namespace detail {

inline void collect_labels(const CwExpr& e, std::set<Label>& out) {
  switch (e.kind()) {
    case CwExpr::Kind::Create:
      out.insert(e.label());
      return;
    case CwExpr::Kind::Union:
      collect_labels(e.left(), out);
      collect_labels(e.right(), out);
      return;
    case CwExpr::Kind::Eta:
    case CwExpr::Kind::Rho:
      out.insert(e.first());
      out.insert(e.second());
      collect_labels(e.child(), out);
      return;
  }
}

struct Shape {
  bool has_union;
  bool linear;
};

inline Shape shape_of(const CwExpr& e) {
  switch (e.kind()) {
    case CwExpr::Kind::Create:
      return {false, true};
    case CwExpr::Kind::Eta:
    case CwExpr::Kind::Rho:
      return shape_of(e.child());
    case CwExpr::Kind::Union: {
      const Shape l = shape_of(e.left());
      const Shape r = shape_of(e.right());
      return {true, l.linear && r.linear && (!l.has_union || !r.has_union)};
    }
  }
  return {false, false};
}

}  // namespace detail

/// Number of distinct labels appearing anywhere in e.
inline std::size_t labels_used(const CwExpr& e) {
  std::set<Label> s;
  detail::collect_labels(e, s);
  return s.size();
}

/// True iff every union has a child containing no union, i.e. vertices are
/// added one at a time along a spine (caterpillar tree).
inline bool is_linear(const CwExpr& e) { return detail::shape_of(e).linear; }

// Node handles are preorder indices: root 0, a union's left subtree before
// its right subtree.
using NodeHandle = std::size_t;

inline std::vector<CwExpr> preorder_nodes(const CwExpr& e) {
  std::vector<CwExpr> out;
  std::vector<CwExpr> stack{e};
  while (!stack.empty()) {
    CwExpr x = stack.back();
    stack.pop_back();
    out.push_back(x);
    if (x.kind() == CwExpr::Kind::Union) {
      stack.push_back(x.right());
      stack.push_back(x.left());
    } else if (x.kind() != CwExpr::Kind::Create) {
      stack.push_back(x.child());
    }
  }
  return out;
}

inline CwExpr node_at(const CwExpr& e, NodeHandle h) {
  auto nodes = preorder_nodes(e);
  if (h >= nodes.size()) throw PreconditionError("invalid node handle " + std::to_string(h));
  return nodes[h];
}

inline VertexSet subtree_vertices(const CwExpr& e) {
  VertexSet out;
  for (const auto& x : preorder_nodes(e)) {
    if (x.kind() == CwExpr::Kind::Create) out.insert(x.vertex());
  }
  return out;
}

/// Label of every vertex below node h immediately before h's operation.
inline std::map<VertexId, Label> labels_at_node(const CwExpr& e, NodeHandle h) {
  const CwExpr x = node_at(e, h);
  switch (x.kind()) {
    case CwExpr::Kind::Create:
      return {{x.vertex(), x.label()}};
    case CwExpr::Kind::Union: {
      auto out = eval(x.left()).labels;
      for (const auto& [v, l] : eval(x.right()).labels) out[v] = l;
      return out;
    }
    default:
      return eval(x.child()).labels;
  }
}

/// Flattened form of a linear expression: vertices added one at a time,
/// interleaved with eta/rho operations on the whole graph built so far.
struct LinearEvent {
  enum class Kind { Add, Eta, Rho };
  Kind kind;
  Label a = 0;
  Label b = 0;
  VertexId vertex;
};

namespace detail {

// Final label of the single vertex of a union-free subtree.
inline std::pair<VertexId, Label> leaf_vertex(const CwExpr& e) {
  switch (e.kind()) {
    case CwExpr::Kind::Create:
      return {e.vertex(), e.label()};
    case CwExpr::Kind::Eta:
      return leaf_vertex(e.child());
    case CwExpr::Kind::Rho: {
      auto [v, l] = leaf_vertex(e.child());
      return {v, l == e.first() ? e.second() : l};
    }
    default:
      throw PreconditionError("leaf subtree contains a union");
  }
}

inline void linearize_into(const CwExpr& e, std::vector<LinearEvent>& out) {
  switch (e.kind()) {
    case CwExpr::Kind::Create:
      out.push_back({LinearEvent::Kind::Add, e.label(), 0, e.vertex()});
      return;
    case CwExpr::Kind::Eta:
      linearize_into(e.child(), out);
      out.push_back({LinearEvent::Kind::Eta, e.first(), e.second(), {}});
      return;
    case CwExpr::Kind::Rho:
      linearize_into(e.child(), out);
      out.push_back({LinearEvent::Kind::Rho, e.first(), e.second(), {}});
      return;
    case CwExpr::Kind::Union: {
      const bool right_leaf = !shape_of(e.right()).has_union;
      const CwExpr spine = right_leaf ? e.left() : e.right();
      const CwExpr leaf = right_leaf ? e.right() : e.left();
      linearize_into(spine, out);
      auto [v, l] = leaf_vertex(leaf);
      out.push_back({LinearEvent::Kind::Add, l, 0, v});
      return;
    }
  }
}

}  // namespace detail

inline std::vector<LinearEvent> linearize(const CwExpr& e) {
  if (!is_linear(e)) throw PreconditionError("expression is not linear");
  std::vector<LinearEvent> out;
  detail::linearize_into(e, out);
  return out;
}

/// Rebuilds a linear expression from events, adding leaves on the right.
inline CwExpr from_events(const std::vector<LinearEvent>& events) {
  CwExpr cur;
  for (const auto& ev : events) {
    switch (ev.kind) {
      case LinearEvent::Kind::Add: {
        CwExpr leaf = CwExpr::create(ev.a, ev.vertex);
        cur = cur.valid() ? CwExpr::join(cur, leaf) : leaf;
        break;
      }
      case LinearEvent::Kind::Eta:
        cur = CwExpr::eta(ev.a, ev.b, cur);
        break;
      case LinearEvent::Kind::Rho:
        cur = CwExpr::rho(ev.a, ev.b, cur);
        break;
    }
  }
  if (!cur.valid()) throw PreconditionError("no vertices");
  return cur;
}

// Text grammar:
//   expr := c(<label>,<id>) | u(<expr>,<expr>) | n(<i>,<j>,<expr>) | r(<i>-><j>,<expr>)

inline void print_to(const CwExpr& e, std::string& out) {
  switch (e.kind()) {
    case CwExpr::Kind::Create:
      out += "c(" + std::to_string(e.label()) + "," + e.vertex() + ")";
      return;
    case CwExpr::Kind::Union:
      out += "u(";
      print_to(e.left(), out);
      out += ",";
      print_to(e.right(), out);
      out += ")";
      return;
    case CwExpr::Kind::Eta:
      out += "n(" + std::to_string(e.first()) + "," + std::to_string(e.second()) + ",";
      print_to(e.child(), out);
      out += ")";
      return;
    case CwExpr::Kind::Rho:
      out += "r(" + std::to_string(e.first()) + "->" + std::to_string(e.second()) + ",";
      print_to(e.child(), out);
      out += ")";
      return;
  }
}

inline std::string print(const CwExpr& e) {
  std::string out;
  print_to(e, out);
  return out;
}

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  CwExpr parse_all() {
    CwExpr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(std::string_view token) {
    skip_ws();
    if (text_.substr(pos_, token.size()) != token) fail("expected '" + std::string(token) + "'");
    pos_ += token.size();
  }

  Label parse_label() {
    skip_ws();
    const std::size_t start = pos_;
    long value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_] - '0');
      if (value > 1'000'000'000) fail("label too large");
      ++pos_;
    }
    if (pos_ == start) fail("expected a label");
    if (value < 1) {
      pos_ = start;
      fail("labels must be positive");
    }
    return static_cast<Label>(value);
  }

  VertexId parse_id() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected a vertex id");
    return VertexId(text_.substr(start, pos_ - start));
  }

  CwExpr parse_expr() {
    skip_ws();
    if (pos_ + 1 >= text_.size()) fail("expected an expression");
    const std::size_t start = pos_;
    const char op = text_[pos_++];
    expect("(");
    CwExpr out;
    switch (op) {
      case 'c': {
        Label l = parse_label();
        expect(",");
        out = CwExpr::create(l, parse_id());
        break;
      }
      case 'u': {
        CwExpr a = parse_expr();
        expect(",");
        out = CwExpr::join(a, parse_expr());
        break;
      }
      case 'n': {
        Label i = parse_label();
        expect(",");
        Label j = parse_label();
        if (i == j) fail("eta needs two different labels");
        expect(",");
        out = CwExpr::eta(i, j, parse_expr());
        break;
      }
      case 'r': {
        Label i = parse_label();
        expect("->");
        Label j = parse_label();
        expect(",");
        out = CwExpr::rho(i, j, parse_expr());
        break;
      }
      default:
        pos_ = start;
        fail(std::string("unknown operation '") + op + "'");
    }
    expect(")");
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline CwExpr parse_expr(std::string_view text) { return detail::ExprParser(text).parse_all(); }

}  // namespace cwlab

#include <random>

#include <gtest/gtest.h>

#include "cwlab/expr.hpp"
#include "oracles.hpp"

using namespace cwlab;

namespace {

const char* kC5 = "n(4,1,n(4,3,u(c(4,e),r(4->3,r(3->2,n(4,3,u(c(4,d),n(3,2,u(c(3,c),n(2,1,u(c(2,b),c(1,a))))))))))))";

CwExpr c5_expr() {
  using E = CwExpr;
  CwExpr ab = E::eta(2, 1, E::join(E::create(2, "b"), E::create(1, "a")));
  CwExpr abc = E::eta(3, 2, E::join(E::create(3, "c"), ab));
  CwExpr abcd = E::eta(4, 3, E::join(E::create(4, "d"), abc));
  CwExpr moved = E::rho(4, 3, E::rho(3, 2, abcd));
  return E::eta(4, 1, E::eta(4, 3, E::join(E::create(4, "e"), moved)));
}

// Straightforward interpreter on a vertex -> label table, used as oracle.
void interpret(const CwExpr& e, std::map<VertexId, Label>& lab,
               std::set<std::pair<VertexId, VertexId>>& edges) {
  switch (e.kind()) {
    case CwExpr::Kind::Create:
      lab[e.vertex()] = e.label();
      return;
    case CwExpr::Kind::Union:
      interpret(e.left(), lab, edges);
      interpret(e.right(), lab, edges);
      return;
    case CwExpr::Kind::Eta: {
      std::map<VertexId, Label> mine;
      interpret(e.child(), mine, edges);
      for (const auto& [u, a] : mine) {
        for (const auto& [v, b] : mine) {
          if (a == e.first() && b == e.second()) edges.insert(std::minmax(u, v));
        }
      }
      lab.insert(mine.begin(), mine.end());
      return;
    }
    case CwExpr::Kind::Rho: {
      std::map<VertexId, Label> mine;
      interpret(e.child(), mine, edges);
      for (auto& [v, l] : mine) {
        if (l == e.first()) l = e.second();
      }
      lab.insert(mine.begin(), mine.end());
      return;
    }
  }
}

CwExpr random_expr(std::mt19937_64& rng, int& next_id, int depth) {
  const int k = 1 + static_cast<int>(rng() % 3);
  if (depth == 0 || rng() % 4 == 0) return CwExpr::create(k, "v" + std::to_string(next_id++));
  switch (rng() % 3) {
    case 0: {
      CwExpr l = random_expr(rng, next_id, depth - 1);
      return CwExpr::join(l, random_expr(rng, next_id, depth - 1));
    }
    case 1: {
      const int j = k % 3 + 1;
      return CwExpr::eta(k, j, random_expr(rng, next_id, depth - 1));
    }
    default:
      return CwExpr::rho(k, k % 3 + 1, random_expr(rng, next_id, depth - 1));
  }
}

}  // namespace

TEST(Expr, PaperC5Example) {
  const CwExpr e = c5_expr();
  EXPECT_EQ(eval(e).graph, make_cycle({"a", "b", "c", "d", "e"}));
  EXPECT_EQ(labels_used(e), 4u);
  EXPECT_TRUE(is_linear(e));
  EXPECT_TRUE(defines(e, make_cycle({"a", "b", "c", "d", "e"})));
  EXPECT_EQ(parse_expr(kC5), e);
  EXPECT_EQ(print(e), kC5);
}

TEST(Expr, TrivialExamples) {
  const CwExpr v = CwExpr::create(1, "v");
  EXPECT_EQ(eval(v).labels.at("v"), 1);
  EXPECT_EQ(labels_used(v), 1u);
  EXPECT_TRUE(is_linear(v));
  EXPECT_TRUE(defines(v, make_graph({"v"}, {})));
  EXPECT_FALSE(defines(v, make_graph({"w"}, {})));
  const CwExpr xy = CwExpr::eta(1, 2, CwExpr::join(CwExpr::create(1, "x"), CwExpr::create(2, "y")));
  EXPECT_EQ(eval(xy).graph, make_path({"x", "y"}));
  EXPECT_EQ(labels_used(xy), 2u);
  const CwExpr bal = CwExpr::join(CwExpr::join(CwExpr::create(1, "a"), CwExpr::create(1, "b")),
                                  CwExpr::join(CwExpr::create(1, "c"), CwExpr::create(1, "d")));
  EXPECT_FALSE(is_linear(bal));
}

TEST(Expr, ConstructionErrors) {
  EXPECT_THROW(CwExpr::eta(1, 1, CwExpr::create(1, "a")), PreconditionError);
  EXPECT_THROW(CwExpr::create(0, "a"), PreconditionError);
  EXPECT_THROW(CwExpr::create(1, "a-b"), PreconditionError);
  EXPECT_THROW(eval(CwExpr::join(CwExpr::create(1, "a"), CwExpr::create(2, "a"))), GraphError);
  // Renaming an absent label is a no-op, eta twice is idempotent.
  const CwExpr r = CwExpr::rho(5, 1, CwExpr::create(1, "a"));
  EXPECT_EQ(eval(r).labels.at("a"), 1);
}

TEST(Expr, LabelsAtNode) {
  const CwExpr e = c5_expr();
  const auto root = labels_at_node(e, 0);
  EXPECT_EQ(root.size(), 5u);
  EXPECT_EQ(root.at("e"), 4);
  EXPECT_EQ(root.at("a"), 1);
  EXPECT_EQ(root.at("d"), 3);
  EXPECT_EQ(root.at("c"), 2);
  EXPECT_EQ(root.at("b"), 2);
  // Union joining 4(e): e carries label 4 there.
  const auto nodes = preorder_nodes(e);
  bool seen = false;
  for (NodeHandle h = 0; h < nodes.size(); ++h) {
    if (nodes[h].kind() == CwExpr::Kind::Union && nodes[h].left().kind() == CwExpr::Kind::Create &&
        nodes[h].left().vertex() == "e") {
      EXPECT_EQ(labels_at_node(e, h).at("e"), 4);
      seen = true;
    }
    if (nodes[h].kind() == CwExpr::Kind::Create) {
      EXPECT_EQ(labels_at_node(e, h).at(nodes[h].vertex()), nodes[h].label());
    }
  }
  EXPECT_TRUE(seen);
  EXPECT_THROW(labels_at_node(e, nodes.size()), PreconditionError);
}

TEST(Expr, ParserReportsPositions) {
  try {
    parse_expr("u(c(1,a),c(x,b))");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 11u);
  }
  EXPECT_THROW(parse_expr("c(1,a) extra"), ParseError);
  EXPECT_EQ(parse_expr(" u ( c(1,a) , c(2,b) ) "), parse_expr("u(c(1,a),c(2,b))"));
}

TEST(Expr, RandomExpressionsAgreeWithOracle) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 300; ++trial) {
    int next = 0;
    const CwExpr e = random_expr(rng, next, 5);
    std::map<VertexId, Label> lab;
    std::set<std::pair<VertexId, VertexId>> edges;
    interpret(e, lab, edges);
    const LabeledGraph lg = eval(e);
    EXPECT_EQ(lg.labels, lab);
    EXPECT_EQ(lg.graph.edge_count(), edges.size());
    for (const auto& [u, v] : edges) EXPECT_TRUE(lg.graph.adjacent(u, v));
    EXPECT_EQ(lg.graph.size(), subtree_vertices(e).size());
    EXPECT_GE(labels_used(e), lg.label_set().size());
    EXPECT_GE(labels_used(e), max_live_labels(e));
    EXPECT_EQ(parse_expr(print(e)), e);
    if (is_linear(e)) {
      EXPECT_TRUE(defines(from_events(linearize(e)), lg.graph));
    }
  }
}

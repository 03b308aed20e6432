#include <doctest.h>
#include <numeric>

#include "cliquewalk/graph.hpp"

using namespace cliquewalk;

TEST_SUITE("graph") {

TEST_CASE("edge-list parsing") {
  Graph p3 = load_graph("1 2\n2 3");
  CHECK(p3.n() == 3);
  CHECK(p3.edges().size() == 2);
  CHECK(p3.has_edge(0, 1));
  CHECK(p3.has_edge(1, 2));

  CHECK_THROWS_AS(load_graph("1 2\n1 2"), DuplicateEdgeError);
  CHECK_THROWS_AS(load_graph("1 2\n2 1"), DuplicateEdgeError);
  CHECK_THROWS_AS(load_graph("1 2\n3 4"), DisconnectedError);
  CHECK_THROWS_AS(load_graph("1 1"), SelfLoopError);
  CHECK_THROWS_AS(load_graph("1 two"), ParseError);
  CHECK_THROWS_AS(load_graph("1 2 3 4"), ParseError);
  CHECK_THROWS_AS(load_graph("0 2"), ParseError);
  CHECK_THROWS_AS(load_graph(""), ParseError);
  CHECK_THROWS_AS(load_graph("1 2 0"), ParseError);

  Graph weighted = load_graph("# comment\n1 2 5\n\n2 3");
  CHECK(weighted.edge_weight(0, 1) == 5);
  CHECK(weighted.edge_weight(1, 2) == 1);
  CHECK(weighted.weight_bound() == 5);
}

TEST_CASE("transition matrix") {
  Graph edge = load_graph("1 2");
  TransitionMatrix t = transition_matrix(edge);
  CHECK(t.p.at(0, 0) == 0.0);
  CHECK(t.p.at(0, 1) == 1.0);
  CHECK(t.p.at(1, 0) == 1.0);
  CHECK(t.error_budget == 0.0);
  CHECK(t.power == 1);

  TransitionMatrix k3 = transition_matrix(corpus::get("K3"));
  for (int i = 0; i < 3; ++i) {
    CHECK(k3.p.at(i, i) == 0.0);
    for (int j = 0; j < 3; ++j) {
      if (i != j) CHECK(k3.p.at(i, j) == 0.5);
    }
  }

  // Star: hub row uniform over leaves, leaf rows concentrated on the hub.
  Graph s3 = corpus::get("S3");
  TransitionMatrix ts = transition_matrix(s3);
  for (int leaf = 0; leaf < 3; ++leaf) {
    CHECK(ts.p.at(leaf, 3) == 1.0);
    CHECK(ts.p.at(3, leaf) == doctest::Approx(1.0 / 3.0));
  }
}

TEST_CASE("laplacian") {
  Graph edge = load_graph("1 2");
  Laplacian l = laplacian(edge);
  CHECK(l.at(0, 0) == 1);
  CHECK(l.at(0, 1) == -1);
  CHECK(l.at(1, 0) == -1);
  CHECK(l.at(1, 1) == 1);

  Laplacian lk3 = laplacian(corpus::get("K3"));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(lk3.at(i, j) == (i == j ? 2 : -1));

  Laplacian lp3 = laplacian(corpus::get("P3"));
  CHECK(lp3.at(0, 0) == 1);
  CHECK(lp3.at(1, 1) == 2);
  CHECK(lp3.at(2, 2) == 1);
  CHECK(lp3.at(0, 2) == 0);
}

TEST_CASE("row sums and laplacian kernel over the corpus") {
  for (const auto& name : corpus::names()) {
    Graph g = corpus::get(name);
    TransitionMatrix t = transition_matrix(g);
    for (int u = 0; u < g.n(); ++u) {
      // Rational exactness: numerators over the common denominator add up.
      int64_t num_sum = 0;
      for (auto [v, w] : g.neighbors(u)) {
        (void)v;
        num_sum += w;
      }
      CHECK(num_sum == g.weighted_degree(u));
      CHECK(t.row_sum(u) == doctest::Approx(1.0).epsilon(1e-12));

      Laplacian l = laplacian(g);
      int64_t row = 0;
      for (int v = 0; v < g.n(); ++v) row += l.at(u, v);
      CHECK(row == 0);
    }
  }
}

TEST_CASE("transition entries invariant under uniform weight scaling") {
  Graph g = corpus::get("K4me");
  std::vector<Edge> scaled;
  for (Edge e : g.edges()) {
    e.w *= 3;
    scaled.push_back(e);
  }
  Graph g3 = Graph::from_edges(g.n(), scaled);
  for (int u = 0; u < g.n(); ++u) {
    for (int v = 0; v < g.n(); ++v) {
      CHECK(g.transition_entry_rational(u, v) == g3.transition_entry_rational(u, v));
    }
  }
}

TEST_CASE("corpus") {
  CHECK(corpus::names().size() == 10);
  for (const auto& name : corpus::names()) {
    Graph g = corpus::get(name);
    CHECK(g.n() >= 2);
    // Round-trips through the text format.
    Graph back = load_graph(corpus::edge_list_text(name));
    CHECK(back.n() == g.n());
    CHECK(back.edges().size() == g.edges().size());
  }
  Graph pet = corpus::get("petersen");
  CHECK(pet.n() == 10);
  for (int v = 0; v < 10; ++v) CHECK(pet.neighbors(v).size() == 3);
  CHECK_THROWS_AS(corpus::get("K99"), Error);
}

}  // TEST_SUITE

#include <gtest/gtest.h>

#include <sstream>

#include "hamres/error.hpp"
#include "hamres/graph.hpp"
#include "oracles.hpp"

using namespace hamres;

namespace {

Graph path3() { return Graph::from_edges(3, {{0, 1}, {1, 2}}); }
Graph triangle() { return Graph::from_edges(3, {{0, 1}, {0, 2}, {1, 2}}); }
Graph complete(std::size_t n) {
  std::vector<Edge> e;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) e.push_back({u, v});
  return Graph::from_edges(n, e);
}
Graph cycle(std::size_t n) {
  std::vector<Edge> e;
  for (Vertex v = 0; v < n; ++v) e.push_back(make_edge(v, (v + 1) % n));
  return Graph::from_edges(n, e);
}

}  // namespace

TEST(Graph, RejectsLoopsAndDuplicates) {
  EXPECT_THROW(Graph::from_edges(3, {{1, 1}}), InputError);
  EXPECT_THROW(Graph::from_edges(3, {{0, 1}, {0, 1}}), InputError);
  EXPECT_THROW(Graph::from_edges(3, {{0, 3}}), InputError);
}

TEST(Graph, DegreeSumIsTwiceEdgeCount) {
  std::mt19937_64 gen(7);
  for (int t = 0; t < 20; ++t) {
    Graph g = oracle::random_graph(25, 0.2, gen);
    std::size_t sum = 0;
    for (Vertex v = 0; v < g.n(); ++v) {
      sum += g.degree(v);
      for (Vertex w : g.neighbors(v)) EXPECT_TRUE(g.has_edge(w, v));
    }
    EXPECT_EQ(sum, 2 * g.m());
  }
}

TEST(Neighborhood, PathExamples) {
  Graph g = path3();
  EXPECT_EQ(neighborhood_within(g, 0, 1), (VertexSet{1}));
  EXPECT_EQ(neighborhood_within(g, 0, 2), (VertexSet{1, 2}));
  EXPECT_THROW(neighborhood_within(g, 5, 1), InputError);
}

TEST(Neighborhood, MatchesBfsAndIsMonotone) {
  std::mt19937_64 gen(11);
  for (int t = 0; t < 20; ++t) {
    Graph g = oracle::random_graph(20, 0.3, gen);
    for (Vertex v = 0; v < g.n(); ++v) {
      auto dist = oracle::bfs_distances(g, v);
      std::vector<Vertex> want;
      for (Vertex u = 0; u < g.n(); ++u)
        if (u != v && dist[u] > 0 && dist[u] <= 3) want.push_back(u);
      EXPECT_EQ(neighborhood_within(g, v, 3), VertexSet(want));
      EXPECT_TRUE(is_subset(neighborhood_within(g, v, 1), neighborhood_within(g, v, 2)));
    }
  }
}

TEST(EdgeCount, TriangleConventions) {
  Graph g = triangle();
  EXPECT_EQ(edge_count_between(g, {0, 1, 2}, {0, 1, 2}), 6u);
  EXPECT_EQ(edge_count_between(g, {0}, {1, 2}), 2u);
  EXPECT_EQ(edge_count_within(g, {0, 1, 2}), 3u);
}

TEST(EdgeCount, MatchesPairEnumeration) {
  std::mt19937_64 gen(13);
  for (int t = 0; t < 30; ++t) {
    Graph g = oracle::random_graph(30, 0.2, gen);
    VertexSet x(oracle::random_subset(30, 0.4, gen));
    VertexSet y(oracle::random_subset(30, 0.4, gen));
    std::size_t want = 0;
    for (Vertex a : x)
      for (Vertex b : y) want += g.has_edge(a, b);
    EXPECT_EQ(edge_count_between(g, x, y), want);
    EXPECT_EQ(edge_count_between(g, x, x), 2 * edge_count_within(g, x));
  }
}

TEST(Subtract, Examples) {
  std::mt19937_64 gen(17);
  Graph g = oracle::random_graph(15, 0.4, gen);
  EXPECT_EQ(subtract(g, Graph(15)), g);

  Graph h = oracle::random_graph(15, 0.4, gen);
  Graph diff = subtract(g, h);
  std::vector<Edge> common;
  for (const Edge& e : h.edges())
    if (g.has_edge(e.u, e.v)) common.push_back(e);
  EXPECT_EQ(add_edges(diff, common), g);

  Graph c4 = subtract(complete(4), Graph::from_edges(4, {{0, 1}, {2, 3}}));
  EXPECT_EQ(c4, Graph::from_edges(4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}}));
  for (Vertex v = 0; v < 4; ++v) EXPECT_EQ(c4.degree(v), 2u);

  EXPECT_THROW(subtract(g, Graph(14)), InputError);
}

TEST(TwoIndependent, Examples) {
  EXPECT_EQ(greedy_2_independent_set(cycle(6), {0, 1, 2, 3, 4, 5}, 2), (VertexSet{0, 3}));

  Graph star = Graph::from_edges(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
  EXPECT_EQ(greedy_2_independent_set(star, {1, 2, 3, 4, 5}, 2).size(), 1u);

  Graph empty(10);
  EXPECT_EQ(greedy_2_independent_set(empty, empty.active_vertices(), 10).size(), 10u);
}

TEST(TwoIndependent, C6PairOracle) {
  // {0,3} is the only valid pair containing 0, and greedy takes 0 first.
  Graph g = cycle(6);
  std::vector<std::pair<Vertex, Vertex>> valid;
  for (Vertex a = 0; a < 6; ++a)
    for (Vertex b = a + 1; b < 6; ++b)
      if (!neighborhood_within(g, a, 2).contains(b)) valid.push_back({a, b});
  EXPECT_EQ(valid, (std::vector<std::pair<Vertex, Vertex>>{{0, 3}, {1, 4}, {2, 5}}));
}

TEST(TwoIndependent, MembersFarApart) {
  std::mt19937_64 gen(19);
  for (int t = 0; t < 30; ++t) {
    Graph g = oracle::random_graph(40, 0.08, gen);
    VertexSet s = greedy_2_independent_set(g, g.active_vertices(), 40);
    for (Vertex u : s) {
      auto near = neighborhood_within(g, u, 2);
      for (Vertex w : s)
        if (w != u) EXPECT_FALSE(near.contains(w));
    }
  }
}

TEST(EdgeList, RoundTripAndRejects) {
  std::mt19937_64 gen(23);
  Graph g = oracle::random_graph(12, 0.3, gen);
  std::stringstream ss;
  write_edge_list(ss, g);
  EXPECT_EQ(read_edge_list(ss), g);

  std::stringstream unsorted("3 2\n2 1\n0 1\n");
  EXPECT_EQ(read_edge_list(unsorted), path3());
  std::stringstream dup("3 2\n0 1\n1 0\n");
  EXPECT_THROW(read_edge_list(dup), InputError);
  std::stringstream loop("3 1\n1 1\n");
  EXPECT_THROW(read_edge_list(loop), InputError);
}

TEST(Graph, MaskKeepsIds) {
  Graph g = triangle().without_vertices({1});
  EXPECT_EQ(g.n(), 3u);
  EXPECT_EQ(g.active_count(), 2u);
  EXPECT_FALSE(g.is_active(1));
  EXPECT_EQ(g.m(), 1u);
  EXPECT_EQ(g.active_vertices(), (VertexSet{0, 2}));
}

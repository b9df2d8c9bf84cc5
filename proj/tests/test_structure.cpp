#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "hamres/matching.hpp"
#include "hamres/random_process.hpp"
#include "hamres/structure.hpp"
#include "oracles.hpp"

using namespace hamres;

namespace {

std::vector<Vertex> mask_to_ids(const std::vector<bool>& in) {
  std::vector<Vertex> out;
  for (Vertex v = 0; v < in.size(); ++v)
    if (in[v]) out.push_back(v);
  return out;
}

Graph regular_circulant(std::size_t n, std::size_t half_degree) {
  std::vector<Edge> e;
  for (Vertex v = 0; v < n; ++v)
    for (std::size_t s = 1; s <= half_degree; ++s) e.push_back(make_edge(v, Vertex((v + s) % n)));
  return Graph::from_edges(n, e);
}

}  // namespace

TEST(TwoCore, Examples) {
  Graph tri_pendant = Graph::from_edges(4, {{0, 1}, {0, 2}, {1, 2}, {2, 3}});
  auto r = two_core(tri_pendant);
  EXPECT_EQ(r.core.active_vertices(), (VertexSet{0, 1, 2}));
  EXPECT_EQ(r.removed, (std::vector<Vertex>{3}));

  Graph p5 = Graph::from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  auto q = two_core(p5);
  EXPECT_EQ(q.core.active_count(), 0u);
  EXPECT_EQ(q.removed.size(), 5u);
}

TEST(TwoCore, MatchesSubsetOracle) {
  std::mt19937_64 gen(31);
  for (int t = 0; t < 50; ++t) {
    Graph g = oracle::random_graph(10, 0.1 + 0.02 * (t % 10), gen);
    EXPECT_EQ(two_core(g).core.active_vertices(), VertexSet(mask_to_ids(oracle::subset_two_core(g))));
  }
}

TEST(TwoCore, OrderInvariantAndFixpoint) {
  std::mt19937_64 gen(37);
  for (int t = 0; t < 30; ++t) {
    Graph g = oracle::random_graph(40, 0.05, gen);
    auto base = two_core(g);
    EXPECT_EQ(base.core.active_vertices(), VertexSet(mask_to_ids(oracle::naive_two_core(g))));
    std::vector<Vertex> order(g.n());
    std::iota(order.begin(), order.end(), 0);
    for (int k = 0; k < 10; ++k) {
      std::shuffle(order.begin(), order.end(), gen);
      EXPECT_EQ(two_core(g, order).core, base.core);
    }
    EXPECT_EQ(two_core(base.core).core, base.core);
    if (base.core.active_count() > 0) EXPECT_GE(base.core.min_degree(), 2u);
  }
}

TEST(RemoveIsolated, Examples) {
  EXPECT_EQ(remove_isolated(Graph(5)).active_count(), 0u);
  Graph g = remove_isolated(Graph::from_edges(5, {{0, 1}, {1, 2}, {0, 2}}));
  EXPECT_EQ(g.active_vertices(), (VertexSet{0, 1, 2}));
  std::mt19937_64 gen(41);
  for (int t = 0; t < 20; ++t) {
    Graph h = remove_isolated(oracle::random_graph(30, 0.04, gen));
    if (h.active_count() > 0) EXPECT_GE(h.min_degree(), 1u);
  }
}

TEST(Classify, RegularGraphIsClean) {
  Graph g = regular_circulant(20, 2);  // 4-regular
  const double p = 4.0 / 20;
  auto c = classify(g, p, 0.9, 0.05);
  EXPECT_TRUE(c.tiny.empty());
  EXPECT_TRUE(c.atyp.empty());
}

TEST(Classify, Star) {
  std::vector<Edge> e;
  for (Vertex v = 1; v < 10; ++v) e.push_back({0, v});
  Graph star = Graph::from_edges(10, e);
  auto c = classify(star, 0.5, 0.3, 0.7);  // np = 5
  EXPECT_EQ(c.tiny, (VertexSet{1, 2, 3, 4, 5, 6, 7, 8, 9}));
  EXPECT_TRUE(c.atyp.contains(0));
}

TEST(Classify, Monotone) {
  std::mt19937_64 gen(43);
  for (int t = 0; t < 20; ++t) {
    Graph g = oracle::random_graph(100, 0.05, gen);
    const double p = graph_density(g);
    auto a = classify(g, p, 0.2, 0.6);
    auto b = classify(g, p, 0.4, 0.6);
    EXPECT_TRUE(is_subset(a.tiny, b.tiny));
    EXPECT_TRUE(is_subset(b.tiny, b.atyp));  // 0.4 <= 1 - 0.6
  }
}

TEST(Classify, AtypicalSetIsSmall) {
  // |ATYP| <= n / (ln n)^3 once np is large enough for the degree tails to
  // be negligible: G(2000, 5 ln n / n) with delta = 0.6, over 20 samples.
  const std::size_t n = 2000;
  const double p = 5 * std::log(double(n)) / n;
  const double bound = n / std::pow(std::log(double(n)), 3);
  int ok = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto c = classify(sample_gnp(n, p, s), p, 0.2, 0.6);
    ok += double(c.atyp.size()) <= bound;
  }
  EXPECT_GE(ok, 19);
}

TEST(Classify, AtypicalCountTracksBinomialTails) {
  // At p = ln n / n the bound above is not reached at this n; the mean size
  // of ATYP should instead match n times the two-sided tail of Bin(n - 1, p)
  // outside [(1 - delta) np, (1 + delta) np].
  const std::size_t n = 2000;
  const double p = std::log(double(n)) / n, delta = 0.6, np = n * p;
  double tail = 0, term = std::pow(1 - p, double(n - 1));
  for (std::size_t k = 0; k < n; ++k) {
    if (double(k) < (1 - delta) * np || double(k) > (1 + delta) * np) tail += term;
    term *= double(n - 1 - k) / double(k + 1) * p / (1 - p);
  }
  const int samples = 20;
  double total = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    auto c = classify(sample_gnp(n, p, 100 + s), p, 0.2, delta);
    total += double(c.atyp.size());
  }
  const double expect = n * tail, mean = total / samples;
  EXPECT_NEAR(mean, expect, 5 * std::sqrt(expect / samples) + 1);
}

TEST(Scatter, RegularPasses) {
  Graph g = regular_circulant(30, 3);
  const double p = 6.0 / 30;
  EXPECT_TRUE(check_scatter(g, g, p, p, 0.5, 3, 2).pass());
}

TEST(Scatter, AdjacentLeavesFail) {
  // Leaves 0 and 2 plus the degree-2 vertex 1 hang off a K9; with k = 3 the
  // third neighbourhood of vertex 3 holds three tiny vertices.
  std::vector<Edge> e;
  for (Vertex u = 3; u < 12; ++u)
    for (Vertex v = u + 1; v < 12; ++v) e.push_back({u, v});
  e.push_back({0, 1});
  e.push_back({1, 3});
  e.push_back({2, 3});
  Graph g = Graph::from_edges(12, e);
  const double p = graph_density(g);
  auto r = check_scatter(g, g, p, p, 0.5, 3, 2);
  EXPECT_FALSE(r.tiny_near.pass);
  ASSERT_TRUE(r.tiny_near.center.has_value());
  // Re-check the witness against the definition.
  auto near = neighborhood_within(g, *r.tiny_near.center, 3);
  std::size_t count = 0;
  for (Vertex v : r.tiny_near.witness) {
    EXPECT_TRUE(near.contains(v));
    EXPECT_TRUE(r.tiny.contains(v));
    ++count;
  }
  EXPECT_GT(count, r.tiny_near.bound);
}

TEST(Scatter, ShortCycleWitness) {
  // 4-cycle with two tiny vertices opposite each other.
  Graph g = Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  auto r = check_short_cycles(g, {0, 2}, 4, 1, "cyc");
  EXPECT_FALSE(r.pass);
  EXPECT_TRUE(oracle::hamiltonian_by_permutation(g.induced(VertexSet(r.witness))));
}

TEST(EdgeDistribution, WholeVertexSet) {
  std::mt19937_64 gen(47);
  Graph g = oracle::random_graph(200, 0.05, gen);
  const double p = 0.05, n = 200;
  const double want = std::abs(2.0 * g.m() - n * n * p) / (n * std::sqrt(n * p));
  EXPECT_NEAR(edge_distribution_ratio(g, g.active_vertices(), g.active_vertices(), p), want, 1e-12);

  Graph empty(200);
  auto r = check_edge_distribution(empty, 0.5, kDefaultEdgeDistributionC);
  EXPECT_FALSE(r.within_bound());
  EXPECT_TRUE(r.c_is_default);
}

TEST(EdgeDistribution, RandomGraphWithinDefaultConstant) {
  int ok = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    EdgeDistributionOptions o;
    o.seed = s;
    o.random_pairs = 2000;
    ok += check_edge_distribution(sample_gnp(1000, 0.01, s), 0.01, kDefaultEdgeDistributionC, o).within_bound();
  }
  EXPECT_GE(ok, 9);
}

TEST(Codegree, Examples) {
  EXPECT_TRUE(check_codegree(Graph::from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}})).pass);
  auto k23 = Graph::from_edges(5, {{0, 2}, {0, 3}, {0, 4}, {1, 2}, {1, 3}, {1, 4}});
  auto r = check_codegree(k23);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.witness, (std::pair<Vertex, Vertex>{0, 1}));
}

TEST(Codegree, SparseRandomGraph) {
  const std::size_t n = 2000;
  const double p = std::pow(double(n), -0.9);
  int ok = 0;
  for (std::uint64_t s = 0; s < 10; ++s) ok += check_codegree(sample_gnp(n, p, s)).pass;
  EXPECT_GE(ok, 9);
}

TEST(Degenerate, Examples) {
  // Degrees into both sides count, so a complete bipartite graph between A
  // and B leaves every vertex with none in its own side.
  std::vector<Edge> e;
  for (Vertex a = 0; a < 5; ++a)
    for (Vertex b = 5; b < 10; ++b) e.push_back({a, b});
  Graph kb = Graph::from_edges(11, e);
  VertexSet A{0, 1, 2, 3, 4}, B{5, 6, 7, 8, 9};
  EXPECT_EQ(degenerate_set(kb, A, B, 0.1, 0.1).size(), 10u);
  std::vector<Edge> all;
  for (Vertex u = 0; u < 10; ++u)
    for (Vertex v = u + 1; v < 10; ++v) all.push_back({u, v});
  Graph k10 = Graph::from_edges(11, all);
  EXPECT_TRUE(degenerate_set(k10, A, B, 0.1, 0.1).empty());
  // Vertex 10 is isolated and sits in B.
  VertexSet B2{5, 6, 7, 8, 9, 10};
  EXPECT_TRUE(degenerate_set(k10, A, B2, 0.1, 0.1).contains(10));
}

TEST(Degenerate, MatchesRecount) {
  std::mt19937_64 gen(53);
  Graph g = oracle::random_graph(60, 0.2, gen);
  std::vector<Vertex> a, b;
  for (Vertex v = 0; v < 60; ++v) (v % 2 ? a : b).push_back(v);
  VertexSet A(a), B(b);
  const double p1 = 0.2, eps = 0.1;
  std::vector<Vertex> want;
  for (Vertex v = 0; v < 60; ++v) {
    std::size_t da = 0, db = 0;
    for (Vertex w : g.neighbors(v)) (A.contains(w) ? da : db)++;
    if (da < (0.5 + eps / 7) * A.size() * p1 || db < (0.5 + eps / 7) * B.size() * p1) want.push_back(v);
  }
  EXPECT_EQ(degenerate_set(g, A, B, p1, eps), VertexSet(want));
}

TEST(Cherry, Examples) {
  EXPECT_EQ(cherry_count(Graph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}})), 3u);
  EXPECT_EQ(cherry_count(Graph::from_edges(3, {{0, 1}, {1, 2}})), 1u);
}

TEST(Cherry, ImpliesNoPerfectMatching) {
  std::mt19937_64 gen(59);
  int seen = 0;
  for (int t = 0; t < 300; ++t) {
    Graph g = remove_isolated(oracle::random_graph(12, 0.15, gen));
    if (g.active_count() % 2 || cherry_count(g) == 0) continue;
    ++seen;
    EXPECT_FALSE(has_perfect_matching(g));
  }
  EXPECT_GT(seen, 10);
}

TEST(Cherry, AbundantBelowThreshold) {
  const std::size_t n = 2000;
  const std::size_t m = std::size_t(std::ceil(0.2 * n * std::log(double(n))));
  int hits = 0;
  for (std::uint64_t s = 0; s < 20; ++s) hits += cherry_count(graph_at(sample_process(n, m, s), m)) > 0;
  EXPECT_GE(hits, 18);
}

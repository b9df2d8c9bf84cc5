#pragma once

// Slow reference implementations used only by tests. None of these call into
// the library beyond the Graph accessors.

#include <algorithm>
#include <cstdint>
#include <queue>
#include <random>
#include <set>
#include <vector>

#include "hamres/graph.hpp"

namespace oracle {

using hamres::Edge;
using hamres::Graph;
using hamres::Vertex;
using hamres::VertexSet;

inline Graph random_graph(std::size_t n, double p, std::mt19937_64& gen) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (coin(gen)) edges.push_back({u, v});
  return Graph::from_edges(n, edges);
}

inline std::vector<std::vector<bool>> adjacency_matrix(const Graph& g) {
  std::vector<std::vector<bool>> a(g.n(), std::vector<bool>(g.n(), false));
  for (const Edge& e : g.edges()) a[e.u][e.v] = a[e.v][e.u] = true;
  return a;
}

// Plain BFS distances; -1 for unreachable.
inline std::vector<int> bfs_distances(const Graph& g, Vertex s) {
  std::vector<int> dist(g.n(), -1);
  std::queue<Vertex> q;
  dist[s] = 0;
  q.push(s);
  while (!q.empty()) {
    Vertex x = q.front();
    q.pop();
    for (Vertex y : g.neighbors(x))
      if (dist[y] < 0) {
        dist[y] = dist[x] + 1;
        q.push(y);
      }
  }
  return dist;
}

namespace detail {
inline std::size_t matching_rec(const std::vector<std::vector<bool>>& a, std::vector<bool>& used, std::size_t from) {
  const std::size_t n = a.size();
  while (from < n && used[from]) ++from;
  if (from == n) return 0;
  used[from] = true;
  std::size_t best = matching_rec(a, used, from + 1);  // leave `from` unmatched
  for (std::size_t v = from + 1; v < n; ++v) {
    if (used[v] || !a[from][v]) continue;
    used[v] = true;
    best = std::max(best, 1 + matching_rec(a, used, from + 1));
    used[v] = false;
  }
  used[from] = false;
  return best;
}
}  // namespace detail

// Maximum matching size by exhaustive branching.
inline std::size_t max_matching_size(const Graph& g) {
  auto a = adjacency_matrix(g);
  std::vector<bool> used(g.n(), false);
  return detail::matching_rec(a, used, 0);
}

// Hamiltonicity over active vertices by trying every permutation.
inline bool hamiltonian_by_permutation(const Graph& g) {
  std::vector<Vertex> vs;
  for (Vertex v = 0; v < g.n(); ++v)
    if (g.is_active(v)) vs.push_back(v);
  if (vs.size() < 3) return false;
  auto a = adjacency_matrix(g);
  std::sort(vs.begin() + 1, vs.end());
  do {
    bool ok = a[vs.back()][vs.front()];
    for (std::size_t i = 0; ok && i + 1 < vs.size(); ++i) ok = a[vs[i]][vs[i + 1]];
    if (ok) return true;
  } while (std::next_permutation(vs.begin() + 1, vs.end()));
  return false;
}

namespace detail {
inline void longest_rec(const std::vector<std::vector<bool>>& a, std::vector<bool>& on, Vertex x, std::size_t len,
                        std::size_t& best) {
  best = std::max(best, len);
  for (Vertex y = 0; y < a.size(); ++y) {
    if (on[y] || !a[x][y]) continue;
    on[y] = true;
    longest_rec(a, on, y, len + 1, best);
    on[y] = false;
  }
}

inline void spanning_ends(const std::vector<std::vector<bool>>& a, const std::vector<bool>& allowed, std::vector<bool>& on,
                          Vertex x, std::size_t len, std::size_t target, std::set<Vertex>& ends) {
  if (len == target) {
    ends.insert(x);
    return;
  }
  for (Vertex y = 0; y < a.size(); ++y) {
    if (!allowed[y] || on[y] || !a[x][y]) continue;
    on[y] = true;
    spanning_ends(a, allowed, on, y, len + 1, target, ends);
    on[y] = false;
  }
}
}  // namespace detail

// Vertex count of a longest path, by DFS from every vertex.
inline std::size_t longest_path_vertices(const Graph& g) {
  auto a = adjacency_matrix(g);
  std::size_t best = 0;
  std::vector<bool> on(g.n(), false);
  for (Vertex v = 0; v < g.n(); ++v) {
    if (!g.is_active(v)) continue;
    on[v] = true;
    detail::longest_rec(a, on, v, 1, best);
    on[v] = false;
  }
  return best;
}

// Every x such that some path with vertex set exactly `vertices` runs from
// `fixed` to x.
inline std::set<Vertex> spanning_path_ends(const Graph& g, const std::vector<Vertex>& vertices, Vertex fixed) {
  auto a = adjacency_matrix(g);
  std::vector<bool> allowed(g.n(), false), on(g.n(), false);
  for (Vertex v : vertices) allowed[v] = true;
  std::set<Vertex> ends;
  on[fixed] = true;
  detail::spanning_ends(a, allowed, on, fixed, 1, vertices.size(), ends);
  return ends;
}

// Repeated removal of any vertex of degree ≤ 1, recomputing degrees from
// scratch each round.
inline std::vector<bool> naive_two_core(const Graph& g) {
  std::vector<bool> in(g.n());
  for (Vertex v = 0; v < g.n(); ++v) in[v] = g.is_active(v);
  for (bool changed = true; changed;) {
    changed = false;
    for (Vertex v = 0; v < g.n(); ++v) {
      if (!in[v]) continue;
      std::size_t d = 0;
      for (Vertex w : g.neighbors(v)) d += in[w];
      if (d <= 1) {
        in[v] = false;
        changed = true;
      }
    }
  }
  return in;
}

// Union of all vertex subsets whose induced subgraph has minimum degree ≥ 2;
// that union is the 2-core. Exponential, n ≤ ~12.
inline std::vector<bool> subset_two_core(const Graph& g) {
  const std::size_t n = g.n();
  auto a = adjacency_matrix(g);
  std::vector<bool> in(n, false);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    bool ok = true;
    for (Vertex v = 0; ok && v < n; ++v) {
      if (!(mask >> v & 1)) continue;
      int d = 0;
      for (Vertex w = 0; w < n; ++w) d += (mask >> w & 1) && a[v][w];
      ok = d >= 2;
    }
    if (!ok) continue;
    for (Vertex v = 0; v < n; ++v)
      if (mask >> v & 1) in[v] = true;
  }
  return in;
}

inline std::vector<Vertex> random_subset(std::size_t n, double p, std::mt19937_64& gen) {
  std::bernoulli_distribution coin(p);
  std::vector<Vertex> out;
  for (Vertex v = 0; v < n; ++v)
    if (coin(gen)) out.push_back(v);
  return out;
}

}  // namespace oracle

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

namespace hamres {

using Vertex = std::uint32_t;

// Unordered pair stored with u < v.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Normalizes the endpoint order. Does not reject loops; Graph does.
inline Edge make_edge(Vertex a, Vertex b) {
  return a < b ? Edge{a, b} : Edge{b, a};
}

// Sorted, duplicate-free set of vertex ids.
class VertexSet {
 public:
  VertexSet() = default;
  VertexSet(std::initializer_list<Vertex> ids);
  // Sorts and removes duplicates.
  explicit VertexSet(std::vector<Vertex> ids);

  bool contains(Vertex v) const;
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  std::span<const Vertex> ids() const { return ids_; }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }

  friend bool operator==(const VertexSet&, const VertexSet&) = default;

 private:
  std::vector<Vertex> ids_;
};

VertexSet set_union(const VertexSet& a, const VertexSet& b);
VertexSet set_intersection(const VertexSet& a, const VertexSet& b);
VertexSet set_difference(const VertexSet& a, const VertexSet& b);
bool is_subset(const VertexSet& a, const VertexSet& b);

// Immutable simple undirected graph on vertex ids [0, n).
//
// Vertices can be masked (inactive). A masked vertex keeps its id but has no
// edges and is ignored by degree statistics, so ids stay stable across
// peeling and isolated-vertex removal.
class Graph {
 public:
  Graph() = default;
  // Edgeless graph with all n vertices active.
  explicit Graph(std::size_t n);

  // Throws InputError on loops, duplicate edges or out-of-range endpoints.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges);
  static Graph from_edges(std::size_t n, std::initializer_list<Edge> edges) {
    return from_edges(n, std::span<const Edge>(edges.begin(), edges.size()));
  }

  std::size_t n() const { return adj_.size(); }
  std::size_t m() const { return m_; }
  std::size_t active_count() const { return active_count_; }

  std::size_t degree(Vertex v) const { return adj_[v].size(); }
  std::span<const Vertex> neighbors(Vertex v) const { return adj_[v]; }
  bool has_edge(Vertex a, Vertex b) const;
  bool is_active(Vertex v) const { return active_[v] != 0; }

  VertexSet active_vertices() const;
  // All edges, sorted lexicographically.
  std::vector<Edge> edges() const;

  // Minimum / maximum degree over active vertices; 0 when none are active.
  std::size_t min_degree() const;
  std::size_t max_degree() const;

  // Masks the given vertices and drops their incident edges.
  Graph without_vertices(const VertexSet& removed) const;
  // Keeps only the given vertices active.
  Graph induced(const VertexSet& keep) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::vector<Vertex>> adj_;
  std::vector<char> active_;
  std::size_t m_ = 0;
  std::size_t active_count_ = 0;
};

// Throws InputError unless v < g.n().
void check_vertex(const Graph& g, Vertex v);

// Byte mask of a vertex set, sized to n.
std::vector<char> membership_mask(std::size_t n, const VertexSet& s);

// |N(v) ∩ S| for a membership mask of S.
std::size_t degree_into(const Graph& g, Vertex v, const std::vector<char>& mask);

// All vertices at distance 1..ell from v, excluding v.
VertexSet neighborhood_within(const Graph& g, Vertex v, std::size_t ell);

// e(X, Y): edges with one endpoint in X and the other in Y. An edge with both
// endpoints in X ∩ Y is counted twice.
std::size_t edge_count_between(const Graph& g, const VertexSet& x, const VertexSet& y);
// e(X): edges with both endpoints in X, each counted once.
std::size_t edge_count_within(const Graph& g, const VertexSet& x);

// G - H. Requires g.n() == h.n().
Graph subtract(const Graph& g, const Graph& h);
Graph subtract(const Graph& g, std::span<const Edge> removed);
// G + E; edges already present are ignored. Endpoints must be active.
Graph add_edges(const Graph& g, std::span<const Edge> added);

// Greedy 2-independent set inside `within`: scan in ascending id order and
// take v unless it is within distance 2 of a vertex already taken. Stops once
// `target` vertices are taken; may return fewer.
VertexSet greedy_2_independent_set(const Graph& g, const VertexSet& within, std::size_t target);

// Edge-list text format: "n m" header then m lines "u v", u < v, sorted.
void write_edge_list(std::ostream& out, const Graph& g);
void write_edge_list(std::ostream& out, std::size_t n, std::span<const Edge> edges);
// Tolerates unsorted input and either endpoint order; rejects loops,
// duplicates, out-of-range ids and edge-count mismatches.
Graph read_edge_list(std::istream& in);

}  // namespace hamres

#include "hamres/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "hamres/error.hpp"

namespace hamres {

VertexSet::VertexSet(std::initializer_list<Vertex> ids) : VertexSet(std::vector<Vertex>(ids)) {}

VertexSet::VertexSet(std::vector<Vertex> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

bool VertexSet::contains(Vertex v) const {
  return std::binary_search(ids_.begin(), ids_.end(), v);
}

VertexSet set_union(const VertexSet& a, const VertexSet& b) {
  std::vector<Vertex> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return VertexSet(std::move(out));
}

VertexSet set_intersection(const VertexSet& a, const VertexSet& b) {
  std::vector<Vertex> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return VertexSet(std::move(out));
}

VertexSet set_difference(const VertexSet& a, const VertexSet& b) {
  std::vector<Vertex> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return VertexSet(std::move(out));
}

bool is_subset(const VertexSet& a, const VertexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

Graph::Graph(std::size_t n) : adj_(n), active_(n, 1), active_count_(n) {}

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
  Graph g(n);
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n) {
      throw InputError("edge endpoint out of range: " + std::to_string(e.u) + " " +
                       std::to_string(e.v) + " with n = " + std::to_string(n));
    }
    if (e.u == e.v) throw InputError("self-loop at vertex " + std::to_string(e.u));
    g.adj_[e.u].push_back(e.v);
    g.adj_[e.v].push_back(e.u);
  }
  for (Vertex v = 0; v < n; ++v) {
    auto& nb = g.adj_[v];
    std::sort(nb.begin(), nb.end());
    if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) {
      throw InputError("duplicate edge at vertex " + std::to_string(v));
    }
  }
  g.m_ = edges.size();
  return g;
}

bool Graph::has_edge(Vertex a, Vertex b) const {
  if (a >= n() || b >= n()) return false;
  const auto& small = adj_[a].size() <= adj_[b].size() ? adj_[a] : adj_[b];
  Vertex target = adj_[a].size() <= adj_[b].size() ? b : a;
  return std::binary_search(small.begin(), small.end(), target);
}

VertexSet Graph::active_vertices() const {
  std::vector<Vertex> out;
  out.reserve(active_count_);
  for (Vertex v = 0; v < n(); ++v) {
    if (active_[v]) out.push_back(v);
  }
  return VertexSet(std::move(out));
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(m_);
  for (Vertex u = 0; u < n(); ++u) {
    for (Vertex v : adj_[u]) {
      if (u < v) out.push_back({u, v});
    }
  }
  return out;
}

std::size_t Graph::min_degree() const {
  std::size_t best = 0;
  bool any = false;
  for (Vertex v = 0; v < n(); ++v) {
    if (!active_[v]) continue;
    if (!any || adj_[v].size() < best) best = adj_[v].size();
    any = true;
  }
  return best;
}

std::size_t Graph::max_degree() const {
  std::size_t best = 0;
  for (const auto& nb : adj_) best = std::max(best, nb.size());
  return best;
}

Graph Graph::without_vertices(const VertexSet& removed) const {
  Graph g = *this;
  auto mask = membership_mask(n(), removed);
  std::size_t dropped_twice = 0;
  for (Vertex v = 0; v < n(); ++v) {
    if (mask[v]) {
      dropped_twice += g.adj_[v].size();
      g.adj_[v].clear();
      if (g.active_[v]) {
        g.active_[v] = 0;
        --g.active_count_;
      }
      continue;
    }
    auto& nb = g.adj_[v];
    auto it = std::remove_if(nb.begin(), nb.end(), [&](Vertex u) { return mask[u] != 0; });
    dropped_twice += static_cast<std::size_t>(nb.end() - it);
    nb.erase(it, nb.end());
  }
  g.m_ -= dropped_twice / 2;
  return g;
}

Graph Graph::induced(const VertexSet& keep) const {
  return without_vertices(set_difference(active_vertices(), keep));
}

void check_vertex(const Graph& g, Vertex v) {
  if (v >= g.n()) {
    throw InputError("vertex " + std::to_string(v) + " out of range for n = " +
                     std::to_string(g.n()));
  }
}

std::vector<char> membership_mask(std::size_t n, const VertexSet& s) {
  std::vector<char> mask(n, 0);
  for (Vertex v : s) {
    if (v >= n) throw InputError("vertex " + std::to_string(v) + " out of range");
    mask[v] = 1;
  }
  return mask;
}

std::size_t degree_into(const Graph& g, Vertex v, const std::vector<char>& mask) {
  std::size_t d = 0;
  for (Vertex u : g.neighbors(v)) d += mask[u] != 0;
  return d;
}

VertexSet neighborhood_within(const Graph& g, Vertex v, std::size_t ell) {
  check_vertex(g, v);
  if (ell == 0) throw InputError("neighborhood radius must be positive");
  std::vector<Vertex> seen{v};
  std::vector<char> visited(g.n(), 0);
  visited[v] = 1;
  std::vector<Vertex> frontier{v};
  for (std::size_t depth = 0; depth < ell && !frontier.empty(); ++depth) {
    std::vector<Vertex> next;
    for (Vertex x : frontier) {
      for (Vertex y : g.neighbors(x)) {
        if (!visited[y]) {
          visited[y] = 1;
          next.push_back(y);
          seen.push_back(y);
        }
      }
    }
    frontier = std::move(next);
  }
  seen.erase(seen.begin());
  return VertexSet(std::move(seen));
}

std::size_t edge_count_between(const Graph& g, const VertexSet& x, const VertexSet& y) {
  auto in_y = membership_mask(g.n(), y);
  std::size_t total = 0;
  for (Vertex v : x) {
    check_vertex(g, v);
    total += degree_into(g, v, in_y);
  }
  return total;
}

std::size_t edge_count_within(const Graph& g, const VertexSet& x) {
  return edge_count_between(g, x, x) / 2;
}

Graph subtract(const Graph& g, const Graph& h) {
  if (g.n() != h.n()) {
    throw InputError("subtract: vertex sets differ (" + std::to_string(g.n()) + " vs " +
                     std::to_string(h.n()) + ")");
  }
  auto removed = h.edges();
  return subtract(g, removed);
}

Graph subtract(const Graph& g, std::span<const Edge> removed) {
  std::vector<Edge> sorted(removed.begin(), removed.end());
  for (auto& e : sorted) e = make_edge(e.u, e.v);
  std::sort(sorted.begin(), sorted.end());
  std::vector<Edge> kept;
  kept.reserve(g.m());
  for (const Edge& e : g.edges()) {
    if (!std::binary_search(sorted.begin(), sorted.end(), e)) kept.push_back(e);
  }
  Graph out = Graph::from_edges(g.n(), kept);
  auto inactive = set_difference(out.active_vertices(), g.active_vertices());
  return inactive.empty() ? out : out.without_vertices(inactive);
}

Graph add_edges(const Graph& g, std::span<const Edge> added) {
  std::vector<Edge> all = g.edges();
  for (const Edge& raw : added) {
    check_vertex(g, raw.u);
    check_vertex(g, raw.v);
    if (!g.is_active(raw.u) || !g.is_active(raw.v)) {
      throw InputError("add_edges: endpoint is masked");
    }
    Edge e = make_edge(raw.u, raw.v);
    all.push_back(e);
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  Graph out = Graph::from_edges(g.n(), all);
  auto inactive = set_difference(out.active_vertices(), g.active_vertices());
  return inactive.empty() ? out : out.without_vertices(inactive);
}

VertexSet greedy_2_independent_set(const Graph& g, const VertexSet& within, std::size_t target) {
  std::vector<char> blocked(g.n(), 0);
  std::vector<Vertex> taken;
  for (Vertex v : within) {
    if (taken.size() >= target) break;
    check_vertex(g, v);
    if (blocked[v]) continue;
    taken.push_back(v);
    blocked[v] = 1;
    for (Vertex u : g.neighbors(v)) {
      blocked[u] = 1;
      for (Vertex w : g.neighbors(u)) blocked[w] = 1;
    }
  }
  return VertexSet(std::move(taken));
}

void write_edge_list(std::ostream& out, std::size_t n, std::span<const Edge> edges) {
  std::vector<Edge> sorted(edges.begin(), edges.end());
  for (auto& e : sorted) e = make_edge(e.u, e.v);
  std::sort(sorted.begin(), sorted.end());
  out << n << ' ' << sorted.size() << '\n';
  for (const Edge& e : sorted) out << e.u << ' ' << e.v << '\n';
}

void write_edge_list(std::ostream& out, const Graph& g) {
  auto edges = g.edges();
  write_edge_list(out, g.n(), edges);
}

Graph read_edge_list(std::istream& in) {
  long long n = -1;
  long long m = -1;
  if (!(in >> n >> m) || n < 0 || m < 0) throw InputError("edge list: bad header");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    long long a = -1;
    long long b = -1;
    if (!(in >> a >> b)) throw InputError("edge list: expected " + std::to_string(m) + " edges");
    if (a < 0 || b < 0 || a >= n || b >= n) {
      throw InputError("edge list: endpoint out of range on edge " + std::to_string(i));
    }
    edges.push_back(make_edge(static_cast<Vertex>(a), static_cast<Vertex>(b)));
  }
  std::string trailing;
  if (in >> trailing) throw InputError("edge list: trailing data after " + std::to_string(m) + " edges");
  return Graph::from_edges(static_cast<std::size_t>(n), edges);
}

}  // namespace hamres

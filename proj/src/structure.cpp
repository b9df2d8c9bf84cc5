#include "hamres/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hamres/error.hpp"
#include "hamres/rng.hpp"

namespace hamres {

namespace {

// Peels vertices with degree < k; candidates are first visited in `order`.
CoreResult k_core(const Graph& g, std::size_t k, std::span<const Vertex> order) {
  std::vector<std::size_t> deg(g.n());
  std::vector<char> gone(g.n(), 0);
  for (Vertex v = 0; v < g.n(); ++v) {
    deg[v] = g.degree(v);
    gone[v] = !g.is_active(v);
  }
  std::vector<Vertex> stack;
  for (Vertex v : order) {
    check_vertex(g, v);
    if (!gone[v] && deg[v] < k) stack.push_back(v);
  }
  std::vector<Vertex> removed;
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    if (gone[v]) continue;
    gone[v] = 1;
    removed.push_back(v);
    for (Vertex u : g.neighbors(v)) {
      if (gone[u]) continue;
      if (--deg[u] < k) stack.push_back(u);
    }
  }
  return {g.without_vertices(VertexSet(removed)), removed};
}

// Bounded BFS reusing stamp arrays between calls.
class BoundedBfs {
 public:
  explicit BoundedBfs(std::size_t n) : stamp_(n, 0) {}

  // Visits N^radius(v) \ {v}; returns the visited vertices.
  const std::vector<Vertex>& run(const Graph& g, Vertex v, std::size_t radius) {
    ++epoch_;
    out_.clear();
    stamp_[v] = epoch_;
    frontier_.assign(1, v);
    for (std::size_t depth = 0; depth < radius && !frontier_.empty(); ++depth) {
      next_.clear();
      for (Vertex x : frontier_) {
        for (Vertex y : g.neighbors(x)) {
          if (stamp_[y] == epoch_) continue;
          stamp_[y] = epoch_;
          next_.push_back(y);
          out_.push_back(y);
        }
      }
      std::swap(frontier_, next_);
    }
    return out_;
  }

 private:
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<Vertex> frontier_;
  std::vector<Vertex> next_;
  std::vector<Vertex> out_;
};

struct CycleSearch {
  const Graph& g;
  const std::vector<char>& member;
  std::size_t max_len;
  std::size_t max_members;
  Vertex start = 0;
  std::vector<Vertex> path;
  std::vector<char> on_path;
  std::size_t members = 0;
  std::size_t best = 0;
  std::vector<Vertex> found;

  bool dfs(Vertex last) {
    for (Vertex u : g.neighbors(last)) {
      if (u == start && path.size() >= 3) {
        best = std::max(best, members);
        if (members > max_members) {
          found = path;
          return true;
        }
        continue;
      }
      if (on_path[u] || path.size() >= max_len) continue;
      // Cycles through vertices below the start are found from a smaller start
      // when that vertex is a member; non-members may sit anywhere.
      if (member[u] && u < start) continue;
      path.push_back(u);
      on_path[u] = 1;
      members += member[u] != 0;
      if (dfs(u)) return true;
      members -= member[u] != 0;
      on_path[u] = 0;
      path.pop_back();
    }
    return false;
  }
};

}  // namespace

CoreResult two_core(const Graph& g) {
  std::vector<Vertex> order(g.n());
  std::iota(order.begin(), order.end(), Vertex{0});
  return k_core(g, 2, order);
}

CoreResult two_core(const Graph& g, std::span<const Vertex> scan_order) {
  if (scan_order.size() != g.n()) throw InputError("two_core: scan order must cover every vertex");
  return k_core(g, 2, scan_order);
}

Graph remove_isolated(const Graph& g) {
  std::vector<Vertex> isolated;
  for (Vertex v = 0; v < g.n(); ++v) {
    if (g.is_active(v) && g.degree(v) == 0) isolated.push_back(v);
  }
  return g.without_vertices(VertexSet(std::move(isolated)));
}

double graph_density(const Graph& g) {
  double pairs = static_cast<double>(pair_count(g.active_count()));
  return pairs == 0 ? 0.0 : static_cast<double>(g.m()) / pairs;
}

Classification classify(const Graph& g, double p, double delta_t, double delta_a) {
  if (!(p > 0.0 && p <= 1.0)) throw InputError("classify: p must lie in (0, 1]");
  if (!(delta_t >= 0.0 && delta_t <= 1.0) || !(delta_a >= 0.0 && delta_a <= 1.0)) {
    throw InputError("classify: thresholds must lie in [0, 1]");
  }
  const double np = static_cast<double>(g.active_count()) * p;
  std::vector<Vertex> tiny;
  std::vector<Vertex> atyp;
  for (Vertex v = 0; v < g.n(); ++v) {
    if (!g.is_active(v)) continue;
    const auto d = static_cast<double>(g.degree(v));
    if (d < delta_t * np) tiny.push_back(v);
    if (d < (1.0 - delta_a) * np || d > (1.0 + delta_a) * np) atyp.push_back(v);
  }
  Classification cls;
  cls.p = p;
  cls.delta_t = delta_t;
  cls.delta_a = delta_a;
  cls.tiny = VertexSet(std::move(tiny));
  cls.atyp = VertexSet(std::move(atyp));
  return cls;
}

Classification classify_sandwich(const Graph& g_minus, const Graph& g_plus, double p0, double p1,
                                 double delta_t, double delta_a) {
  auto lo = classify(g_minus, p0, delta_t, delta_a);
  auto hi = classify(g_plus, p1, delta_t, delta_a);
  Classification cls;
  cls.p = p0;
  cls.p_upper = p1;
  cls.delta_t = delta_t;
  cls.delta_a = delta_a;
  cls.tiny = set_union(lo.tiny, hi.tiny);
  cls.atyp = set_union(lo.atyp, hi.atyp);
  return cls;
}

Classification restrict_to(const Classification& cls, const VertexSet& keep) {
  Classification out = cls;
  out.tiny = set_intersection(cls.tiny, keep);
  out.atyp = set_intersection(cls.atyp, keep);
  return out;
}

PropertyCheck check_neighborhood_bound(const Graph& g, const VertexSet& s, std::size_t radius,
                                       std::size_t bound, std::string name) {
  PropertyCheck check;
  check.name = std::move(name);
  check.bound = bound;
  if (s.empty()) return check;
  auto member = membership_mask(g.n(), s);
  BoundedBfs bfs(g.n());
  for (Vertex v = 0; v < g.n(); ++v) {
    if (!g.is_active(v)) continue;
    const auto& ball = bfs.run(g, v, radius);
    std::size_t count = 0;
    for (Vertex u : ball) count += member[u] != 0;
    check.observed = std::max(check.observed, count);
    if (count > bound) {
      check.pass = false;
      check.observed = count;
      check.center = v;
      for (Vertex u : ball) {
        if (member[u]) check.witness.push_back(u);
      }
      std::sort(check.witness.begin(), check.witness.end());
      return check;
    }
  }
  return check;
}

PropertyCheck check_short_cycles(const Graph& g, const VertexSet& s, std::size_t max_len,
                                 std::size_t max_members, std::string name) {
  PropertyCheck check;
  check.name = std::move(name);
  check.bound = max_members;
  if (s.empty() || max_len < 3) return check;
  auto member = membership_mask(g.n(), s);
  CycleSearch search{.g = g, .member = member, .max_len = max_len, .max_members = max_members, .path = {}, .on_path = {}, .found = {}};
  search.on_path.assign(g.n(), 0);
  for (Vertex start : s) {
    if (!g.is_active(start)) continue;
    search.start = start;
    search.path.assign(1, start);
    search.on_path[start] = 1;
    search.members = 1;
    bool hit = search.dfs(start);
    search.on_path[start] = 0;
    if (hit) {
      check.pass = false;
      check.observed = search.members;
      check.center = start;
      check.witness = search.found;
      return check;
    }
  }
  check.observed = search.best;
  return check;
}

ScatterReport check_scatter(const Graph& g_minus, const Graph& g_plus, double p0, double p1,
                            double delta, std::size_t k, std::size_t L) {
  if (k < 2) throw InputError("check_scatter: k must be at least 2");
  if (g_minus.n() != g_plus.n()) throw InputError("check_scatter: vertex sets differ");
  auto cls = classify_sandwich(g_minus, g_plus, p0, p1, delta, delta);
  ScatterReport report;
  report.delta = delta;
  report.k = k;
  report.L = L;
  report.cycle_cap = std::min<std::size_t>(2 * k, kMaxScatterCycle);
  report.tiny = cls.tiny;
  report.atyp = cls.atyp;
  report.tiny_near = check_neighborhood_bound(g_plus, cls.tiny, 3, k - 1, "tiny_in_third_neighbourhood");
  report.atyp_near = check_neighborhood_bound(g_plus, cls.atyp, 3, L, "atyp_in_third_neighbourhood");
  report.tiny_cycles = check_short_cycles(g_plus, cls.tiny, report.cycle_cap, k - 2, "tiny_on_short_cycle");
  return report;
}

ScatterReport check_scatter(const SandwichCoupling& c, double delta, std::size_t k, std::size_t L) {
  return check_scatter(c.g_minus, c.g_plus, c.p0, c.p1, delta, k, L);
}

std::vector<PropertyCheck> check_matching_scatter(const Graph& g, const Classification& cls,
                                                  std::size_t L) {
  return {check_neighborhood_bound(g, cls.tiny, 2, 1, "tiny_in_second_neighbourhood"),
          check_neighborhood_bound(g, cls.atyp, 2, L, "atyp_in_second_neighbourhood")};
}

std::vector<PropertyCheck> check_hamilton_scatter(const Graph& g, const Classification& cls,
                                                  std::size_t L) {
  return {check_neighborhood_bound(g, cls.tiny, 3, 2, "tiny_in_third_neighbourhood"),
          check_neighborhood_bound(g, cls.atyp, 2, L, "atyp_in_second_neighbourhood"),
          check_short_cycles(g, cls.tiny, 6, 1, "tiny_on_short_cycle")};
}

double edge_distribution_ratio(const Graph& g, const VertexSet& x, const VertexSet& y, double p) {
  const double n = static_cast<double>(g.active_count());
  const double sx = static_cast<double>(x.size());
  const double sy = static_cast<double>(y.size());
  const double scale = std::sqrt(sx * sy * n * p);
  const double e = static_cast<double>(edge_count_between(g, x, y));
  const double dev = std::abs(e - sx * sy * p);
  if (scale == 0) return dev == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  return dev / scale;
}

EdgeDistributionReport check_edge_distribution(const Graph& g, double p, double c,
                                               const EdgeDistributionOptions& options) {
  EdgeDistributionReport report;
  report.p = p;
  report.c = c;
  report.c_is_default = c == kDefaultEdgeDistributionC;
  const auto active = g.active_vertices();
  const std::size_t n = active.size();
  if (n == 0) return report;

  auto consider = [&](double ratio, std::size_t sx, std::size_t sy, const char* family) {
    ++report.pairs_evaluated;
    if (ratio > report.max_ratio || report.witness_family.empty()) {
      report.max_ratio = std::max(report.max_ratio, ratio);
      if (ratio >= report.max_ratio) {
        report.witness_x = sx;
        report.witness_y = sy;
        report.witness_family = family;
      }
    }
  };

  consider(edge_distribution_ratio(g, active, active, p), n, n, "whole_vertex_set");

  if (options.singletons) {
    // e({u},{v}) ∈ {0, 1}; the worst singleton pair is an edge (deviation
    // 1 - p) or a non-adjacent pair, including u = v (deviation p).
    const double scale = std::sqrt(static_cast<double>(n) * p);
    const double pairs = static_cast<double>(n) * static_cast<double>(n);
    if (scale > 0) {
      if (g.m() > 0) consider((1.0 - p) / scale, 1, 1, "singleton_edge");
      consider(p / scale, 1, 1, "singleton_non_edge");
    } else if (g.m() > 0) {
      consider(std::numeric_limits<double>::infinity(), 1, 1, "singleton_edge");
    }
    report.pairs_evaluated += static_cast<std::size_t>(pairs) - (g.m() > 0 ? 2 : 1);
  }

  if (options.degree_prefixes) {
    std::vector<Vertex> by_degree(active.begin(), active.end());
    std::stable_sort(by_degree.begin(), by_degree.end(),
                     [&](Vertex a, Vertex b) { return g.degree(a) > g.degree(b); });
    for (int direction = 0; direction < 2; ++direction) {
      for (std::size_t size = 1; size < n; size *= 2) {
        VertexSet prefix(std::vector<Vertex>(by_degree.begin(), by_degree.begin() + size));
        consider(edge_distribution_ratio(g, prefix, prefix, p), size, size, "degree_prefix_self");
        consider(edge_distribution_ratio(g, prefix, active, p), size, n, "degree_prefix_all");
      }
      std::reverse(by_degree.begin(), by_degree.end());
    }
  }

  if (options.random_pairs > 0) {
    Rng rng(options.seed);
    std::vector<Vertex> pool(active.begin(), active.end());
    const double log_n = std::log(static_cast<double>(n));
    auto random_subset = [&]() {
      auto size = static_cast<std::size_t>(std::exp(rng.uniform01() * log_n));
      size = std::clamp<std::size_t>(size, 1, n);
      for (std::size_t i = 0; i < size; ++i) {
        std::size_t j = i + rng.below(n - i);
        std::swap(pool[i], pool[j]);
      }
      return VertexSet(std::vector<Vertex>(pool.begin(), pool.begin() + size));
    };
    for (std::size_t i = 0; i < options.random_pairs; ++i) {
      auto x = random_subset();
      auto y = random_subset();
      consider(edge_distribution_ratio(g, x, y, p), x.size(), y.size(), "random_pair");
    }
  }
  return report;
}

CodegreeReport check_codegree(const Graph& g, std::size_t bound) {
  CodegreeReport report;
  report.bound = bound;
  std::vector<std::size_t> common(g.n(), 0);
  std::vector<Vertex> touched;
  for (Vertex u = 0; u < g.n(); ++u) {
    touched.clear();
    for (Vertex w : g.neighbors(u)) {
      for (Vertex v : g.neighbors(w)) {
        if (v <= u) continue;
        if (common[v]++ == 0) touched.push_back(v);
      }
    }
    std::sort(touched.begin(), touched.end());
    for (Vertex v : touched) {
      if (common[v] > bound && !report.witness) {
        report.pass = false;
        report.witness = std::make_pair(u, v);
      }
      common[v] = 0;
    }
    if (report.witness) return report;
  }
  return report;
}

VertexSet degenerate_set(const Graph& g, const VertexSet& a, const VertexSet& b, double p1, double eps) {
  auto in_a = membership_mask(g.n(), a);
  auto in_b = membership_mask(g.n(), b);
  for (Vertex v : a) {
    if (in_b[v]) throw InputError("degenerate_set: A and B must be disjoint");
  }
  const double factor = 0.5 + eps / 7.0;
  const double need_a = factor * static_cast<double>(a.size()) * p1;
  const double need_b = factor * static_cast<double>(b.size()) * p1;
  std::vector<Vertex> out;
  for (const VertexSet* side : {&a, &b}) {
    for (Vertex v : *side) {
      if (static_cast<double>(degree_into(g, v, in_a)) < need_a ||
          static_cast<double>(degree_into(g, v, in_b)) < need_b) {
        out.push_back(v);
      }
    }
  }
  return VertexSet(std::move(out));
}

std::size_t cherry_count(const Graph& g) {
  std::size_t total = 0;
  for (Vertex w = 0; w < g.n(); ++w) {
    std::size_t leaves = 0;
    for (Vertex u : g.neighbors(w)) leaves += g.degree(u) == 1;
    total += leaves * (leaves - (leaves > 0 ? 1 : 0)) / 2;
  }
  return total;
}

std::optional<std::pair<Vertex, Vertex>> find_cherry(const Graph& g) {
  for (Vertex w = 0; w < g.n(); ++w) {
    std::optional<Vertex> first;
    for (Vertex u : g.neighbors(w)) {
      if (g.degree(u) != 1) continue;
      if (first) return std::make_pair(*first, u);
      first = u;
    }
  }
  return std::nullopt;
}

}  // namespace hamres

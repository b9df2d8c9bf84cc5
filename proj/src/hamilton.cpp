#include "hamres/hamilton.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

#include "hamres/error.hpp"
#include "hamres/rng.hpp"

namespace hamres {

namespace {

using Adj = std::vector<std::vector<Vertex>>;

Adj adjacency_of(const Graph& g) {
  Adj adj(g.n());
  for (Vertex v = 0; v < g.n(); ++v) adj[v].assign(g.neighbors(v).begin(), g.neighbors(v).end());
  return adj;
}

bool adjacent(const Adj& adj, Vertex a, Vertex b) {
  const auto& na = adj[a];
  return std::find(na.begin(), na.end(), b) != na.end();
}

// Rotation BFS node. Paths here keep the fixed endpoint at q[0] and the free
// one at q.back(), the reverse of PathState, so rotations touch the tail.
struct BfsNode {
  std::vector<Vertex> q;
  int parent = -1;
  Vertex pivot = 0;
};

// Breadth-first search over free endpoints reachable by rotations. visit(i)
// is called once per node, in BFS order, and returns true to stop.
template <class Visit>
void rotation_bfs(const Adj& adj, const std::vector<char>& pivot_ok, std::vector<Vertex> root,
                  std::deque<BfsNode>& nodes, std::vector<int>& pos, std::vector<char>& seen, Visit&& visit) {
  nodes.clear();
  std::vector<Vertex> marked;
  seen[root.back()] = 1;
  marked.push_back(root.back());
  nodes.push_back({std::move(root), -1, 0});
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    if (visit(head)) break;
    const std::vector<Vertex>& q = nodes[head].q;
    const std::size_t k = q.size() - 1;
    if (k < 3) continue;
    for (std::size_t i = 0; i <= k; ++i) pos[q[i]] = static_cast<int>(i);
    const Vertex x = q[k];
    for (Vertex y : adj[x]) {
      const int j = pos[y];
      if (j < 1 || static_cast<std::size_t>(j) + 2 > k) continue;
      const Vertex e = q[j + 1];
      if (seen[e]) continue;
      if (!pivot_ok[y] || !pivot_ok[e] || !pivot_ok[q[j - 1]]) continue;
      seen[e] = 1;
      marked.push_back(e);
      BfsNode child{q, static_cast<int>(head), y};
      std::reverse(child.q.begin() + j + 1, child.q.end());
      nodes.push_back(std::move(child));
    }
    for (std::size_t i = 0; i <= k; ++i) pos[nodes[head].q[i]] = -1;
  }
  for (Vertex v : marked) seen[v] = 0;
}

std::vector<Vertex> pivots_to(const std::deque<BfsNode>& nodes, std::size_t i) {
  std::vector<Vertex> out;
  for (int at = static_cast<int>(i); nodes[at].parent >= 0; at = nodes[at].parent) out.push_back(nodes[at].pivot);
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<char> all_pivots(const Graph& g) {
  std::vector<char> ok(g.n(), 0);
  for (Vertex v = 0; v < g.n(); ++v) ok[v] = g.is_active(v);
  return ok;
}

// Subset DP over the active vertices of a graph with at most 20 of them.
class SubsetDp {
 public:
  explicit SubsetDp(const Graph& g, std::size_t cap) {
    for (Vertex v = 0; v < g.n(); ++v) {
      if (g.is_active(v)) ids_.push_back(v);
    }
    if (ids_.size() > cap) {
      throw InputError("exact solver limited to " + std::to_string(cap) + " vertices, got " +
                       std::to_string(ids_.size()));
    }
    std::vector<int> local(g.n(), -1);
    for (std::size_t i = 0; i < ids_.size(); ++i) local[ids_[i]] = static_cast<int>(i);
    adj_.assign(ids_.size(), 0);
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      for (Vertex u : g.neighbors(ids_[i])) adj_[i] |= 1u << local[u];
    }
  }

  std::size_t k() const { return ids_.size(); }
  std::vector<std::uint32_t>& adj() { return adj_; }
  Vertex id(std::size_t i) const { return ids_[i]; }
  int local(Vertex v) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), v);
    return it != ids_.end() && *it == v ? static_cast<int>(it - ids_.begin()) : -1;
  }

  // Paths from vertex 0: ends[mask] = vertices where a path covering mask can end.
  std::optional<std::vector<Vertex>> cycle() const {
    const std::size_t k = ids_.size();
    if (k < 3) return std::nullopt;
    const std::uint32_t full = (k == 32) ? ~0u : ((1u << k) - 1);
    std::vector<std::uint32_t> ends(std::size_t{1} << k, 0);
    ends[1] = 1;
    for (std::uint32_t mask = 1; mask <= full; mask += 2) {
      std::uint32_t e = ends[mask];
      while (e) {
        int v = std::countr_zero(e);
        e &= e - 1;
        std::uint32_t nb = adj_[v] & ~mask;
        while (nb) {
          int w = std::countr_zero(nb);
          nb &= nb - 1;
          ends[mask | (1u << w)] |= 1u << w;
        }
      }
    }
    std::uint32_t closing = ends[full] & adj_[0];
    if (!closing) return std::nullopt;
    std::vector<Vertex> seq;
    int v = std::countr_zero(closing);
    std::uint32_t mask = full;
    while (mask != 1) {
      seq.push_back(ids_[v]);
      std::uint32_t prev = mask ^ (1u << v);
      std::uint32_t from = ends[prev] & adj_[v];
      v = std::countr_zero(from);
      mask = prev;
    }
    seq.push_back(ids_[0]);
    return seq;
  }

  std::vector<Vertex> longest_path() const {
    const std::size_t k = ids_.size();
    if (k == 0) return {};
    std::vector<std::uint32_t> ends(std::size_t{1} << k, 0);
    for (std::size_t v = 0; v < k; ++v) ends[1u << v] = 1u << v;
    std::uint32_t best = 1;
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
      std::uint32_t e = ends[mask];
      if (!e) continue;
      if (std::popcount(mask) > std::popcount(best)) best = mask;
      while (e) {
        int v = std::countr_zero(e);
        e &= e - 1;
        std::uint32_t nb = adj_[v] & ~mask;
        while (nb) {
          int w = std::countr_zero(nb);
          nb &= nb - 1;
          ends[mask | (1u << w)] |= 1u << w;
        }
      }
    }
    std::vector<Vertex> seq;
    int v = std::countr_zero(ends[best]);
    std::uint32_t mask = best;
    while (true) {
      seq.push_back(ids_[v]);
      std::uint32_t prev = mask ^ (1u << v);
      if (prev == 0) break;
      v = std::countr_zero(ends[prev] & adj_[v]);
      mask = prev;
    }
    return seq;
  }

 private:
  std::vector<Vertex> ids_;
  std::vector<std::uint32_t> adj_;
};

// Rotation-extension on a mutable working graph with an optional reserve of
// edges that may be added (sprinkled) when the search is stuck.
class Engine {
 public:
  Engine(Adj adj, std::vector<char> active, std::vector<char> pivot_ok, Adj reserve, std::size_t budget,
         std::size_t fanout, std::uint64_t seed, SearchReport& report)
      : adj_(std::move(adj)),
        active_(std::move(active)),
        pivot_ok_(std::move(pivot_ok)),
        reserve_(std::move(reserve)),
        budget_(budget),
        fanout_(fanout),
        report_(report) {
    const std::size_t n = adj_.size();
    for (auto& r : reserve_) std::sort(r.begin(), r.end());
    on_path_.assign(n, 0);
    pos_.assign(n, -1);
    seen_.assign(n, 0);
    tie_.resize(n);
    std::iota(tie_.begin(), tie_.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(tie_);
    for (Vertex v = 0; v < n; ++v) active_count_ += active_[v] != 0;
  }

  std::optional<std::vector<Vertex>> run(Vertex start, std::size_t max_iterations) {
    set_path({start});
    for (std::size_t it = 0; it < max_iterations; ++it) {
      ++report_.iterations;
      grow();
      report_.best_path_len = std::max(report_.best_path_len, path_.size());
      Outcome out = explore();
      if (out.kind == Outcome::closed) return out.cycle;
      if (out.kind == Outcome::progress) continue;
      if (!sprinkle(out)) return std::nullopt;
    }
    return std::nullopt;
  }

 private:
  struct Outcome {
    enum Kind { progress, closed, stuck } kind = stuck;
    std::vector<Vertex> cycle;
    // Rotation-derived pairs (free endpoint, partner endpoint).
    std::vector<std::pair<Vertex, Vertex>> closing;
    std::vector<Vertex> endpoints;
  };

  void set_path(std::vector<Vertex> seq) {
    for (Vertex v : path_) on_path_[v] = 0;
    path_ = std::move(seq);
    for (Vertex v : path_) on_path_[v] = 1;
  }

  std::optional<Vertex> pick_off(Vertex x) const {
    std::optional<Vertex> best;
    for (Vertex z : adj_[x]) {
      if (on_path_[z]) continue;
      if (!best || adj_[z].size() < adj_[*best].size() ||
          (adj_[z].size() == adj_[*best].size() && tie_[z] < tie_[*best])) {
        best = z;
      }
    }
    return best;
  }

  void grow() {
    while (true) {
      if (auto z = pick_off(path_.back())) {
        path_.push_back(*z);
        on_path_[*z] = 1;
        continue;
      }
      if (auto z = pick_off(path_.front())) {
        std::reverse(path_.begin(), path_.end());
        path_.push_back(*z);
        on_path_[*z] = 1;
        continue;
      }
      break;
    }
  }

  // Checks one rotated path for an extension or a closing edge.
  bool inspect(const std::vector<Vertex>& q, Outcome& out) {
    const Vertex x = q.back();
    if (auto z = pick_off(x)) {
      std::vector<Vertex> next = q;
      next.push_back(*z);
      set_path(std::move(next));
      out.kind = Outcome::progress;
      return true;
    }
    if (q.size() >= 3 && adjacent(adj_, x, q.front())) {
      if (q.size() == active_count_) {
        out.kind = Outcome::closed;
        out.cycle = q;
        return true;
      }
      for (std::size_t t = 0; t < q.size(); ++t) {
        if (auto z = pick_off(q[t])) {
          std::vector<Vertex> next(q.begin() + static_cast<std::ptrdiff_t>(t) + 1, q.end());
          next.insert(next.end(), q.begin(), q.begin() + static_cast<std::ptrdiff_t>(t) + 1);
          next.push_back(*z);
          set_path(std::move(next));
          out.kind = Outcome::progress;
          return true;
        }
      }
    }
    return false;
  }

  Outcome explore() {
    Outcome out;
    if (path_.size() == active_count_ && path_.size() >= 3 && adjacent(adj_, path_.front(), path_.back())) {
      out.kind = Outcome::closed;
      out.cycle = path_;
      return out;
    }
    std::deque<BfsNode> first;
    std::vector<std::vector<Vertex>> rooted;
    bool done = false;
    rotation_bfs(adj_, pivot_ok_, path_, first, pos_, seen_, [&](std::size_t i) {
      if (inspect(first[i].q, out)) return done = true;
      out.endpoints.push_back(first[i].q.back());
      if (first[i].q.size() >= 2) out.closing.emplace_back(first[i].q.back(), first[i].q.front());
      if (rooted.size() < fanout_) rooted.push_back(first[i].q);
      return false;
    });
    if (done) return out;
    // Rotate the other end with each found endpoint held fixed.
    std::deque<BfsNode> second;
    for (auto& q : rooted) {
      std::reverse(q.begin(), q.end());
      const Vertex fixed = q.front();
      rotation_bfs(adj_, pivot_ok_, q, second, pos_, seen_, [&](std::size_t i) {
        if (inspect(second[i].q, out)) return done = true;
        if (i > 0) {
          out.closing.emplace_back(second[i].q.back(), fixed);
          out.endpoints.push_back(second[i].q.back());
        }
        return false;
      });
      if (done) return out;
    }
    out.kind = Outcome::stuck;
    return out;
  }

  bool in_reserve(Vertex a, Vertex b) const {
    return std::binary_search(reserve_[a].begin(), reserve_[a].end(), b);
  }

  bool sprinkle(const Outcome& out) {
    if (report_.e_prime_used >= budget_) return false;
    std::map<Vertex, std::vector<Vertex>> boosters;
    for (auto [x, y] : out.closing) {
      if (x == y || adjacent(adj_, x, y)) continue;
      boosters[x].push_back(y);
      boosters[y].push_back(x);
    }
    std::vector<std::pair<Vertex, Vertex>> realizable;
    for (auto& [x, ys] : boosters) {
      std::sort(ys.begin(), ys.end());
      ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
      report_.booster_candidates += ys.size();
      for (Vertex y : ys) {
        if (in_reserve(x, y)) realizable.emplace_back(x, y);
      }
    }
    // Reserve edges from an endpoint to a vertex off the path also lengthen it.
    for (Vertex x : out.endpoints) {
      for (Vertex z : reserve_[x]) {
        if (!on_path_[z] && active_[z]) realizable.emplace_back(x, z);
      }
    }
    if (realizable.empty()) return false;
    auto score = [&](Vertex x) {
      auto it = boosters.find(x);
      return it == boosters.end() ? std::size_t{0} : it->second.size();
    };
    auto best = *std::min_element(realizable.begin(), realizable.end(), [&](const auto& a, const auto& b) {
      std::size_t sa = score(a.first);
      std::size_t sb = score(b.first);
      if (sa != sb) return sa > sb;
      return a < b;
    });
    auto [x, y] = best;
    adj_[x].push_back(y);
    adj_[y].push_back(x);
    reserve_[x].erase(std::lower_bound(reserve_[x].begin(), reserve_[x].end(), y));
    reserve_[y].erase(std::lower_bound(reserve_[y].begin(), reserve_[y].end(), x));
    ++report_.e_prime_used;
    ++report_.boosters_realized;
    return true;
  }

  Adj adj_;
  std::vector<char> active_;
  std::vector<char> pivot_ok_;
  Adj reserve_;
  std::size_t budget_;
  std::size_t fanout_;
  SearchReport& report_;
  std::size_t active_count_ = 0;
  std::vector<Vertex> path_;
  std::vector<char> on_path_;
  std::vector<int> pos_;
  std::vector<char> seen_;
  std::vector<std::size_t> tie_;
};

PropertyCheck make_check(std::string name, bool pass, std::size_t bound, std::size_t observed) {
  PropertyCheck c;
  c.name = std::move(name);
  c.pass = pass;
  c.bound = bound;
  c.observed = observed;
  return c;
}

// |N(S) \ S| in g.
std::size_t outer_neighbourhood(const Graph& g, const std::vector<Vertex>& s, std::vector<char>& mark) {
  for (Vertex v : s) mark[v] = 2;
  std::size_t count = 0;
  std::vector<Vertex> touched;
  for (Vertex v : s) {
    for (Vertex u : g.neighbors(v)) {
      if (mark[u] == 0) {
        mark[u] = 1;
        touched.push_back(u);
        ++count;
      }
    }
  }
  for (Vertex v : s) mark[v] = 0;
  for (Vertex u : touched) mark[u] = 0;
  return count;
}

}  // namespace

bool is_path(const Graph& g, std::span<const Vertex> seq) {
  std::vector<char> seen(g.n(), 0);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i] >= g.n() || !g.is_active(seq[i]) || seen[seq[i]]) return false;
    seen[seq[i]] = 1;
    if (i > 0 && !g.has_edge(seq[i - 1], seq[i])) return false;
  }
  return true;
}

PathState rotate(const Graph& g, const PathState& p, std::size_t pivot_index) {
  const std::size_t ell = p.seq.size() == 0 ? 0 : p.seq.size() - 1;
  if (pivot_index < 2 || pivot_index + 1 > ell) {
    throw InputError("rotate: pivot index " + std::to_string(pivot_index) + " outside [2, l-1]");
  }
  if (!g.has_edge(p.seq[0], p.seq[pivot_index])) throw InputError("rotate: no chord from v0 to the pivot");
  PathState out = p;
  std::reverse(out.seq.begin(), out.seq.begin() + static_cast<std::ptrdiff_t>(pivot_index));
  return out;
}

std::optional<PathState> extend(const PathState& p, const Graph& g) {
  if (p.seq.empty()) return std::nullopt;
  std::vector<char> on(g.n(), 0);
  for (Vertex v : p.seq) on[v] = 1;
  auto off = [&](Vertex x) -> std::optional<Vertex> {
    for (Vertex z : g.neighbors(x)) {
      if (!on[z]) return z;
    }
    return std::nullopt;
  };
  PathState out = p;
  if (auto z = off(p.front())) {
    out.seq.insert(out.seq.begin(), *z);
    return out;
  }
  if (auto z = off(p.back())) {
    out.seq.push_back(*z);
    return out;
  }
  return std::nullopt;
}

EndpointClosure endpoint_closure(const Graph& g, const PathState& p, const VertexSet& allowed_pivots) {
  if (p.seq.empty()) return {};
  auto adj = adjacency_of(g);
  auto ok = membership_mask(g.n(), allowed_pivots);
  std::vector<Vertex> root(p.seq.rbegin(), p.seq.rend());
  std::deque<BfsNode> nodes;
  std::vector<int> pos(g.n(), -1);
  std::vector<char> seen(g.n(), 0);
  rotation_bfs(adj, ok, root, nodes, pos, seen, [](std::size_t) { return false; });
  EndpointClosure out;
  std::vector<Vertex> ends;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    ends.push_back(nodes[i].q.back());
    out.transcripts.push_back({nodes[i].q.back(), pivots_to(nodes, i)});
  }
  out.endpoints = VertexSet(std::move(ends));
  return out;
}

EndpointClosure endpoint_closure(const Graph& g, const PathState& p) {
  return endpoint_closure(g, p, g.active_vertices());
}

PathState replay(const Graph& g, const PathState& root, std::span<const Vertex> pivots) {
  PathState cur = root;
  for (Vertex u : pivots) {
    auto it = std::find(cur.seq.begin(), cur.seq.end(), u);
    if (it == cur.seq.end()) throw InputError("replay: pivot not on the path");
    cur = rotate(g, cur, static_cast<std::size_t>(it - cur.seq.begin()));
  }
  return cur;
}

BoosterSet boosters_exact(const Graph& g, Vertex v) {
  check_vertex(g, v);
  SubsetDp dp(g, kExactBoosterCap);
  BoosterSet out;
  out.v = v;
  out.exactness = BoosterExactness::exact;
  const int lv = dp.local(v);
  if (lv < 0) return out;
  const bool hamiltonian = dp.cycle().has_value();
  const std::size_t longest = dp.longest_path().size();
  std::vector<Vertex> found;
  for (std::size_t i = 0; i < dp.k(); ++i) {
    const Vertex u = dp.id(i);
    if (u == v || g.has_edge(u, v)) continue;
    if (hamiltonian) {
      found.push_back(u);
      continue;
    }
    auto& adj = dp.adj();
    adj[lv] |= 1u << i;
    adj[i] |= 1u << lv;
    if (dp.cycle() || dp.longest_path().size() > longest) found.push_back(u);
    adj[lv] &= ~(1u << i);
    adj[i] &= ~(1u << lv);
  }
  out.companions = VertexSet(std::move(found));
  return out;
}

std::vector<Vertex> longest_path_exact(const Graph& g) {
  return SubsetDp(g, kExactHamiltonCap).longest_path();
}

std::optional<std::vector<Vertex>> hamilton_exact(const Graph& g) {
  return SubsetDp(g, kExactHamiltonCap).cycle();
}

bool verify_hamilton_cycle(const Graph& g, std::span<const Vertex> cycle) {
  if (cycle.size() < 3 || cycle.size() != g.active_count()) return false;
  if (!is_path(g, cycle)) return false;
  return g.has_edge(cycle.back(), cycle.front());
}

std::vector<Edge> rotation_booster_pairs(const Graph& g, const PathState& p, std::size_t fanout) {
  if (p.seq.size() < 2) return {};
  auto adj = adjacency_of(g);
  auto ok = all_pivots(g);
  std::deque<BfsNode> first;
  std::deque<BfsNode> second;
  std::vector<int> pos(g.n(), -1);
  std::vector<char> seen(g.n(), 0);
  std::vector<Edge> pairs;
  auto add = [&](Vertex a, Vertex b) {
    if (a != b && !g.has_edge(a, b)) pairs.push_back(make_edge(a, b));
  };
  std::vector<Vertex> root(p.seq.rbegin(), p.seq.rend());
  rotation_bfs(adj, ok, root, first, pos, seen, [](std::size_t) { return false; });
  for (std::size_t i = 0; i < first.size(); ++i) {
    add(first[i].q.back(), first[i].q.front());
    if (i >= fanout) continue;
    std::vector<Vertex> flipped(first[i].q.rbegin(), first[i].q.rend());
    rotation_bfs(adj, ok, flipped, second, pos, seen, [](std::size_t) { return false; });
    for (const auto& node : second) add(node.q.back(), node.q.front());
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

std::vector<BoosterSet> rotation_booster_sets(const Graph& g, const PathState& p, std::size_t fanout) {
  std::map<Vertex, std::vector<Vertex>> by_vertex;
  for (const Edge& e : rotation_booster_pairs(g, p, fanout)) {
    by_vertex[e.u].push_back(e.v);
    by_vertex[e.v].push_back(e.u);
  }
  std::vector<BoosterSet> out;
  for (auto& [v, us] : by_vertex) {
    out.push_back({v, VertexSet(std::move(us)), BoosterExactness::rotation_derived});
  }
  return out;
}

const ContractedPath* ContractionMap::find(Vertex synthetic) const {
  if (synthetic < n_original || synthetic - n_original >= paths.size()) return nullptr;
  return &paths[synthetic - n_original];
}

std::vector<std::string> Backbone::violations() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.pass) out.push_back(c.name);
  }
  return out;
}

Backbone build_backbone(const Graph& g, const Graph& g_minus, const DeletionPlan& plan,
                        const Classification& cls, const HamParams& params, double keep, double p0,
                        std::uint64_t seed) {
  if (g_minus.n() != g.n()) throw InputError("build_backbone: G- and G have different vertex counts");
  if (!(keep > 0.0 && keep <= 1.0)) throw InputError("build_backbone: keep probability must lie in (0, 1]");
  const std::size_t n = g.n();
  const VertexSet active = g.active_vertices();
  const double nv = static_cast<double>(active.size());
  const Graph host = subtract(g, plan.h);
  const Classification local = restrict_to(cls, active);
  const VertexSet& tiny = local.tiny;
  const auto in_tiny = membership_mask(n, tiny);
  const auto in_atyp = membership_mask(n, local.atyp);
  std::vector<Edge> h_sorted = plan.h;
  std::sort(h_sorted.begin(), h_sorted.end());
  auto in_h = [&](const Edge& e) { return std::binary_search(h_sorted.begin(), h_sorted.end(), e); };
  const double alpha = params.eps / 4.0;
  const double q = keep * p0;
  const double nq = nv * q;

  Backbone bb;
  bb.witness.alpha = alpha;
  bb.witness.K = params.K;
  bb.witness.q = q;

  // Scatter of tiny and atypical vertices in G.
  for (auto& c : check_hamilton_scatter(g, local, params.L)) bb.checks.push_back(std::move(c));
  bool ok = std::all_of(bb.checks.begin(), bb.checks.end(), [](const PropertyCheck& c) { return c.pass; });

  std::vector<Edge> minus_edges;
  for (const Edge& e : g_minus.edges()) {
    if (g.is_active(e.u) && g.is_active(e.v) && g.has_edge(e.u, e.v)) minus_edges.push_back(e);
  }

  const std::size_t samples = 1 + params.backbone_resamples;
  for (std::size_t attempt = 0; attempt < samples; ++attempt) {
    Rng rng(derive_seed(seed, attempt));
    std::vector<Edge> gq_edges;
    std::vector<Edge> hq_edges;
    for (const Edge& e : minus_edges) {
      if (keep >= 1.0 || rng.bernoulli(keep)) {
        gq_edges.push_back(e);
        if (in_h(e)) hq_edges.push_back(e);
      }
    }
    bb.gq = Graph::from_edges(n, gq_edges).induced(active);
    bb.hq = Graph::from_edges(n, hq_edges).induced(active);
    bb.gq_samples = attempt + 1;

    // Degenerate vertices: low G_q degree or heavy H_q degree.
    std::vector<Vertex> degenerate;
    for (Vertex v : active) {
      if (in_atyp[v] || in_tiny[v]) continue;
      const double dq = static_cast<double>(bb.gq.degree(v));
      const double dh = static_cast<double>(bb.hq.degree(v));
      if (dq < (1.0 - 2.0 * local.delta_a) * nq || dh > (0.5 - params.eps / 2.0) * nq) degenerate.push_back(v);
    }
    bb.degenerate = VertexSet(std::move(degenerate));
    const VertexSet w2p = set_difference(set_union(local.atyp, bb.degenerate), tiny);
    const VertexSet up = set_difference(set_difference(active, tiny), w2p);
    const auto in_u = membership_mask(n, up);
    const auto in_w2 = membership_mask(n, w2p);

    // Gamma': G_q[U'] - H_q[U'], two G - H edges per tiny vertex (non-tiny
    // neighbours first), and the G - H edges of W2' outside TINY.
    std::vector<Edge> gp;
    for (const Edge& e : gq_edges) {
      if (in_u[e.u] && in_u[e.v] && !in_h(e)) gp.push_back(e);
    }
    std::vector<std::size_t> tiny_deg(n, 0);
    for (Vertex v : tiny) {
      std::vector<Vertex> nb(host.neighbors(v).begin(), host.neighbors(v).end());
      rng.shuffle(nb);
      std::stable_partition(nb.begin(), nb.end(), [&](Vertex u) { return !in_tiny[u]; });
      for (Vertex u : nb) {
        if (tiny_deg[v] >= 2) break;
        if (in_tiny[u] && tiny_deg[u] >= 2) continue;
        gp.push_back(make_edge(u, v));
        ++tiny_deg[v];
        if (in_tiny[u]) ++tiny_deg[u];
      }
    }
    for (Vertex u : w2p) {
      for (Vertex w : host.neighbors(u)) {
        if (!in_tiny[w]) gp.push_back(make_edge(u, w));
      }
    }
    std::sort(gp.begin(), gp.end());
    gp.erase(std::unique(gp.begin(), gp.end()), gp.end());
    const Graph gamma_p = Graph::from_edges(n, gp).induced(active);

    // Contract tiny-tiny paths of length at most two.
    std::vector<std::array<Vertex, 3>> found;  // u, mid (or u), v
    for (Vertex u : tiny) {
      for (Vertex w : gamma_p.neighbors(u)) {
        if (in_tiny[w]) {
          if (w > u) found.push_back({u, u, w});
          continue;
        }
        for (Vertex v : gamma_p.neighbors(w)) {
          if (v > u && in_tiny[v]) found.push_back({u, w, v});
        }
      }
    }
    std::vector<int> owner(n, -1);
    bool conflict = false;
    for (std::size_t i = 0; i < found.size(); ++i) {
      for (Vertex x : found[i]) {
        if (owner[x] >= 0 && owner[x] != static_cast<int>(i)) conflict = true;
        owner[x] = static_cast<int>(i);
      }
    }
    bb.cmap = {};
    bb.cmap.n_original = n;
    std::vector<Edge> gamma_edges;
    std::vector<Vertex> contracted;
    std::vector<Vertex> z_set;
    std::vector<Vertex> y_set;
    std::vector<Vertex> x_set;
    if (!conflict) {
      for (std::size_t i = 0; i < found.size(); ++i) {
        const auto [u, w, v] = found[i];
        const bool has_mid = w != u;
        auto other = [&](Vertex end, Vertex inner) -> std::optional<Vertex> {
          for (Vertex y : gamma_p.neighbors(end)) {
            if (y != inner) return y;
          }
          return std::nullopt;
        };
        auto uo = other(u, has_mid ? w : v);
        auto vo = other(v, has_mid ? w : u);
        if (!uo || !vo || *uo == *vo || owner[*uo] >= 0 || owner[*vo] >= 0) {
          conflict = true;
          break;
        }
        ContractedPath cp;
        cp.synthetic = static_cast<Vertex>(n + bb.cmap.paths.size());
        cp.u = u;
        cp.v = v;
        if (has_mid) cp.mid = w;
        cp.u_out = *uo;
        cp.v_out = *vo;
        bb.cmap.paths.push_back(cp);
        x_set.push_back(cp.synthetic);
        z_set.push_back(u);
        z_set.push_back(v);
        contracted.push_back(u);
        contracted.push_back(v);
        if (has_mid) {
          contracted.push_back(w);
          y_set.push_back(w);
        }
      }
    }
    bb.checks.push_back(make_check("contraction_well_defined", !conflict, 0, conflict ? 1 : 0));
    if (conflict) {
      bb.cmap.paths.clear();
      x_set.clear();
      z_set.clear();
      y_set.clear();
      contracted.clear();
    }
    const std::size_t n_gamma = n + bb.cmap.paths.size();
    std::vector<char> gone(n_gamma, 0);
    for (Vertex v : contracted) gone[v] = 1;
    for (const Edge& e : gp) {
      if (!gone[e.u] && !gone[e.v]) gamma_edges.push_back(e);
    }
    for (const auto& cp : bb.cmap.paths) {
      gamma_edges.push_back(make_edge(cp.u_out, cp.synthetic));
      gamma_edges.push_back(make_edge(cp.v_out, cp.synthetic));
    }
    std::sort(gamma_edges.begin(), gamma_edges.end());
    gamma_edges.erase(std::unique(gamma_edges.begin(), gamma_edges.end()), gamma_edges.end());
    std::vector<Vertex> masked(contracted);
    for (Vertex v = 0; v < n; ++v) {
      if (!g.is_active(v)) masked.push_back(v);
    }
    bb.gamma = Graph::from_edges(n_gamma, gamma_edges).without_vertices(VertexSet(std::move(masked)));

    VertexSet zs(std::move(z_set));
    VertexSet ys(std::move(y_set));
    bb.witness.w1 = set_union(set_difference(tiny, zs), VertexSet(std::move(x_set)));
    bb.witness.w2 = set_difference(w2p, ys);
    bb.witness.u = set_difference(up, ys);

    // Degree bound for the sparsified deletions inside U.
    std::size_t hq_max = 0;
    auto in_final_u = membership_mask(n, bb.witness.u);
    for (Vertex v : bb.witness.u) hq_max = std::max(hq_max, degree_into(bb.hq, v, in_final_u));
    const double hq_bound = (0.5 - 2.0 * alpha) * nv * q;
    const bool hq_ok = static_cast<double>(hq_max) <= hq_bound;
    if (!hq_ok && attempt + 1 < samples) {
      bb.checks.resize(bb.checks.size() - 1);  // drop this sample's contraction check
      continue;
    }
    bb.checks.push_back(make_check("hq_max_degree_in_U", hq_ok,
                                   static_cast<std::size_t>(std::max(0.0, std::floor(hq_bound))), hq_max));
    ok = ok && !conflict;
    break;
  }

  // P1-P5 on Gamma.
  const Graph& gam = bb.gamma;
  const double ng = static_cast<double>(gam.active_count());
  const std::size_t bad = bb.witness.w1.size() + bb.witness.w2.size();
  const double p1_bound = ng / std::pow(std::log(std::max(ng, 3.0)), 2.0);
  bb.checks.push_back(make_check("P1_bad_vertex_count", static_cast<double>(bad) <= p1_bound,
                                 static_cast<std::size_t>(p1_bound), bad));
  {
    PropertyCheck c = make_check("P2_degrees", true, 2, 0);
    for (Vertex v : bb.witness.w1) {
      if (gam.degree(v) != 2 && c.pass) {
        c.pass = false;
        c.center = v;
        c.observed = gam.degree(v);
      }
    }
    for (Vertex v : bb.witness.w2) {
      if (gam.degree(v) < 2 * params.K && c.pass) {
        c.pass = false;
        c.center = v;
        c.observed = gam.degree(v);
      }
    }
    bb.checks.push_back(std::move(c));
  }
  {
    PropertyCheck c = make_check("P3_w1_second_neighbourhood", true, 0, 0);
    auto in_w1 = membership_mask(gam.n(), bb.witness.w1);
    for (Vertex v : bb.witness.w1) {
      for (Vertex u : neighborhood_within(gam, v, 2)) {
        if (in_w1[u] && c.pass) {
          c.pass = false;
          c.center = v;
          c.witness = {u};
          c.observed = 1;
        }
      }
    }
    bb.checks.push_back(std::move(c));
  }
  bb.checks.push_back(check_neighborhood_bound(gam, bb.witness.w1, 2, 2, "P4_w1_second_neighbourhood"));
  bb.checks.push_back(check_neighborhood_bound(gam, bb.witness.w2, 2, params.K, "P4_w2_second_neighbourhood"));
  {
    PropertyCheck c = make_check("P5_expansion", true, 0, 0);
    const double qq = std::max(q, 1e-300);
    const double small_limit = static_cast<double>(params.K) / qq;
    const double root = std::sqrt(ng * q);
    std::vector<char> mark(gam.n(), 0);
    std::vector<Vertex> u_ids(bb.witness.u.begin(), bb.witness.u.end());
    auto fail = [&](std::size_t size) {
      ++c.observed;
      if (c.pass) {
        c.pass = false;
        c.bound = size;  // size of the first failing set
      }
    };
    if (1.0 < small_limit) {
      for (Vertex v : u_ids) {
        if (static_cast<double>(outer_neighbourhood(gam, {v}, mark)) < root) fail(1);
      }
    }
    Rng rng(derive_seed(seed, 1000));
    for (std::size_t s = 2; static_cast<double>(s) < small_limit && s <= u_ids.size(); s *= 2) {
      for (std::size_t r = 0; r < params.p5_random_sets; ++r) {
        for (std::size_t i = 0; i < s; ++i) std::swap(u_ids[i], u_ids[i + rng.below(u_ids.size() - i)]);
        std::vector<Vertex> set(u_ids.begin(), u_ids.begin() + static_cast<std::ptrdiff_t>(s));
        if (static_cast<double>(outer_neighbourhood(gam, set, mark)) < static_cast<double>(s) * root) fail(s);
      }
    }
    const double big = std::ceil(small_limit);
    if (big <= static_cast<double>(u_ids.size())) {
      const auto s = static_cast<std::size_t>(big);
      for (std::size_t r = 0; r < params.p5_random_sets; ++r) {
        for (std::size_t i = 0; i < s; ++i) std::swap(u_ids[i], u_ids[i + rng.below(u_ids.size() - i)]);
        std::vector<Vertex> set(u_ids.begin(), u_ids.begin() + static_cast<std::ptrdiff_t>(s));
        if (static_cast<double>(outer_neighbourhood(gam, set, mark)) < (0.5 + alpha / 2.0) * ng) fail(s);
      }
    }
    bb.checks.push_back(std::move(c));
  }

  bb.preconditions_ok = ok;
  if (!ok) {
    for (const auto& c : bb.checks) {
      if (!c.pass) {
        bb.failure = c.name;
        break;
      }
    }
  }
  return bb;
}

std::vector<Vertex> expand_cycle(std::span<const Vertex> cycle, const ContractionMap& cmap) {
  std::vector<Vertex> out;
  const std::size_t k = cycle.size();
  for (std::size_t i = 0; i < k; ++i) {
    const Vertex x = cycle[i];
    const ContractedPath* cp = cmap.find(x);
    if (!cp) {
      if (x >= cmap.n_original && cmap.n_original > 0) throw InvariantError("expand_cycle: unknown synthetic vertex");
      out.push_back(x);
      continue;
    }
    const Vertex prev = cycle[(i + k - 1) % k];
    const Vertex next = cycle[(i + 1) % k];
    std::vector<Vertex> piece{cp->u};
    if (cp->mid) piece.push_back(*cp->mid);
    piece.push_back(cp->v);
    if (prev == cp->u_out && next == cp->v_out) {
      out.insert(out.end(), piece.begin(), piece.end());
    } else if (prev == cp->v_out && next == cp->u_out) {
      out.insert(out.end(), piece.rbegin(), piece.rend());
    } else {
      throw InvariantError("expand_cycle: synthetic vertex " + std::to_string(x) +
                           " entered through a non-retained edge");
    }
  }
  return out;
}

std::string hamilton_obstruction(const Graph& g) {
  if (g.active_count() < 3) return "fewer than 3 vertices";
  for (Vertex v = 0; v < g.n(); ++v) {
    if (!g.is_active(v)) continue;
    if (g.degree(v) < 2) return "vertex " + std::to_string(v) + " has degree " + std::to_string(g.degree(v));
    std::size_t forced = 0;
    for (Vertex u : g.neighbors(v)) forced += g.degree(u) == 2;
    if (forced >= 3) return "vertex " + std::to_string(v) + " has " + std::to_string(forced) + " degree-2 neighbours";
  }
  const VertexSet active = g.active_vertices();
  const Vertex start = *active.begin();
  if (neighborhood_within(g, start, g.n()).size() + 1 != active.size()) return "graph is disconnected";
  return {};
}

SearchResult hamilton_search(const Graph& g, const DeletionPlan& plan, const Classification& cls,
                             const HamParams& params, std::uint64_t seed, const SandwichCoupling* sandwich) {
  if (g.active_count() > 0 && g.min_degree() < 2) {
    throw InputError("hamilton_search: input must be a 2-core; run two_core first");
  }
  if (sandwich && sandwich->g_minus.n() != g.n()) throw InputError("hamilton_search: sandwich size mismatch");
  SearchResult result;
  SearchReport& rep = result.report;
  const Graph host = subtract(g, plan.h);
  rep.certificate = hamilton_obstruction(host);
  if (!rep.certificate.empty()) return result;

  const std::size_t n_active = g.active_count();
  const std::size_t max_iter = 10 * n_active + 100;
  auto finish = [&](std::vector<Vertex> cycle, const char* tier) {
    if (!verify_hamilton_cycle(host, cycle)) {
      throw InvariantError(std::string("hamilton_search: tier ") + tier + " produced an invalid cycle");
    }
    rep.found = true;
    rep.tier = tier;
    result.cycle = std::move(cycle);
    return result;
  };

  const Graph& g_minus = sandwich ? sandwich->g_minus : g;
  const double p0 = sandwich ? sandwich->p0 : graph_density(g);
  const std::array<std::pair<double, const char*>, 3> tiers{
      {{params.mu / 4.0, "backbone-sparse"}, {0.25, "backbone-quarter"}, {1.0, "backbone-dense"}}};
  std::vector<Edge> h_sorted = plan.h;
  std::sort(h_sorted.begin(), h_sorted.end());

  bool backbone_usable = true;
  for (std::size_t t = 0; t < tiers.size() && backbone_usable; ++t) {
    for (std::size_t r = 0; r < params.restarts_per_tier; ++r) {
      const std::uint64_t s = derive_seed(seed, 16 * t + r);
      Backbone bb = build_backbone(g, g_minus, plan, cls, params, tiers[t].first, p0, s);
      for (const auto& v : bb.violations()) {
        std::string tag = std::string(tiers[t].second) + ":" + v;
        if (std::find(rep.backbone_violations.begin(), rep.backbone_violations.end(), tag) ==
            rep.backbone_violations.end()) {
          rep.backbone_violations.push_back(tag);
        }
      }
      if (!bb.preconditions_ok && params.strict_preconditions) {
        backbone_usable = false;
        break;
      }
      const Graph& gam = bb.gamma;
      const std::size_t ng = gam.n();
      std::vector<char> active(ng, 0);
      for (Vertex v = 0; v < ng; ++v) active[v] = gam.is_active(v);
      auto pivots = membership_mask(ng, bb.witness.u);
      // Reserve: G-[U] - H minus what Gamma already has.
      Adj reserve(ng);
      auto in_u = membership_mask(g.n(), bb.witness.u);
      for (const Edge& e : g_minus.edges()) {
        if (!in_u[e.u] || !in_u[e.v] || !g.has_edge(e.u, e.v)) continue;
        if (std::binary_search(h_sorted.begin(), h_sorted.end(), e) || gam.has_edge(e.u, e.v)) continue;
        reserve[e.u].push_back(e.v);
        reserve[e.v].push_back(e.u);
      }
      if (bb.witness.u.empty()) continue;
      Rng rng(s);
      const Vertex start = bb.witness.u.ids()[rng.below(bb.witness.u.size())];
      const std::size_t used_before = rep.e_prime_used;
      rep.e_prime_used = 0;
      Engine engine(adjacency_of(gam), active, pivots, std::move(reserve), n_active, params.phase3_fanout,
                    derive_seed(s, 7), rep);
      auto cycle = engine.run(start, max_iter);
      if (cycle) return finish(expand_cycle(*cycle, bb.cmap), tiers[t].second);
      rep.e_prime_used = std::max(rep.e_prime_used, used_before);
      ++rep.restarts;
    }
  }

  if (params.full_fallback) {
    const std::size_t attempts = std::max<std::size_t>(1, 3 * params.restarts_per_tier);
    const VertexSet active_set = host.active_vertices();
    std::vector<char> active(host.n(), 0);
    for (Vertex v : active_set) active[v] = 1;
    for (std::size_t r = 0; r < attempts; ++r) {
      const std::uint64_t s = derive_seed(seed, 1000 + r);
      Rng rng(s);
      const Vertex start = active_set.ids()[rng.below(active_set.size())];
      Engine engine(adjacency_of(host), active, active, Adj(host.n()), 0, params.phase3_fanout, derive_seed(s, 7),
                    rep);
      auto cycle = engine.run(start, max_iter);
      if (cycle) return finish(std::move(*cycle), "full");
      ++rep.restarts;
    }
  }
  return result;
}

}  // namespace hamres

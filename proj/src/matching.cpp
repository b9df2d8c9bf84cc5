#include "hamres/matching.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/max_cardinality_matching.hpp>

#include "hamres/error.hpp"
#include "hamres/rng.hpp"

namespace hamres {

namespace {

constexpr int kFree = -1;

// Hopcroft-Karp over local indices: left[i] and right[j] are vertex ids.
class HopcroftKarp {
 public:
  HopcroftKarp(const Graph& g, std::span<const Vertex> left, std::span<const Vertex> right)
      : left_(left.begin(), left.end()), right_(right.begin(), right.end()) {
    std::vector<int> right_index(g.n(), kFree);
    for (std::size_t j = 0; j < right_.size(); ++j) right_index[right_[j]] = static_cast<int>(j);
    adj_.resize(left_.size());
    for (std::size_t i = 0; i < left_.size(); ++i) {
      for (Vertex u : g.neighbors(left_[i])) {
        if (right_index[u] != kFree) adj_[i].push_back(right_index[u]);
      }
    }
    match_l_.assign(left_.size(), kFree);
    match_r_.assign(right_.size(), kFree);
    dist_.assign(left_.size(), 0);
    while (bfs()) {
      for (std::size_t i = 0; i < left_.size(); ++i) {
        if (match_l_[i] == kFree) size_ += dfs(static_cast<int>(i));
      }
    }
  }

  std::size_t size() const { return size_; }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (std::size_t i = 0; i < left_.size(); ++i) {
      if (match_l_[i] != kFree) out.push_back(make_edge(left_[i], right_[match_l_[i]]));
    }
    return out;
  }

  // Left and right vertices reachable from unmatched left vertices along
  // alternating paths.
  std::pair<VertexSet, VertexSet> reachable_from_free() const {
    std::vector<char> seen_l(left_.size(), 0);
    std::vector<char> seen_r(right_.size(), 0);
    std::queue<int> q;
    for (std::size_t i = 0; i < left_.size(); ++i) {
      if (match_l_[i] == kFree) {
        seen_l[i] = 1;
        q.push(static_cast<int>(i));
      }
    }
    while (!q.empty()) {
      int i = q.front();
      q.pop();
      for (int j : adj_[i]) {
        if (seen_r[j]) continue;
        seen_r[j] = 1;
        int k = match_r_[j];
        if (k != kFree && !seen_l[k]) {
          seen_l[k] = 1;
          q.push(k);
        }
      }
    }
    std::vector<Vertex> s;
    std::vector<Vertex> t;
    for (std::size_t i = 0; i < left_.size(); ++i) {
      if (seen_l[i]) s.push_back(left_[i]);
    }
    for (std::size_t j = 0; j < right_.size(); ++j) {
      if (seen_r[j]) t.push_back(right_[j]);
    }
    return {VertexSet(std::move(s)), VertexSet(std::move(t))};
  }

 private:
  bool bfs() {
    std::queue<int> q;
    bool found = false;
    for (std::size_t i = 0; i < left_.size(); ++i) {
      if (match_l_[i] == kFree) {
        dist_[i] = 0;
        q.push(static_cast<int>(i));
      } else {
        dist_[i] = kInf;
      }
    }
    while (!q.empty()) {
      int i = q.front();
      q.pop();
      for (int j : adj_[i]) {
        int k = match_r_[j];
        if (k == kFree) {
          found = true;
        } else if (dist_[k] == kInf) {
          dist_[k] = dist_[i] + 1;
          q.push(k);
        }
      }
    }
    return found;
  }

  bool dfs(int i) {
    for (int j : adj_[i]) {
      int k = match_r_[j];
      if (k == kFree || (dist_[k] == dist_[i] + 1 && dfs(k))) {
        match_l_[i] = j;
        match_r_[j] = i;
        return true;
      }
    }
    dist_[i] = kInf;
    return false;
  }

  static constexpr int kInf = std::numeric_limits<int>::max();
  std::vector<Vertex> left_;
  std::vector<Vertex> right_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> match_l_;
  std::vector<int> match_r_;
  std::vector<int> dist_;
  std::size_t size_ = 0;
};

void check_sides(const Graph& g, const VertexSet& a, const VertexSet& b) {
  for (Vertex v : a) check_vertex(g, v);
  for (Vertex v : b) check_vertex(g, v);
  if (!set_intersection(a, b).empty()) throw InputError("bipartite sides must be disjoint");
  for (const VertexSet* side : {&a, &b}) {
    auto mask = membership_mask(g.n(), *side);
    for (Vertex v : *side) {
      if (degree_into(g, v, mask) > 0) throw InputError("edge inside one side of a bipartite instance");
    }
  }
}

// Seeded visiting order: rank[v] is v's position in a shuffled id list.
std::vector<std::size_t> seeded_rank(std::size_t n, Rng& rng) {
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), Vertex{0});
  rng.shuffle(order);
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[order[i]] = i;
  return rank;
}

std::vector<Vertex> by_rank(const VertexSet& s, const std::vector<std::size_t>& rank) {
  std::vector<Vertex> out(s.begin(), s.end());
  std::sort(out.begin(), out.end(), [&](Vertex a, Vertex b) { return rank[a] < rank[b]; });
  return out;
}

// Unmatched neighbour of v in g with the smallest rank.
std::optional<Vertex> first_free(const Graph& g, Vertex v, const std::vector<char>& matched,
                                 const std::vector<std::size_t>& rank) {
  std::optional<Vertex> best;
  for (Vertex u : g.neighbors(v)) {
    if (matched[u]) continue;
    if (!best || rank[u] < rank[*best]) best = u;
  }
  return best;
}

}  // namespace

Matching make_matching(std::vector<Edge> edges) {
  Matching m;
  std::vector<Vertex> covered;
  for (Edge& e : edges) {
    e = make_edge(e.u, e.v);
    covered.push_back(e.u);
    covered.push_back(e.v);
  }
  std::sort(edges.begin(), edges.end());
  m.edges = std::move(edges);
  m.saturated = VertexSet(std::move(covered));
  return m;
}

std::string matching_problem(const Graph& host, const Matching& m) {
  std::vector<char> used(host.n(), 0);
  for (const Edge& e : m.edges) {
    if (e.u >= host.n() || e.v >= host.n() || !host.has_edge(e.u, e.v)) {
      return "edge {" + std::to_string(e.u) + ", " + std::to_string(e.v) + "} not in host";
    }
    for (Vertex x : {e.u, e.v}) {
      if (used[x]) return "vertex " + std::to_string(x) + " covered twice";
      used[x] = 1;
    }
  }
  return {};
}

bool is_perfect_matching(const Graph& host, const Matching& m) {
  if (!matching_problem(host, m).empty()) return false;
  return 2 * m.size() + 1 >= host.active_count();
}

Matching max_matching_exact(const Graph& g) {
  using BGraph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
  using BVertex = boost::graph_traits<BGraph>::vertex_descriptor;
  BGraph bg(g.n());
  for (const Edge& e : g.edges()) boost::add_edge(e.u, e.v, bg);
  std::vector<BVertex> mate(g.n());
  boost::edmonds_maximum_cardinality_matching(bg, mate.data());
  std::vector<Edge> edges;
  for (Vertex v = 0; v < g.n(); ++v) {
    BVertex u = mate[v];
    if (u != boost::graph_traits<BGraph>::null_vertex() && v < u) edges.push_back({v, static_cast<Vertex>(u)});
  }
  return make_matching(std::move(edges));
}

bool has_perfect_matching(const Graph& g) {
  return 2 * max_matching_exact(g).size() + 1 >= g.active_count();
}

Matching bipartite_max_matching(const Graph& g, const VertexSet& a, const VertexSet& b) {
  check_sides(g, a, b);
  HopcroftKarp hk(g, a.ids(), b.ids());
  return make_matching(hk.edges());
}

std::optional<HallViolation> find_hall_violation(const Graph& g, const VertexSet& a, const VertexSet& b) {
  check_sides(g, a, b);
  // Search from the larger side (a on ties): unequal sides always yield a
  // violator there.
  const bool a_large = a.size() >= b.size();
  const VertexSet& large = a_large ? a : b;
  const VertexSet& small = a_large ? b : a;
  HopcroftKarp hk(g, large.ids(), small.ids());
  if (hk.size() == large.size()) return std::nullopt;
  auto [s, t] = hk.reachable_from_free();
  return HallViolation{std::move(s), std::move(t)};
}

std::string pm_obstruction(const Graph& g) {
  std::size_t isolated = 0;
  std::size_t stranded = 0;
  for (Vertex v = 0; v < g.n(); ++v) {
    if (!g.is_active(v)) continue;
    if (g.degree(v) == 0) ++isolated;
    std::size_t leaves = 0;
    for (Vertex u : g.neighbors(v)) leaves += g.degree(u) == 1;
    if (leaves > 1) stranded += leaves - 1;
  }
  const std::size_t allowance = g.active_count() % 2;
  if (isolated + stranded <= allowance) return {};
  return std::to_string(isolated) + " isolated and " + std::to_string(stranded) +
         " surplus pendant vertices exceed the parity allowance of " + std::to_string(allowance);
}

const char* to_string(PmStage stage) {
  switch (stage) {
    case PmStage::parity_fix: return "parity-fix";
    case PmStage::tiny_saturation: return "tiny-saturation";
    case PmStage::atyp_saturation: return "atyp-saturation";
    case PmStage::equipartition: return "equipartition";
    case PmStage::degenerate_matching: return "degenerate-matching";
    case PmStage::rebalance: return "rebalance";
    case PmStage::hall_check: return "hall-check";
  }
  return "unknown";
}

PipelineReport constructive_pm(const Graph& g, const DeletionPlan& plan, const Classification& cls,
                               const PmParams& params, std::uint64_t seed) {
  PipelineReport report;
  Rng rng(seed);
  const auto rank = seeded_rank(g.n(), rng);
  const Graph host = subtract(g, plan.h);
  Graph gp = host;
  report.obstruction = pm_obstruction(host);

  const VertexSet active = g.active_vertices();
  const VertexSet tiny = set_intersection(cls.tiny, active);
  const VertexSet atyp = set_intersection(cls.atyp, active);
  report.tiny_count = tiny.size();
  report.atyp_count = atyp.size();
  const auto in_tiny = membership_mask(g.n(), tiny);
  const auto in_atyp = membership_mask(g.n(), atyp);
  const double p1 = params.p1 > 0 ? params.p1 : graph_density(g);

  auto fail = [&](PmStage stage, std::string reason, std::vector<Vertex> witness) {
    report.success = false;
    report.failed_stage = stage;
    report.failure_reason = std::move(reason);
    report.witness = std::move(witness);
    report.stages.back().ok = false;
    report.stages.back().detail = report.failure_reason;
    return report;
  };
  // Records a property check; true when the pipeline must stop.
  auto gate = [&](PropertyCheck check) {
    bool stop = !check.pass && params.strict_preconditions;
    report.stages.back().checks.push_back(std::move(check));
    return stop;
  };
  auto stop_on = [&](PmStage stage) {
    const PropertyCheck& c = report.stages.back().checks.back();
    std::vector<Vertex> w = c.witness;
    if (c.center) w.insert(w.begin(), *c.center);
    return fail(stage, "property " + c.name + " violated", std::move(w));
  };

  // (1) parity fix
  report.stages.push_back({PmStage::parity_fix, true, {}, {}});
  if (gp.active_count() % 2 == 1) {
    std::optional<Vertex> drop;
    for (Vertex v : tiny) {
      for (Vertex u : gp.neighbors(v)) {
        if (!in_tiny[u]) {
          drop = v;
          break;
        }
      }
      if (drop) break;
    }
    if (!drop) {
      for (Vertex v : active) {
        if (!in_tiny[v]) {
          drop = v;
          break;
        }
      }
    }
    if (!drop) drop = *active.begin();
    report.removed_vertex = drop;
    report.stages.back().detail = "removed vertex " + std::to_string(*drop);
    gp = gp.without_vertices(VertexSet{*drop});
  }

  std::vector<char> matched(g.n(), 0);
  for (Vertex v = 0; v < g.n(); ++v) matched[v] = !gp.is_active(v);
  std::vector<Edge> chosen;
  auto take = [&](Vertex a, Vertex b) {
    matched[a] = matched[b] = 1;
    chosen.push_back(make_edge(a, b));
  };

  // (2) tiny saturation
  report.stages.push_back({PmStage::tiny_saturation, true, {}, {}});
  if (gate(check_neighborhood_bound(g, tiny, 2, 1, "tiny_in_second_neighbourhood"))) {
    return stop_on(PmStage::tiny_saturation);
  }
  for (Vertex v : by_rank(tiny, rank)) {
    if (matched[v]) continue;
    auto u = first_free(gp, v, matched, rank);
    if (!u) return fail(PmStage::tiny_saturation, "tiny vertex has no unmatched neighbour", {v});
    take(v, *u);
  }

  // (3) atypical saturation
  report.stages.push_back({PmStage::atyp_saturation, true, {}, {}});
  if (gate(check_neighborhood_bound(g, atyp, 2, params.L, "atyp_in_second_neighbourhood"))) {
    return stop_on(PmStage::atyp_saturation);
  }
  PropertyCheck busy{"matched_neighbours_of_atypical", true, params.K / 2, 0, std::nullopt, {}};
  for (Vertex w : by_rank(set_difference(atyp, tiny), rank)) {
    if (matched[w]) continue;
    std::size_t taken = 0;
    for (Vertex u : gp.neighbors(w)) taken += matched[u] != 0;
    busy.observed = std::max(busy.observed, taken);
    if (taken > params.K / 2 && busy.pass) {
      busy.pass = false;
      busy.observed = taken;
      busy.center = w;
      if (params.strict_preconditions) {
        gate(busy);
        return stop_on(PmStage::atyp_saturation);
      }
    }
    auto u = first_free(gp, w, matched, rank);
    if (!u) {
      gate(busy);
      return fail(PmStage::atyp_saturation, "atypical vertex has no unmatched neighbour", {w});
    }
    take(w, *u);
  }
  gate(busy);

  // (4) random balanced bipartition of the rest
  report.stages.push_back({PmStage::equipartition, true, {}, {}});
  std::vector<Vertex> u1;
  for (Vertex v : active) {
    if (!matched[v] && !in_atyp[v]) u1.push_back(v);
  }
  report.u1_size = u1.size();
  rng.shuffle(u1);
  const std::size_t half = u1.size() / 2;
  VertexSet a(std::vector<Vertex>(u1.begin(), u1.begin() + half));
  VertexSet b(std::vector<Vertex>(u1.begin() + half, u1.end()));
  const Graph g2 = gp.induced(set_union(a, b));
  report.stages.back().detail = "|A| = " + std::to_string(a.size()) + ", |B| = " + std::to_string(b.size());

  // (5) degenerate vertices
  report.stages.push_back({PmStage::degenerate_matching, true, {}, {}});
  const VertexSet d = degenerate_set(g2, a, b, p1, params.eps);
  report.degenerate_count = d.size();
  const std::size_t l_bound = params.L > 0 ? params.L - 1 : 0;
  if (gate(check_neighborhood_bound(g2, d, 2, l_bound, "degenerate_in_second_neighbourhood"))) {
    return stop_on(PmStage::degenerate_matching);
  }
  for (Vertex v : by_rank(d, rank)) {
    if (matched[v]) continue;
    auto u = first_free(g2, v, matched, rank);
    if (!u) return fail(PmStage::degenerate_matching, "degenerate vertex has no unmatched neighbour", {v});
    take(v, *u);
  }

  // (6) rebalance
  report.stages.push_back({PmStage::rebalance, true, {}, {}});
  std::vector<Vertex> a1;
  std::vector<Vertex> b1;
  for (Vertex v : a) {
    if (!matched[v]) a1.push_back(v);
  }
  for (Vertex v : b) {
    if (!matched[v]) b1.push_back(v);
  }
  VertexSet a2(std::move(a1));
  VertexSet b2(std::move(b1));
  const Graph g3 = g2.induced(set_union(a2, b2));
  if (a2.size() != b2.size()) {
    const bool a_big = a2.size() > b2.size();
    VertexSet& big = a_big ? a2 : b2;
    VertexSet& small = a_big ? b2 : a2;
    const std::size_t need = (big.size() - small.size()) / 2;
    VertexSet moving = greedy_2_independent_set(g3, big, need);
    report.moved = moving.size();
    if (moving.size() < need) {
      return fail(PmStage::rebalance,
                  "2-independent set of size " + std::to_string(moving.size()) + " < " + std::to_string(need),
                  std::vector<Vertex>(moving.begin(), moving.end()));
    }
    big = set_difference(big, moving);
    small = set_union(small, moving);
  }

  // (7) bipartite matching between the final sides, which must now have no
  // edges inside them: drop those edges for the Hall check.
  report.stages.push_back({PmStage::hall_check, true, {}, {}});
  std::vector<Edge> crossing;
  {
    auto in_a = membership_mask(g.n(), a2);
    for (const Edge& e : g3.edges()) {
      if (in_a[e.u] != in_a[e.v]) crossing.push_back(e);
    }
  }
  Graph bip = Graph::from_edges(g.n(), crossing).induced(set_union(a2, b2));
  if (auto hall = find_hall_violation(bip, a2, b2)) {
    report.hall = *hall;
    return fail(PmStage::hall_check,
                "Hall violation: |S| = " + std::to_string(hall->s.size()) +
                    ", |N(S)| = " + std::to_string(hall->neighbours.size()),
                std::vector<Vertex>(hall->s.begin(), hall->s.end()));
  }
  if (a2.size() != b2.size()) {
    return fail(PmStage::hall_check, "sides unbalanced after rebalancing", {});
  }
  Matching last = bipartite_max_matching(bip, a2, b2);
  chosen.insert(chosen.end(), last.edges.begin(), last.edges.end());

  report.matching = make_matching(std::move(chosen));
  if (!is_perfect_matching(host, report.matching)) {
    throw InvariantError("constructive_pm produced a non-perfect matching: " +
                         matching_problem(host, report.matching));
  }
  report.success = true;
  return report;
}

}  // namespace hamres

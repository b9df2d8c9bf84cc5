#include "hamres/adversary.hpp"

#include <algorithm>
#include <cmath>

#include "hamres/error.hpp"
#include "hamres/random_process.hpp"
#include "hamres/rng.hpp"

namespace hamres {

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("budget: alpha must lie in [0, 1]");
}

void check_budget_shape(const Graph& g, const Budget& budget) {
  if (budget.cap.size() != g.n()) throw InputError("budget does not match the graph's vertex count");
}

// Greedy deletion over `order`: keep an edge unless both endpoints have room.
std::vector<Edge> spend(const std::vector<Edge>& order, std::vector<std::size_t> remaining) {
  std::vector<Edge> h;
  for (const Edge& e : order) {
    if (remaining[e.u] == 0 || remaining[e.v] == 0) continue;
    --remaining[e.u];
    --remaining[e.v];
    h.push_back(e);
  }
  std::sort(h.begin(), h.end());
  return h;
}

// Switching state for the bipartition adversary.
struct Sides {
  std::vector<char> side;      // 0 or 1 for active vertices
  std::vector<std::size_t> own;  // neighbours on the same side
  std::size_t switches = 0;

  bool unhappy(const Graph& g, Vertex v) const { return 2 * own[v] > g.degree(v); }

  void flip(const Graph& g, Vertex v) {
    const char was = side[v];
    side[v] = static_cast<char>(1 - was);
    own[v] = g.degree(v) - own[v];
    for (Vertex u : g.neighbors(v)) {
      if (side[u] == was) {
        --own[u];
      } else {
        ++own[u];
      }
    }
    ++switches;
  }

  // Switch unhappy vertices until none remain. Each switch raises the cut
  // size, so this ends after at most m switches.
  void settle(const Graph& g, std::vector<Vertex> queue) {
    while (!queue.empty()) {
      Vertex v = queue.back();
      queue.pop_back();
      if (!unhappy(g, v)) continue;
      flip(g, v);
      for (Vertex u : g.neighbors(v)) {
        if (unhappy(g, u)) queue.push_back(u);
      }
    }
  }

  std::size_t count(const Graph& g, char s) const {
    std::size_t c = 0;
    for (Vertex v = 0; v < g.n(); ++v) c += g.is_active(v) && side[v] == s;
    return c;
  }
};

}  // namespace

std::size_t alpha_floor(double alpha, std::size_t d) {
  return static_cast<std::size_t>(std::floor(alpha * static_cast<double>(d) + 1e-9));
}

Budget make_simple_budget(const Graph& g, double alpha) {
  check_alpha(alpha);
  Budget b;
  b.mode = BudgetMode::simple;
  b.alpha = alpha;
  b.p = graph_density(g);
  b.cap.assign(g.n(), 0);
  for (Vertex v = 0; v < g.n(); ++v) {
    if (g.is_active(v)) b.cap[v] = alpha_floor(alpha, g.degree(v));
  }
  return b;
}

Budget make_refined_budget(const Graph& g, double alpha, const Classification& cls, std::size_t k_t,
                           std::size_t k_a) {
  check_alpha(alpha);
  const double p = graph_density(g);
  if (std::abs(cls.p - p) > 1e-9 * p) {
    throw InputError("refined budget: classification density " + std::to_string(cls.p) +
                     " does not match e(G)/C(|V|,2) = " + std::to_string(p));
  }
  auto tiny = membership_mask(g.n(), cls.tiny);
  auto atyp = membership_mask(g.n(), cls.atyp);
  Budget b;
  b.mode = BudgetMode::refined;
  b.alpha = alpha;
  b.delta_t = cls.delta_t;
  b.delta_a = cls.delta_a;
  b.k_t = k_t;
  b.k_a = k_a;
  b.p = p;
  b.cap.assign(g.n(), 0);
  for (Vertex v = 0; v < g.n(); ++v) {
    if (!g.is_active(v)) continue;
    const std::size_t d = g.degree(v);
    if (tiny[v]) {
      b.cap[v] = d > k_t ? d - k_t : 0;
    } else if (atyp[v]) {
      b.cap[v] = d > k_a ? d - k_a : 0;
    } else {
      b.cap[v] = alpha_floor(alpha, d);
    }
  }
  return b;
}

Budget make_budget(const Graph& g, const BudgetParams& params, const Classification* cls) {
  if (params.mode == BudgetMode::simple) return make_simple_budget(g, params.alpha);
  if (cls == nullptr) throw InputError("refined budget requires a classification");
  return make_refined_budget(g, params.alpha, *cls, params.k_t, params.k_a);
}

double DeletionPlan::max_fraction(const Graph& g) const {
  std::vector<std::size_t> used(g.n(), 0);
  for (const Edge& e : h) {
    ++used[e.u];
    ++used[e.v];
  }
  double worst = 0;
  for (Vertex v = 0; v < g.n(); ++v) {
    if (g.degree(v) > 0) {
      worst = std::max(worst, static_cast<double>(used[v]) / static_cast<double>(g.degree(v)));
    }
  }
  return worst;
}

PlanCheck validate_plan(const Graph& g, const DeletionPlan& plan) {
  check_budget_shape(g, plan.budget);
  std::vector<Edge> sorted = plan.h;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InputError("validate_plan: repeated edge in plan");
  }
  std::vector<std::size_t> used(g.n(), 0);
  for (const Edge& e : sorted) {
    if (e.v >= g.n() || !g.has_edge(e.u, e.v)) {
      throw InputError("validate_plan: edge {" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                       "} is not in the graph");
    }
    ++used[e.u];
    ++used[e.v];
  }
  PlanCheck check;
  for (Vertex v = 0; v < g.n(); ++v) {
    if (used[v] > plan.budget.cap[v]) {
      check.ok = false;
      check.violator = v;
      check.used = used[v];
      check.cap = plan.budget.cap[v];
      break;
    }
  }
  return check;
}

DeletionPlan adversary_random(const Graph& g, const Budget& budget, std::uint64_t seed) {
  return adversary_targeted(g, budget, {}, seed);
}

DeletionPlan adversary_targeted(const Graph& g, const Budget& budget, std::span<const Edge> target,
                                std::uint64_t seed) {
  check_budget_shape(g, budget);
  std::vector<Edge> order = g.edges();
  Rng rng(seed);
  rng.shuffle(order);
  if (!target.empty()) {
    std::vector<Edge> wanted;
    wanted.reserve(target.size());
    for (const Edge& t : target) {
      Edge e = make_edge(t.u, t.v);
      if (e.v >= g.n() || !g.has_edge(e.u, e.v)) throw InputError("adversary_targeted: target edge not in graph");
      wanted.push_back(e);
    }
    std::sort(wanted.begin(), wanted.end());
    std::stable_partition(order.begin(), order.end(), [&](const Edge& e) {
      return std::binary_search(wanted.begin(), wanted.end(), e);
    });
  }
  DeletionPlan plan;
  plan.h = spend(order, budget.cap);
  plan.budget = budget;
  plan.strategy = target.empty() ? "random" : "targeted";
  return plan;
}

BipartitionResult adversary_bipartition(const Graph& g, const std::optional<Budget>& cap,
                                        std::uint64_t seed, std::size_t slack) {
  if (cap) check_budget_shape(g, *cap);
  Rng rng(seed);
  Sides s;
  s.side.assign(g.n(), 0);
  s.own.assign(g.n(), 0);
  std::vector<Vertex> active;
  for (Vertex v = 0; v < g.n(); ++v) {
    if (!g.is_active(v)) continue;
    active.push_back(v);
    s.side[v] = static_cast<char>(rng.below(2));
  }
  for (Vertex v : active) {
    for (Vertex u : g.neighbors(v)) s.own[v] += s.side[u] == s.side[v];
  }
  std::vector<Vertex> queue(active.rbegin(), active.rend());
  s.settle(g, queue);

  BipartitionResult result;
  if (s.count(g, 0) == s.count(g, 1) && !active.empty()) {
    result.unbalancing_attempted = true;
    std::vector<Vertex> candidates;
    for (Vertex v : active) {
      const std::size_t d = g.degree(v);
      const std::size_t need = (d + 1) / 2;
      if (d > 0 && s.own[v] + slack >= need) candidates.push_back(v);
    }
    rng.shuffle(candidates);
    for (Vertex v : candidates) {
      Sides trial = s;
      trial.flip(g, v);
      std::vector<Vertex> q{v};
      for (Vertex u : g.neighbors(v)) q.push_back(u);
      trial.settle(g, std::move(q));
      if (trial.count(g, 0) != trial.count(g, 1)) {
        s = std::move(trial);
        result.unbalanced_by_move = true;
        break;
      }
    }
  }

  std::vector<Vertex> part[2];
  for (Vertex v : active) part[static_cast<int>(s.side[v])].push_back(v);
  result.witness.v1 = VertexSet(std::move(part[0]));
  result.witness.v2 = VertexSet(std::move(part[1]));
  result.witness.balanced = result.witness.v1.size() == result.witness.v2.size();
  result.switches = s.switches;

  std::vector<Edge> internal;
  for (const Edge& e : g.edges()) {
    if (s.side[e.u] == s.side[e.v]) internal.push_back(e);
  }
  DeletionPlan& plan = result.plan;
  plan.strategy = "bipartition";
  if (cap) {
    rng.shuffle(internal);
    plan.h = spend(internal, cap->cap);
    plan.budget = *cap;
  } else {
    plan.h = std::move(internal);
    plan.budget = make_simple_budget(g, 1.0);
  }
  return result;
}

std::optional<Vertex> cross_majority_violation(const Graph& g, const PartitionWitness& w) {
  auto in_v1 = membership_mask(g.n(), w.v1);
  auto in_v2 = membership_mask(g.n(), w.v2);
  for (Vertex v = 0; v < g.n(); ++v) {
    if (!g.is_active(v)) continue;
    if (in_v1[v] == in_v2[v]) return v;  // missing or in both parts
    const auto& across = in_v1[v] ? in_v2 : in_v1;
    if (2 * degree_into(g, v, across) < g.degree(v)) return v;
  }
  return std::nullopt;
}

ParityCertificate parity_certificate(const Graph& g_minus_h, const PartitionWitness& w) {
  ParityCertificate cert;
  auto in_v1 = membership_mask(g_minus_h.n(), w.v1);
  auto in_v2 = membership_mask(g_minus_h.n(), w.v2);
  cert.bipartite = true;
  for (Vertex v = 0; v < g_minus_h.n(); ++v) {
    if (g_minus_h.is_active(v) && in_v1[v] == in_v2[v]) cert.bipartite = false;
  }
  for (const Edge& e : g_minus_h.edges()) {
    if (in_v1[e.u] == in_v1[e.v]) {
      cert.bipartite = false;
      break;
    }
  }
  const std::size_t a = w.v1.size();
  const std::size_t b = w.v2.size();
  cert.imbalance = a > b ? a - b : b - a;
  cert.no_hamilton_cycle = cert.bipartite && cert.imbalance >= 1 && g_minus_h.active_count() >= 3;
  cert.no_perfect_matching = cert.bipartite && cert.imbalance >= 2;
  return cert;
}

bool budget_dominated(const Budget& simple, const Budget& refined) {
  if (simple.cap.size() != refined.cap.size()) throw InputError("budget_dominated: size mismatch");
  for (std::size_t v = 0; v < simple.cap.size(); ++v) {
    if (simple.cap[v] > refined.cap[v]) return false;
  }
  return true;
}

bool refined_implication_holds(const Graph& g, double alpha, const Classification& cls,
                               std::size_t k_t, std::size_t k_a) {
  const double np = static_cast<double>(g.active_count()) * cls.p;
  if ((1.0 - alpha) * cls.delta_t * np < static_cast<double>(k_a) || k_a < k_t) return false;
  const std::size_t d = g.min_degree();
  return d - alpha_floor(alpha, d) >= k_t;
}

}  // namespace hamres

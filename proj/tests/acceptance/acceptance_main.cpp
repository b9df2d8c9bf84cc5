// Acceptance run: one PASS/FAIL line per criterion. Exit status is non-zero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <thread>

#include "hamres/adversary.hpp"
#include "hamres/experiment.hpp"
#include "hamres/hamilton.hpp"
#include "hamres/matching.hpp"
#include "hamres/random_process.hpp"
#include "hamres/structure.hpp"
#include "oracles.hpp"

using namespace hamres;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string rate_text(const RateEstimate& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu/%zu = %.3f [%.3f, %.3f]", r.successes, r.trials, r.rate, r.lo, r.hi);
  return buf;
}

Verdict oracle_matching() {
  std::mt19937_64 gen(1001);
  std::size_t agree = 0, total = 10000;
  for (std::size_t t = 0; t < total; ++t) {
    const std::size_t n = 1 + t % 8;
    Graph g = oracle::random_graph(n, 0.05 + 0.9 * double(gen() % 1000) / 1000.0, gen);
    Matching m = max_matching_exact(g);
    agree += matching_problem(g, m).empty() && m.size() == oracle::max_matching_size(g);
  }
  return {agree == total, std::to_string(agree) + "/" + std::to_string(total) + " agree with brute force"};
}

Verdict oracle_hamilton() {
  std::mt19937_64 gen(1002);
  std::size_t instances = 0, found = 0, truth_yes = 0, false_pos = 0, unverified = 0;
  for (std::uint64_t t = 0; instances < 500; ++t) {
    const std::size_t n = 5 + t % 10;
    Graph g = two_core(oracle::random_graph(n, 0.3 + 0.05 * double(t % 7), gen)).core;
    if (g.active_count() < 3) continue;
    ++instances;
    const double alpha = 0.1 * double(t % 5);
    DeletionPlan plan = t % 2 ? adversary_random(g, make_simple_budget(g, alpha), t)
                              : adversary_bipartition(g, make_simple_budget(g, alpha), t).plan;
    Graph rest = subtract(g, plan.h);
    const bool truth = hamilton_exact(rest).has_value();
    truth_yes += truth;
    auto r = hamilton_search(g, plan, classify(g, graph_density(g), 0.2, 0.6), HamParams{}, t);
    if (r.cycle) {
      ++found;
      if (!truth) ++false_pos;
      if (!verify_hamilton_cycle(rest, *r.cycle)) ++unverified;
    }
  }
  return {false_pos == 0 && unverified == 0,
          std::to_string(instances) + " instances, " + std::to_string(found) + " cycles found of " +
              std::to_string(truth_yes) + " Hamiltonian, false positives " + std::to_string(false_pos) +
              ", unverified " + std::to_string(unverified)};
}

Verdict booster_soundness() {
  std::mt19937_64 gen(1003);
  std::size_t instances = 0, checks = 0, sound = 0;
  for (std::uint64_t t = 0; instances < 500; ++t) {
    const std::size_t n = 6 + t % 9;
    Graph g = oracle::random_graph(n, 0.2 + 0.05 * double(t % 5), gen);
    auto dist = oracle::bfs_distances(g, 0);
    if (std::count(dist.begin(), dist.end(), -1) > 0) continue;
    ++instances;
    PathState p;
    p.seq = longest_path_exact(g);
    for (const Edge& e : rotation_booster_pairs(g, p, 16)) {
      ++checks;
      sound += !g.has_edge(e.u, e.v) && boosters_exact(g, e.u).companions.contains(e.v);
    }
  }
  return {checks > 0 && sound == checks, std::to_string(instances) + " instances, " + std::to_string(sound) + "/" +
                                             std::to_string(checks) + " rotation-derived pairs are boosters"};
}

ExperimentConfig config(ExperimentKind kind, std::size_t n, std::size_t trials, std::uint64_t seed) {
  ExperimentConfig c;
  c.kind = kind;
  c.n = n;
  c.trials = trials;
  c.seed = seed;
  c.workers = workers();
  return c;
}

Verdict hitting_concentration() {
  auto r = run_hitting(config(ExperimentKind::hitting, 3000, 50, 1004));
  const double ratio = r.summary.metrics.at("m2_ratio_mean");
  const double ordered = r.summary.metrics.at("m1_le_m2_count");
  return {ratio >= 0.85 && ratio <= 1.15 && ordered == 50.0,
          fmt("mean m2 / ((n/2)(ln n + ln ln n)) = %.4f", ratio) + fmt(", m1 <= m2 in %.0f/50", ordered)};
}

Verdict pm_at_m1() {
  auto r = run_hitting(config(ExperimentKind::hitting, 2000, 100, 1005));
  const auto& rate = r.summary.rates.at("pm_at_m1");
  return {rate.successes >= 95, "perfect matching at m1: " + rate_text(rate)};
}

Verdict ham_at_m2() {
  auto r = run_hitting(config(ExperimentKind::hitting, 1000, 50, 1006));
  const auto& rate = r.summary.rates.at("ham_at_m2");
  return {rate.rate >= 0.90, "verified Hamilton cycle at m2: " + rate_text(rate)};
}

Verdict pm_resilience() {
  auto above = config(ExperimentKind::pm_resilience, 2000, 50, 1007);
  above.m_coeff = 0.35;
  above.adversary.alpha = 0.3;
  auto ra = run_pm_resilience(above);
  auto below = above;
  below.m_coeff = 0.2;
  below.adversary.alpha = 0.0;
  auto rb = run_pm_resilience(below);
  const auto& pm = ra.summary.rates.at("pm");
  const auto& cherry = rb.summary.rates.at("cherry");
  return {pm.rate >= 0.90 && cherry.rate >= 0.90,
          "m = 0.35 n ln n, alpha 0.3: PM " + rate_text(pm) + " (cherry " +
              rate_text(ra.summary.rates.at("cherry")) + "); m = 0.2 n ln n: cherry " + rate_text(cherry)};
}

Verdict ham_resilience() {
  auto c = config(ExperimentKind::ham_resilience, 1000, 50, 1008);
  c.m_coeff = 1.0;
  c.adversary.alpha = 0.3;
  auto r = run_ham_resilience(c);
  const auto& rate = r.summary.rates.at("ham");
  return {rate.rate >= 0.85, "2-core minus H Hamiltonian: " + rate_text(rate)};
}

Verdict tightness() {
  const std::size_t n = 500, trials = 50;
  const std::size_t m = m_from_coeff(n, 1.0);
  std::size_t bipartite = 0, witness = 0, unbalanced = 0, certified = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const std::uint64_t seed = derive_seed(1009, t);
    Graph g = graph_at(sample_process(n, m, seed), m);
    auto r = adversary_bipartition(g, std::nullopt, derive_seed(seed, 2));
    Graph rest = subtract(g, r.plan.h);
    auto cert = parity_certificate(rest, r.witness);
    bipartite += cert.bipartite;
    witness += !cross_majority_violation(g, r.witness).has_value();
    if (!r.witness.balanced) {
      ++unbalanced;
      certified += cert.no_hamilton_cycle && cert.no_perfect_matching;
    }
  }
  return {bipartite == trials && witness == trials && certified == unbalanced,
          "bipartite " + std::to_string(bipartite) + "/50, witness valid " + std::to_string(witness) +
              "/50, unbalanced " + std::to_string(unbalanced) + ", certified " + std::to_string(certified) + "/" +
              std::to_string(unbalanced)};
}

Verdict structural_suite() {
  std::mt19937_64 gen(1010);
  std::size_t failures = 0;

  // 2-core order invariance.
  for (int t = 0; t < 1000; ++t) {
    Graph g = oracle::random_graph(30, 0.04 + 0.04 * (t % 4), gen);
    const Graph core = two_core(g).core;
    std::vector<Vertex> order(g.n());
    std::iota(order.begin(), order.end(), 0);
    for (int k = 0; k < 100; ++k) {
      std::shuffle(order.begin(), order.end(), gen);
      failures += !(two_core(g, order).core == core);
    }
  }
  const std::size_t core_failures = failures;

  // Rotation involution and vertex-set preservation.
  std::size_t rotations = 0;
  while (rotations < 1000) {
    Graph g = oracle::random_graph(14, 0.4, gen);
    PathState p;
    p.seq = {0};
    while (auto next = extend(p, g)) p = *next;
    for (std::size_t i = 2; i + 1 < p.size() && rotations < 1000; ++i) {
      if (!g.has_edge(p.front(), p.seq[i])) continue;
      PathState r = rotate(g, p, i);
      failures += !(is_path(g, r.seq) && VertexSet(r.seq) == VertexSet(p.seq) && r.front() == p.seq[i - 1] &&
                    rotate(g, r, i).seq == p.seq);
      ++rotations;
    }
  }

  // Sandwich nesting.
  std::size_t slices = 0;
  for (std::uint64_t s = 0; slices < 1000; ++s) {
    auto c = sample_sandwich(60, 0.05, 0.05, s);
    Graph prev = c.g_minus;
    for (std::size_t m = c.g_minus.m(); m <= c.g_plus.m() && slices < 1000; m += 7) {
      Graph cur = sandwich_slice(c, m);
      bool ok = cur.m() == m;
      for (const Edge& e : prev.edges()) ok = ok && cur.has_edge(e.u, e.v);
      for (const Edge& e : cur.edges()) ok = ok && c.g_plus.has_edge(e.u, e.v);
      failures += !ok;
      prev = cur;
      ++slices;
    }
  }

  // Plan validation.
  for (std::uint64_t t = 0; t < 1000; ++t) {
    Graph g = oracle::random_graph(30, 0.2, gen);
    const double alpha = 0.1 * double(t % 6);
    Budget b = make_simple_budget(g, alpha);
    DeletionPlan plan;
    switch (t % 3) {
      case 0: plan = adversary_random(g, b, t); break;
      case 1: {
        auto edges = g.edges();
        std::vector<Edge> target(edges.begin(), edges.begin() + std::ptrdiff_t(edges.size() / 3));
        plan = adversary_targeted(g, b, target, t);
        break;
      }
      default: plan = adversary_bipartition(g, b, t).plan;
    }
    failures += !validate_plan(g, plan).ok;
  }

  // Classification monotonicity.
  for (int t = 0; t < 200; ++t) {
    Graph g = oracle::random_graph(80, 0.08, gen);
    const double p = graph_density(g);
    const double d1 = 0.05 * (t % 5), d2 = d1 + 0.1;
    auto a = classify(g, p, d1, 0.6), b = classify(g, p, d2, 0.6);
    failures += !is_subset(a.tiny, b.tiny);
    if (d2 <= 1 - 0.6) failures += !is_subset(b.tiny, b.atyp);
  }
  return {failures == 0, "failures " + std::to_string(failures) + " (2-core order " + std::to_string(core_failures) +
                             "), rotations " + std::to_string(rotations) + ", slices " + std::to_string(slices) +
                             ", plans 1000, classifications 200"};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Verdict()> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "matching oracle equivalence", 60, oracle_matching},
      {2, "Hamiltonicity oracle equivalence", 300, oracle_hamilton},
      {3, "booster soundness", 300, booster_soundness},
      {4, "hitting-time concentration", 600, hitting_concentration},
      {5, "perfect matching at m1", 600, pm_at_m1},
      {6, "Hamilton cycle at m2", 1200, ham_at_m2},
      {7, "perfect-matching resilience", 900, pm_resilience},
      {8, "2-core Hamiltonicity resilience", 1800, ham_resilience},
      {9, "bipartition tightness adversary", 300, tightness},
      {10, "structural invariants", 300, structural_suite},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = v.pass && in_time;
    failed += !pass;
    std::printf("criterion %d: %s - %s: %s (%.1f s of %.0f s%s)\n", c.id, pass ? "PASS" : "FAIL", c.name,
                v.detail.c_str(), secs, c.limit_s, in_time ? "" : ", over time");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}

#include "hamres/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "hamres/error.hpp"
#include "hamres/hamilton.hpp"
#include "hamres/matching.hpp"
#include "hamres/random_process.hpp"
#include "hamres/rng.hpp"
#include "hamres/serialize.hpp"
#include "hamres/structure.hpp"

namespace hamres {

namespace {

// Sub-streams of one trial seed.
enum Stream : std::uint64_t { kProcess = 1, kAdversary = 2, kSolver = 3 };

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::uint64_t trial_seed(const ExperimentConfig& c, std::size_t index) { return derive_seed(c.seed, index); }

TrialRecord start_record(const ExperimentConfig& c, std::size_t index) {
  TrialRecord r;
  r.index = index;
  r.seed = trial_seed(c, index);
  r.n = c.n;
  return r;
}

PmParams pm_params(const ExperimentConfig& c, double p1) {
  PmParams p;
  p.eps = c.solver.eps;
  p.K = c.solver.K;
  p.L = c.solver.L;
  p.p1 = p1;
  p.strict_preconditions = c.solver.strict_preconditions;
  return p;
}

HamParams ham_params(const ExperimentConfig& c) {
  HamParams p;
  p.eps = c.solver.eps;
  p.K = c.solver.K;
  p.L = c.solver.L;
  p.mu = c.solver.mu;
  p.strict_preconditions = c.solver.strict_preconditions;
  return p;
}

// G_m, either from a covering sandwich (so the solvers see G- and G+) or,
// without a fixed m, from the process stopped at the k-th hitting time.
struct Instance {
  Graph g;
  std::size_t m = 0;
  std::optional<SandwichCoupling> sandwich;
  std::optional<std::size_t> m1;
  std::optional<std::size_t> m2;
};

Instance draw_instance(const ExperimentConfig& c, std::uint64_t seed, int hitting_k) {
  Instance inst;
  if (auto m = c.resolve_m()) {
    inst.m = *m;
    const auto d = sandwich_densities(c.n, *m, c.solver.eps);
    try {
      auto cov = sample_covering_sandwich(c.n, d.p0, d.p_prime, *m, *m, seed);
      inst.g = sandwich_slice(cov.coupling, *m);
      inst.sandwich = std::move(cov.coupling);
    } catch (const RangeError&) {
      // Small n: the edge counts fluctuate too much to cover m. Plain slice.
      inst.g = graph_at(sample_process(c.n, *m, seed), *m);
    }
    return inst;
  }
  auto trace = sample_process_until(c.n, hitting_k, seed);
  inst.m1 = trace.hitting_time(1);
  inst.m2 = trace.hitting_time(2);
  inst.m = *trace.hitting_time(hitting_k);
  inst.g = graph_at(trace, inst.m);
  return inst;
}

// Tiny/atypical sets for the solvers, restricted to the vertices of g.
Classification solver_classes(const ExperimentConfig& c, const Instance& inst, const Graph& g) {
  Classification cls;
  if (inst.sandwich) {
    const auto& s = *inst.sandwich;
    cls = classify_sandwich(s.g_minus, s.g_plus, s.p0, s.p1, c.solver.delta_t, c.solver.delta_a);
  } else {
    cls = classify(inst.g, graph_density(inst.g), c.solver.delta_t, c.solver.delta_a);
  }
  return restrict_to(cls, g.active_vertices());
}

struct PlanOutcome {
  DeletionPlan plan;
  std::optional<PartitionWitness> witness;
};

PlanOutcome make_plan(const ExperimentConfig& c, const Graph& g, std::uint64_t seed, TrialRecord& r) {
  const AdversarySpec& a = c.adversary;
  Classification own = classify(g, std::max(graph_density(g), 1e-300), a.delta_t, a.delta_a);
  Budget budget = a.budget == BudgetMode::simple ? make_simple_budget(g, a.alpha)
                                                 : make_refined_budget(g, a.alpha, own, a.k_t, a.k_a);
  PlanOutcome out;
  switch (a.strategy) {
    case AdversaryKind::random:
      out.plan = adversary_random(g, budget, seed);
      break;
    case AdversaryKind::targeted: {
      // Attack the edges at tiny and atypical vertices first.
      auto weak = membership_mask(g.n(), set_union(own.tiny, own.atyp));
      std::vector<Edge> target;
      for (const Edge& e : g.edges()) {
        if (weak[e.u] || weak[e.v]) target.push_back(e);
      }
      out.plan = adversary_targeted(g, budget, target, seed);
      break;
    }
    case AdversaryKind::bipartition: {
      auto res = adversary_bipartition(g, a.uncapped ? std::nullopt : std::optional<Budget>(budget), seed);
      out.plan = std::move(res.plan);
      out.witness = res.witness;
      r.unbalanced = !res.witness.balanced;
      r.witness_valid = !cross_majority_violation(g, res.witness).has_value();
      break;
    }
  }
  if (!(a.strategy == AdversaryKind::bipartition && a.uncapped)) {
    auto check = validate_plan(g, out.plan);
    if (!check.ok) throw InvariantError("adversary exceeded its budget at vertex " + std::to_string(*check.violator));
  }
  r.edges_deleted = out.plan.h.size();
  r.max_fraction = out.plan.max_fraction(g);
  return out;
}

std::string search_failure(const SearchReport& rep, std::size_t vertices) {
  if (!rep.certificate.empty()) return "certified: " + rep.certificate;
  return "search failed: best path " + std::to_string(rep.best_path_len) + " of " + std::to_string(vertices);
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0;
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) return 0;
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return xs[lo] + (xs[hi] - xs[lo]) * (pos - static_cast<double>(lo));
}

RateEstimate rate_of(const std::vector<TrialRecord>& rs, const std::function<std::optional<bool>(const TrialRecord&)>& f) {
  std::size_t yes = 0;
  std::size_t total = 0;
  for (const auto& r : rs) {
    if (auto v = f(r)) {
      ++total;
      yes += *v;
    }
  }
  return wilson(yes, total);
}

Summary base_summary(const ExperimentConfig& c, const std::vector<TrialRecord>& rs) {
  Summary s;
  s.kind = c.kind;
  s.n = c.n;
  s.m = c.resolve_m();
  s.trials = rs.size();
  s.rates["success"] = rate_of(rs, [](const TrialRecord& r) { return std::optional<bool>(r.success); });
  std::vector<double> verts;
  for (const auto& r : rs) verts.push_back(static_cast<double>(r.vertices));
  s.metrics["vertices_mean"] = mean_of(verts);
  return s;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

template <class T>
std::string opt(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_same_v<T, bool>) {
    return *v ? "1" : "0";
  } else {
    return std::to_string(*v);
  }
}

}  // namespace

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::hitting:
      return "hitting";
    case ExperimentKind::pm_resilience:
      return "pm-res";
    case ExperimentKind::ham_resilience:
      return "ham-res";
    case ExperimentKind::sweep:
      return "sweep";
    case ExperimentKind::classify:
      return "classify";
  }
  return "?";
}

const char* to_string(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::random:
      return "random";
    case AdversaryKind::bipartition:
      return "bipartition";
    case AdversaryKind::targeted:
      return "targeted";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(const std::string& s) {
  for (auto k : {ExperimentKind::hitting, ExperimentKind::pm_resilience, ExperimentKind::ham_resilience,
                 ExperimentKind::sweep, ExperimentKind::classify}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown experiment kind '" + s + "'");
}

AdversaryKind parse_adversary_kind(const std::string& s) {
  for (auto k : {AdversaryKind::random, AdversaryKind::bipartition, AdversaryKind::targeted}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown adversary '" + s + "' (random, bipartition, targeted)");
}

std::size_t m_from_coeff(std::size_t n, double coeff) {
  const double nn = static_cast<double>(n);
  return static_cast<std::size_t>(std::ceil(coeff * nn * std::log(nn)));
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (n < 3) fail("n must be at least 3");
  if (n > 2'000'000) fail("n is too large");
  if (trials == 0) fail("trials must be positive");
  if (workers == 0) fail("workers must be positive");
  if (m && m_coeff) fail("give either m or m_coeff, not both");
  if (m_coeff && !(*m_coeff >= 0 && std::isfinite(*m_coeff))) fail("m_coeff must be a non-negative number");
  if (auto mm = resolve_m(); mm && *mm > pair_count(n)) fail("m exceeds C(n, 2)");
  if (kind == ExperimentKind::sweep) {
    if (sweep_coeffs.empty()) fail("sweep needs at least one coefficient");
    for (double c : sweep_coeffs) {
      if (!(c >= 0 && std::isfinite(c))) fail("sweep coefficients must be non-negative");
      if (m_from_coeff(n, c) > pair_count(n)) fail("sweep coefficient gives m above C(n, 2)");
    }
  }
  if (kind == ExperimentKind::classify && !resolve_m()) fail("classify needs m or m_coeff");
  if (!(adversary.alpha >= 0 && adversary.alpha <= 1)) fail("alpha must lie in [0, 1]");
  for (double d : {adversary.delta_t, adversary.delta_a, solver.delta_t, solver.delta_a}) {
    if (!(d >= 0 && d <= 1)) fail("delta values must lie in [0, 1]");
  }
  if (!(solver.eps > 0 && solver.eps < 1)) fail("eps must lie in (0, 1)");
  if (!(solver.mu > 0 && solver.mu <= 1)) fail("mu must lie in (0, 1]");
  if (solver.K == 0) fail("K must be positive");
  if (format != "csv" && format != "json") fail("format must be csv or json");
}

std::optional<std::size_t> ExperimentConfig::resolve_m() const {
  if (m) return m;
  if (m_coeff) return m_from_coeff(n, *m_coeff);
  return std::nullopt;
}

RateEstimate wilson(std::size_t successes, std::size_t trials, double z) {
  RateEstimate r;
  r.successes = successes;
  r.trials = trials;
  if (trials == 0) return r;
  const double nn = static_cast<double>(trials);
  const double ph = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1 + z2 / nn;
  const double centre = (ph + z2 / (2 * nn)) / denom;
  const double half = z * std::sqrt(ph * (1 - ph) / nn + z2 / (4 * nn * nn)) / denom;
  r.rate = ph;
  r.lo = std::max(0.0, centre - half);
  r.hi = std::min(1.0, centre + half);
  return r;
}

TrialRecord hitting_trial(const ExperimentConfig& c, std::size_t index) {
  const auto t0 = Clock::now();
  TrialRecord r = start_record(c, index);
  const std::uint64_t s = r.seed;
  auto trace = sample_process_until(c.n, 2, derive_seed(s, kProcess));
  r.m1 = trace.hitting_time(1);
  r.m2 = trace.hitting_time(2);
  r.m = *r.m2;
  r.vertices = c.n;

  const Graph g1 = remove_isolated(graph_at(trace, *r.m1));
  r.pm = is_perfect_matching(g1, max_matching_exact(g1));
  r.oracle = r.pm;

  const Graph g2 = graph_at(trace, *r.m2);
  DeletionPlan plan;
  plan.budget = make_simple_budget(g2, 0);
  const auto cls = classify(g2, graph_density(g2), c.solver.delta_t, c.solver.delta_a);
  auto res = hamilton_search(g2, plan, cls, ham_params(c), derive_seed(s, kSolver));
  r.ham = res.cycle && verify_hamilton_cycle(g2, *res.cycle);
  r.e_prime = res.report.e_prime_used;
  r.solver = res.report.tier;
  r.success = *r.pm && *r.ham;
  if (r.success) {
    r.stage = "ok";
  } else if (!*r.pm) {
    r.stage = "no perfect matching at m1";
  } else {
    r.stage = search_failure(res.report, c.n);
  }
  r.runtime_ms = elapsed_ms(t0);
  return r;
}

TrialRecord pm_resilience_trial(const ExperimentConfig& c, std::size_t index) {
  const auto t0 = Clock::now();
  TrialRecord r = start_record(c, index);
  const std::uint64_t s = r.seed;
  Instance inst = draw_instance(c, derive_seed(s, kProcess), 1);
  r.m = inst.m;
  r.m1 = inst.m1;
  r.cherry = cherry_count(inst.g) > 0;
  const Graph g = remove_isolated(inst.g);
  r.vertices = g.active_count();
  if (r.vertices < 2) {
    r.pm = false;
    r.stage = "fewer than 2 non-isolated vertices";
    r.runtime_ms = elapsed_ms(t0);
    return r;
  }
  const auto cls = solver_classes(c, inst, g);
  PlanOutcome po = make_plan(c, g, derive_seed(s, kAdversary), r);
  const Graph host = subtract(g, po.plan.h);
  if (po.witness && *r.unbalanced) {
    r.parity_certified = parity_certificate(host, *po.witness).no_perfect_matching;
  }

  const double p1 = inst.sandwich ? inst.sandwich->p1 : 0.0;
  PipelineReport rep = constructive_pm(g, po.plan, cls, pm_params(c, p1), derive_seed(s, kSolver));
  const bool exact = is_perfect_matching(host, max_matching_exact(host));
  r.oracle = exact;
  if (rep.success && !exact) throw InvariantError("pipeline matching contradicts the exact oracle");
  if (!rep.obstruction.empty() && exact) throw InvariantError("obstruction certificate contradicts the exact oracle");
  if (exact && r.parity_certified.value_or(false)) throw InvariantError("parity certificate contradicts the oracle");

  r.success = rep.success || exact;
  r.pm = r.success;
  r.solver = rep.success ? "pipeline" : (exact ? "exact" : "");
  if (rep.success) {
    r.stage = "ok";
  } else if (!rep.obstruction.empty()) {
    r.stage = "certified: " + rep.obstruction;
  } else if (rep.failed_stage) {
    r.stage = std::string(to_string(*rep.failed_stage)) + ": " + rep.failure_reason;
  } else {
    r.stage = rep.failure_reason;
  }
  r.runtime_ms = elapsed_ms(t0);
  return r;
}

TrialRecord ham_resilience_trial(const ExperimentConfig& c, std::size_t index) {
  const auto t0 = Clock::now();
  TrialRecord r = start_record(c, index);
  const std::uint64_t s = r.seed;
  Instance inst = draw_instance(c, derive_seed(s, kProcess), 2);
  r.m = inst.m;
  r.m1 = inst.m1;
  r.m2 = inst.m2;
  const Graph core = two_core(inst.g).core;
  r.vertices = core.active_count();
  if (r.vertices < 3) {
    r.ham = false;
    r.stage = "2-core has fewer than 3 vertices";
    r.runtime_ms = elapsed_ms(t0);
    return r;
  }
  const auto cls = solver_classes(c, inst, core);
  PlanOutcome po = make_plan(c, core, derive_seed(s, kAdversary), r);
  const Graph host = subtract(core, po.plan.h);
  if (po.witness && *r.unbalanced) {
    r.parity_certified = parity_certificate(host, *po.witness).no_hamilton_cycle;
  }
  auto res = hamilton_search(core, po.plan, cls, ham_params(c), derive_seed(s, kSolver),
                             inst.sandwich ? &*inst.sandwich : nullptr);
  const bool found = res.cycle && verify_hamilton_cycle(host, *res.cycle);
  if (res.cycle && !found) throw InvariantError("hamilton_search returned an invalid cycle");
  if (r.vertices <= 14) {
    r.oracle = hamilton_exact(host).has_value();
    if (found && !*r.oracle) throw InvariantError("hamilton_search contradicts the exact oracle");
  }
  if (found && r.parity_certified.value_or(false)) throw InvariantError("cycle found in a certified bipartite graph");
  r.ham = found;
  r.success = found;
  r.e_prime = res.report.e_prime_used;
  r.solver = res.report.tier;
  r.stage = found ? "ok" : search_failure(res.report, r.vertices);
  r.runtime_ms = elapsed_ms(t0);
  return r;
}

TrialRecord sweep_trial(const ExperimentConfig& c, double coeff, std::size_t index) {
  const auto t0 = Clock::now();
  TrialRecord r = start_record(c, index);
  const std::uint64_t s = r.seed;
  r.coeff = coeff;
  r.m = m_from_coeff(c.n, coeff);
  auto trace = sample_process(c.n, r.m, derive_seed(s, kProcess));
  const Graph g = graph_at(trace, r.m);
  r.cherry = cherry_count(g) > 0;
  const Graph gi = remove_isolated(g);
  r.pm = gi.active_count() >= 2 && is_perfect_matching(gi, max_matching_exact(gi));
  const Graph core = two_core(g).core;
  r.vertices = core.active_count();
  r.ham = false;
  if (r.vertices >= 3) {
    const auto cls = restrict_to(classify(g, std::max(graph_density(g), 1e-300), c.solver.delta_t, c.solver.delta_a),
                                 core.active_vertices());
    PlanOutcome po = make_plan(c, core, derive_seed(s, kAdversary), r);
    auto res = hamilton_search(core, po.plan, cls, ham_params(c), derive_seed(s, kSolver));
    r.ham = res.cycle && verify_hamilton_cycle(subtract(core, po.plan.h), *res.cycle);
    r.e_prime = res.report.e_prime_used;
    r.solver = res.report.tier;
    r.stage = *r.ham ? "ok" : search_failure(res.report, r.vertices);
  } else {
    r.stage = "2-core has fewer than 3 vertices";
  }
  r.success = *r.ham;
  r.runtime_ms = elapsed_ms(t0);
  return r;
}

TrialRecord classify_trial(const ExperimentConfig& c, std::size_t index) {
  const auto t0 = Clock::now();
  TrialRecord r = start_record(c, index);
  Instance inst = draw_instance(c, derive_seed(r.seed, kProcess), 1);
  r.m = inst.m;
  r.vertices = inst.g.active_count();
  const auto& sw = *inst.sandwich;
  auto scatter = check_scatter(sw, c.solver.delta_t, c.solver.K, c.solver.L);
  r.success = scatter.pass();
  r.cherry = cherry_count(inst.g) > 0;
  std::ostringstream st;
  st << "tiny=" << scatter.tiny.size() << " atyp=" << scatter.atyp.size() << " scatter=" << (r.success ? "pass" : "fail");
  r.stage = st.str();
  r.runtime_ms = elapsed_ms(t0);
  return r;
}

ClassifyDetail classify_instance(const ExperimentConfig& c, std::size_t index) {
  c.validate();
  Instance inst = draw_instance(c, derive_seed(trial_seed(c, index), kProcess), 1);
  const auto& sw = *inst.sandwich;
  ClassifyDetail d;
  d.cls = classify_sandwich(sw.g_minus, sw.g_plus, sw.p0, sw.p1, c.solver.delta_t, c.solver.delta_a);
  d.scatter = check_scatter(sw, c.solver.delta_t, c.solver.K, c.solver.L);
  return d;
}

std::vector<TrialRecord> run_pool(std::size_t count, std::size_t workers,
                                  const std::function<TrialRecord(std::size_t)>& fn) {
  std::vector<TrialRecord> out(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
        return;
      }
    }
  };
  const std::size_t threads = std::min(std::max<std::size_t>(workers, 1), std::max<std::size_t>(count, 1));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

RunResult run_hitting(const ExperimentConfig& c) {
  c.validate();
  RunResult res;
  res.records = run_pool(c.trials, c.workers, [&](std::size_t i) { return hitting_trial(c, i); });
  Summary& s = res.summary = base_summary(c, res.records);
  s.m.reset();
  s.rates["pm_at_m1"] = rate_of(res.records, [](const TrialRecord& r) { return r.pm; });
  s.rates["ham_at_m2"] = rate_of(res.records, [](const TrialRecord& r) { return r.ham; });
  const double n = static_cast<double>(c.n);
  const double scale = n / 2 * (std::log(n) + std::log(std::log(n)));
  std::vector<double> m1s;
  std::vector<double> m2s;
  std::vector<double> ratios;
  std::size_t ordered = 0;
  for (const auto& r : res.records) {
    m1s.push_back(static_cast<double>(*r.m1));
    m2s.push_back(static_cast<double>(*r.m2));
    ratios.push_back(static_cast<double>(*r.m2) / scale);
    ordered += *r.m1 <= *r.m2;
  }
  s.metrics["m1_mean"] = mean_of(m1s);
  s.metrics["m2_mean"] = mean_of(m2s);
  s.metrics["m2_q10"] = quantile(m2s, 0.1);
  s.metrics["m2_q50"] = quantile(m2s, 0.5);
  s.metrics["m2_q90"] = quantile(m2s, 0.9);
  s.metrics["m2_ratio_mean"] = mean_of(ratios);
  s.metrics["m1_le_m2_count"] = static_cast<double>(ordered);
  return res;
}

RunResult run_pm_resilience(const ExperimentConfig& c) {
  c.validate();
  RunResult res;
  res.records = run_pool(c.trials, c.workers, [&](std::size_t i) { return pm_resilience_trial(c, i); });
  Summary& s = res.summary = base_summary(c, res.records);
  s.rates["pm"] = rate_of(res.records, [](const TrialRecord& r) { return r.pm; });
  s.rates["pipeline"] = rate_of(res.records, [](const TrialRecord& r) { return std::optional<bool>(r.solver == "pipeline"); });
  s.rates["cherry"] = rate_of(res.records, [](const TrialRecord& r) { return r.cherry; });
  s.rates["parity_certified"] = rate_of(res.records, [](const TrialRecord& r) { return r.parity_certified; });
  std::vector<double> frac;
  for (const auto& r : res.records) frac.push_back(r.max_fraction);
  s.metrics["max_fraction_mean"] = mean_of(frac);
  return res;
}

RunResult run_ham_resilience(const ExperimentConfig& c) {
  c.validate();
  RunResult res;
  res.records = run_pool(c.trials, c.workers, [&](std::size_t i) { return ham_resilience_trial(c, i); });
  Summary& s = res.summary = base_summary(c, res.records);
  s.rates["ham"] = rate_of(res.records, [](const TrialRecord& r) { return r.ham; });
  s.rates["oracle"] = rate_of(res.records, [](const TrialRecord& r) { return r.oracle; });
  s.rates["unbalanced"] = rate_of(res.records, [](const TrialRecord& r) { return r.unbalanced; });
  s.rates["witness_valid"] = rate_of(res.records, [](const TrialRecord& r) { return r.witness_valid; });
  s.rates["parity_certified"] = rate_of(res.records, [](const TrialRecord& r) { return r.parity_certified; });
  std::vector<double> frac;
  std::vector<double> ep;
  for (const auto& r : res.records) {
    frac.push_back(r.max_fraction);
    ep.push_back(static_cast<double>(r.e_prime));
  }
  s.metrics["max_fraction_mean"] = mean_of(frac);
  s.metrics["e_prime_mean"] = mean_of(ep);
  return res;
}

RunResult run_sweep(const ExperimentConfig& c) {
  c.validate();
  RunResult res;
  const std::size_t k = c.sweep_coeffs.size();
  auto all = run_pool(k * c.trials, c.workers, [&](std::size_t i) {
    return sweep_trial(c, c.sweep_coeffs[i / c.trials], i % c.trials);
  });
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<TrialRecord> rows(all.begin() + static_cast<std::ptrdiff_t>(j * c.trials),
                                  all.begin() + static_cast<std::ptrdiff_t>((j + 1) * c.trials));
    SweepRow row;
    row.coeff = c.sweep_coeffs[j];
    row.n = c.n;
    row.m = m_from_coeff(c.n, row.coeff);
    row.trials = c.trials;
    row.pm = rate_of(rows, [](const TrialRecord& r) { return r.pm; });
    row.ham = rate_of(rows, [](const TrialRecord& r) { return r.ham; });
    row.cherry = rate_of(rows, [](const TrialRecord& r) { return r.cherry; });
    std::vector<double> cores;
    for (const auto& r : rows) cores.push_back(static_cast<double>(r.vertices));
    row.core_size_mean = mean_of(cores);
    res.sweep.push_back(row);
  }
  res.records = std::move(all);
  res.summary = base_summary(c, res.records);
  return res;
}

RunResult run_classify(const ExperimentConfig& c) {
  c.validate();
  RunResult res;
  res.records = run_pool(c.trials, c.workers, [&](std::size_t i) { return classify_trial(c, i); });
  res.summary = base_summary(c, res.records);
  res.summary.rates["scatter_pass"] = res.summary.rates["success"];
  res.summary.rates["cherry"] = rate_of(res.records, [](const TrialRecord& r) { return r.cherry; });
  return res;
}

RunResult run_experiment(const ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::hitting:
      return run_hitting(c);
    case ExperimentKind::pm_resilience:
      return run_pm_resilience(c);
    case ExperimentKind::ham_resilience:
      return run_ham_resilience(c);
    case ExperimentKind::sweep:
      return run_sweep(c);
    case ExperimentKind::classify:
      return run_classify(c);
  }
  throw ConfigError("unknown experiment kind");
}

TrialRecord replay_trial(const ExperimentConfig& c, std::size_t index, double coeff) {
  c.validate();
  switch (c.kind) {
    case ExperimentKind::hitting:
      return hitting_trial(c, index);
    case ExperimentKind::pm_resilience:
      return pm_resilience_trial(c, index);
    case ExperimentKind::ham_resilience:
      return ham_resilience_trial(c, index);
    case ExperimentKind::sweep:
      return sweep_trial(c, coeff, index);
    case ExperimentKind::classify:
      return classify_trial(c, index);
  }
  throw ConfigError("unknown experiment kind");
}

const std::vector<std::string>& trial_columns() {
  static const std::vector<std::string> cols{
      "index",  "seed",   "n",      "m",          "coeff",  "m1",      "m2",
      "vertices", "edges_deleted", "max_fraction", "success", "stage", "pm", "ham",
      "cherry", "oracle", "solver", "e_prime", "unbalanced", "parity_certified", "witness_valid", "runtime_ms"};
  return cols;
}

std::string trial_csv_row(const TrialRecord& r, bool timing) {
  std::vector<std::string> f{std::to_string(r.index),
                             std::to_string(r.seed),
                             std::to_string(r.n),
                             std::to_string(r.m),
                             fmt(r.coeff),
                             opt(r.m1),
                             opt(r.m2),
                             std::to_string(r.vertices),
                             std::to_string(r.edges_deleted),
                             fmt(r.max_fraction),
                             r.success ? "1" : "0",
                             csv_escape(r.stage),
                             opt(r.pm),
                             opt(r.ham),
                             opt(r.cherry),
                             opt(r.oracle),
                             csv_escape(r.solver),
                             std::to_string(r.e_prime),
                             opt(r.unbalanced),
                             opt(r.parity_certified),
                             opt(r.witness_valid),
                             timing ? fmt(r.runtime_ms) : ""};
  std::string line;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) line += ',';
    line += f[i];
  }
  return line;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "coeff,n,trials,pm_rate,ham_rate,cherry_rate,core_size_mean\n";
  for (const auto& r : rows) {
    out += fmt(r.coeff) + ',' + std::to_string(r.n) + ',' + std::to_string(r.trials) + ',' + fmt(r.pm.rate) + ',' +
           fmt(r.ham.rate) + ',' + fmt(r.cherry.rate) + ',' + fmt(r.core_size_mean) + '\n';
  }
  return out;
}

void write_outputs(const ExperimentConfig& c, const RunResult& r) {
  if (c.out_dir.empty()) return;
  namespace fs = std::filesystem;
  fs::create_directories(c.out_dir);
  const fs::path dir(c.out_dir);
  if (c.format == "json") {
    Json rows = Json::array();
    for (const auto& rec : r.records) {
      Json j = rec;
      if (c.timing) j["runtime_ms"] = rec.runtime_ms;
      rows.push_back(std::move(j));
    }
    std::ofstream(dir / "trials.json") << rows.dump(2) << '\n';
  } else {
    std::ofstream out(dir / "trials.csv");
    const auto& cols = trial_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& rec : r.records) out << trial_csv_row(rec, c.timing) << '\n';
  }
  Json summary = r.summary;
  summary["config"] = c;
  if (!r.sweep.empty()) {
    summary["sweep"] = r.sweep;
    std::ofstream(dir / "sweep.csv") << sweep_csv(r.sweep);
  }
  std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
}

}  // namespace hamres

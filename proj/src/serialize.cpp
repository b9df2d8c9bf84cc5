#include "hamres/serialize.hpp"

#include <ostream>
#include <set>

#include "hamres/error.hpp"

namespace hamres {

namespace {

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

const char* to_string(BudgetMode m) { return m == BudgetMode::simple ? "simple" : "refined"; }

BudgetMode parse_budget_mode(const std::string& s) {
  if (s == "simple") return BudgetMode::simple;
  if (s == "refined") return BudgetMode::refined;
  throw ConfigError("unknown budget mode '" + s + "'");
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

template <class T>
void read(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

void to_json(Json& j, const VertexSet& s) { j = Json(std::vector<Vertex>(s.begin(), s.end())); }

void to_json(Json& j, const PropertyCheck& c) {
  j = Json{{"name", c.name},
           {"pass", c.pass},
           {"bound", c.bound},
           {"observed", c.observed},
           {"center", optional_json(c.center)},
           {"witness", c.witness}};
}

void to_json(Json& j, const Classification& c) {
  j = Json{{"p", c.p},
           {"p_upper", optional_json(c.p_upper)},
           {"delta_t", c.delta_t},
           {"delta_a", c.delta_a},
           {"tiny", c.tiny},
           {"atyp", c.atyp}};
}

void to_json(Json& j, const ScatterReport& r) {
  j = Json{{"delta", r.delta},     {"k", r.k},
           {"L", r.L},             {"cycle_cap", r.cycle_cap},
           {"pass", r.pass()},     {"tiny_near", r.tiny_near},
           {"atyp_near", r.atyp_near}, {"tiny_cycles", r.tiny_cycles},
           {"tiny", r.tiny},       {"atyp", r.atyp}};
}

Json budget_descriptor(const Budget& b) {
  Json j{{"mode", to_string(b.mode)}, {"alpha", b.alpha}, {"p", b.p}};
  if (b.mode == BudgetMode::refined) {
    j["delta_t"] = b.delta_t;
    j["delta_a"] = b.delta_a;
    j["k_t"] = b.k_t;
    j["k_a"] = b.k_a;
  }
  return j;
}

void to_json(Json& j, const Budget& b) {
  j = budget_descriptor(b);
  j["cap"] = b.cap;
}

void to_json(Json& j, const StageOutcome& s) {
  j = Json{{"stage", to_string(s.stage)}, {"ok", s.ok}, {"detail", s.detail}, {"checks", s.checks}};
}

void to_json(Json& j, const PipelineReport& r) {
  j = Json{{"success", r.success},
           {"failed_stage", r.failed_stage ? Json(to_string(*r.failed_stage)) : Json(nullptr)},
           {"failure_reason", r.failure_reason},
           {"witness", r.witness},
           {"obstruction", r.obstruction},
           {"stages", r.stages},
           {"matching_size", r.matching.size()},
           {"removed_vertex", optional_json(r.removed_vertex)},
           {"tiny_count", r.tiny_count},
           {"atyp_count", r.atyp_count},
           {"u1_size", r.u1_size},
           {"degenerate_count", r.degenerate_count},
           {"moved", r.moved}};
  if (r.hall) j["hall"] = Json{{"s", r.hall->s}, {"neighbours", r.hall->neighbours}};
}

void to_json(Json& j, const SearchReport& r) {
  j = Json{{"found", r.found},
           {"tier", r.tier},
           {"certificate", r.certificate},
           {"iterations", r.iterations},
           {"restarts", r.restarts},
           {"best_path_len", r.best_path_len},
           {"e_prime_used", r.e_prime_used},
           {"booster_candidates", r.booster_candidates},
           {"boosters_realized", r.boosters_realized},
           {"backbone_violations", r.backbone_violations}};
}

void to_json(Json& j, const SearchResult& r) {
  to_json(j, r.report);
  if (r.cycle) j["cycle"] = *r.cycle;
}

void to_json(Json& j, const TrialRecord& r) {
  j = Json{{"index", r.index},
           {"seed", r.seed},
           {"n", r.n},
           {"m", r.m},
           {"coeff", r.coeff},
           {"m1", optional_json(r.m1)},
           {"m2", optional_json(r.m2)},
           {"vertices", r.vertices},
           {"edges_deleted", r.edges_deleted},
           {"max_fraction", r.max_fraction},
           {"success", r.success},
           {"stage", r.stage},
           {"pm", optional_json(r.pm)},
           {"ham", optional_json(r.ham)},
           {"cherry", optional_json(r.cherry)},
           {"oracle", optional_json(r.oracle)},
           {"solver", r.solver},
           {"e_prime", r.e_prime},
           {"unbalanced", optional_json(r.unbalanced)},
           {"parity_certified", optional_json(r.parity_certified)},
           {"witness_valid", optional_json(r.witness_valid)}};
}

void to_json(Json& j, const RateEstimate& r) {
  j = Json{{"successes", r.successes}, {"trials", r.trials}, {"rate", r.rate}, {"wilson_lo", r.lo}, {"wilson_hi", r.hi}};
}

void to_json(Json& j, const Summary& s) {
  j = Json{{"kind", to_string(s.kind)},
           {"n", s.n},
           {"m", optional_json(s.m)},
           {"trials", s.trials},
           {"rates", s.rates},
           {"metrics", s.metrics}};
}

void to_json(Json& j, const SweepRow& r) {
  j = Json{{"coeff", r.coeff},   {"n", r.n},          {"m", r.m},
           {"trials", r.trials}, {"pm_rate", r.pm},   {"ham_rate", r.ham},
           {"cherry_rate", r.cherry}, {"core_size_mean", r.core_size_mean}};
}

void to_json(Json& j, const ExperimentConfig& c) {
  j = Json{{"kind", to_string(c.kind)},
           {"n", c.n},
           {"m", optional_json(c.m)},
           {"m_coeff", optional_json(c.m_coeff)},
           {"sweep_coeffs", c.sweep_coeffs},
           {"trials", c.trials},
           {"seed", c.seed},
           {"workers", c.workers},
           {"out", c.out_dir},
           {"format", c.format},
           {"timing", c.timing},
           {"adversary",
            {{"strategy", to_string(c.adversary.strategy)},
             {"alpha", c.adversary.alpha},
             {"budget", to_string(c.adversary.budget)},
             {"delta_t", c.adversary.delta_t},
             {"k_t", c.adversary.k_t},
             {"delta_a", c.adversary.delta_a},
             {"k_a", c.adversary.k_a},
             {"uncapped", c.adversary.uncapped}}},
           {"solver",
            {{"eps", c.solver.eps},
             {"K", c.solver.K},
             {"L", c.solver.L},
             {"mu", c.solver.mu},
             {"delta_t", c.solver.delta_t},
             {"delta_a", c.solver.delta_a},
             {"strict_preconditions", c.solver.strict_preconditions}}}};
}

namespace {

ExperimentConfig parse_config(const Json& j) {
  check_keys(j,
             {"kind", "n", "m", "m_coeff", "sweep_coeffs", "trials", "seed", "workers", "out", "format", "timing",
              "adversary", "solver"},
             "config");
  ExperimentConfig c;
  if (j.contains("kind")) c.kind = parse_experiment_kind(j.at("kind").get<std::string>());
  read(j, "n", c.n);
  if (j.contains("m") && !j.at("m").is_null()) c.m = j.at("m").get<std::size_t>();
  if (j.contains("m_coeff") && !j.at("m_coeff").is_null()) c.m_coeff = j.at("m_coeff").get<double>();
  read(j, "sweep_coeffs", c.sweep_coeffs);
  read(j, "trials", c.trials);
  read(j, "seed", c.seed);
  read(j, "workers", c.workers);
  read(j, "out", c.out_dir);
  read(j, "format", c.format);
  read(j, "timing", c.timing);
  if (j.contains("adversary")) {
    const Json& a = j.at("adversary");
    check_keys(a, {"strategy", "alpha", "budget", "delta_t", "k_t", "delta_a", "k_a", "uncapped"}, "adversary");
    if (a.contains("strategy")) c.adversary.strategy = parse_adversary_kind(a.at("strategy").get<std::string>());
    if (a.contains("budget")) c.adversary.budget = parse_budget_mode(a.at("budget").get<std::string>());
    read(a, "alpha", c.adversary.alpha);
    read(a, "delta_t", c.adversary.delta_t);
    read(a, "k_t", c.adversary.k_t);
    read(a, "delta_a", c.adversary.delta_a);
    read(a, "k_a", c.adversary.k_a);
    read(a, "uncapped", c.adversary.uncapped);
  }
  if (j.contains("solver")) {
    const Json& s = j.at("solver");
    check_keys(s, {"eps", "K", "L", "mu", "delta_t", "delta_a", "strict_preconditions"}, "solver");
    read(s, "eps", c.solver.eps);
    read(s, "K", c.solver.K);
    read(s, "L", c.solver.L);
    read(s, "mu", c.solver.mu);
    read(s, "delta_t", c.solver.delta_t);
    read(s, "delta_a", c.solver.delta_a);
    read(s, "strict_preconditions", c.solver.strict_preconditions);
  }
  return c;
}

}  // namespace

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig c;
  try {
    c = parse_config(j);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

void write_edges(std::ostream& out, std::size_t n, std::span<const Edge> edges) {
  std::vector<Edge> sorted(edges.begin(), edges.end());
  std::sort(sorted.begin(), sorted.end());
  out << n << ' ' << sorted.size() << '\n';
  for (const Edge& e : sorted) out << e.u << ' ' << e.v << '\n';
}

void write_cycle(std::ostream& out, std::span<const Vertex> cycle) {
  for (Vertex v : cycle) out << v << '\n';
}

}  // namespace hamres

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "hamres/error.hpp"
#include "hamres/experiment.hpp"
#include "hamres/serialize.hpp"

using namespace hamres;

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::size_t> n;
  std::optional<std::size_t> m;
  std::optional<double> m_coeff;
  std::vector<double> coeffs;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> adversary;
  std::optional<double> alpha;
  std::optional<std::string> budget;
  bool uncapped = false;
  std::optional<std::size_t> workers;
  std::optional<std::string> out;
  std::optional<std::string> format;
  bool timing = false;
  bool no_strict = false;
  bool assert_rate = false;
  double min_rate = 0.9;
  std::string rate_key = "success";
  // replay
  std::string kind;
  std::size_t index = 0;
  double coeff = 0;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_path, "JSON config file; flags override its fields");
  app->add_option("--n", f.n, "number of vertices");
  app->add_option("--m", f.m, "number of edges");
  app->add_option("--m-coeff", f.m_coeff, "m = ceil(coeff * n ln n)");
  app->add_option("--trials", f.trials, "number of trials");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--adversary", f.adversary, "random, bipartition or targeted")
      ->check(CLI::IsMember({"random", "bipartition", "targeted"}));
  app->add_option("--alpha", f.alpha, "per-vertex deletion fraction");
  app->add_option("--budget", f.budget, "simple or refined")->check(CLI::IsMember({"simple", "refined"}));
  app->add_flag("--uncapped", f.uncapped, "bipartition adversary deletes every internal edge");
  app->add_option("--workers", f.workers, "worker threads");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app->add_flag("--timing", f.timing, "record per-trial runtime");
  app->add_flag("--no-strict", f.no_strict, "keep going when a runtime property check fails");
  app->add_flag("--assert", f.assert_rate, "exit 3 when the rate falls below --min-rate");
  app->add_option("--min-rate", f.min_rate, "threshold for --assert");
  app->add_option("--rate", f.rate_key, "summary rate checked by --assert");
}

ExperimentConfig build_config(const Flags& f, std::optional<ExperimentKind> kind) {
  ExperimentConfig c;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw ConfigError("cannot open config file " + f.config_path);
    Json j;
    try {
      in >> j;
    } catch (const Json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    c = config_from_json(j);
  }
  if (kind) c.kind = *kind;
  if (!f.kind.empty()) c.kind = parse_experiment_kind(f.kind);
  if (f.n) c.n = *f.n;
  if (f.m) {
    c.m = f.m;
    c.m_coeff.reset();
  }
  if (f.m_coeff) {
    c.m_coeff = f.m_coeff;
    c.m.reset();
  }
  if (!f.coeffs.empty()) c.sweep_coeffs = f.coeffs;
  if (f.trials) c.trials = *f.trials;
  if (f.seed) c.seed = *f.seed;
  if (f.adversary) c.adversary.strategy = parse_adversary_kind(*f.adversary);
  if (f.alpha) c.adversary.alpha = *f.alpha;
  if (f.budget) c.adversary.budget = *f.budget == "simple" ? BudgetMode::simple : BudgetMode::refined;
  if (f.uncapped) c.adversary.uncapped = true;
  if (f.workers) c.workers = *f.workers;
  if (f.out) c.out_dir = *f.out;
  if (f.format) c.format = *f.format;
  if (f.timing) c.timing = true;
  if (f.no_strict) c.solver.strict_preconditions = false;
  c.validate();
  return c;
}

void print_summary(const RunResult& r) {
  Json j = r.summary;
  if (!r.sweep.empty()) j["sweep"] = r.sweep;
  std::cout << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resilience experiments on random graph processes"};
  app.require_subcommand(1);
  Flags f;
  struct Sub {
    const char* name;
    const char* help;
    std::optional<ExperimentKind> kind;
  };
  const Sub subs[] = {
      {"hitting", "hitting times m1, m2 with PM at m1 and HAM at m2", ExperimentKind::hitting},
      {"pm-res", "perfect matchings after adversarial deletion", ExperimentKind::pm_resilience},
      {"ham-res", "Hamilton cycles of the 2-core after adversarial deletion", ExperimentKind::ham_resilience},
      {"sweep", "rates across m = coeff * n ln n", ExperimentKind::sweep},
      {"classify", "tiny/atypical classification and scatter checks", ExperimentKind::classify},
      {"replay", "re-run one trial", std::nullopt},
  };
  std::vector<std::pair<CLI::App*, const Sub*>> apps;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, f);
    if (std::string(s.name) == "sweep") sub->add_option("--coeffs", f.coeffs, "m coefficients")->delimiter(',');
    if (std::string(s.name) == "replay") {
      sub->add_option("--kind", f.kind, "experiment kind")->check(
          CLI::IsMember({"hitting", "pm-res", "ham-res", "sweep", "classify"}));
      sub->add_option("--index", f.index, "trial index");
      sub->add_option("--coeff", f.coeff, "sweep coefficient");
    }
    apps.emplace_back(sub, &s);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (const auto& [sub, s] : apps) {
      if (!sub->parsed()) continue;
      ExperimentConfig c = build_config(f, s->kind);
      if (!s->kind) {
        TrialRecord r = replay_trial(c, f.index, f.coeff);
        Json j = r;
        if (c.timing) j["runtime_ms"] = r.runtime_ms;
        std::cout << j.dump(2) << '\n';
        return 0;
      }
      RunResult r = run_experiment(c);
      write_outputs(c, r);
      if (c.kind == ExperimentKind::classify && !c.out_dir.empty()) {
        ClassifyDetail d = classify_instance(c, 0);
        std::ofstream(std::filesystem::path(c.out_dir) / "classification.json")
            << Json{{"classification", d.cls}, {"scatter", d.scatter}}.dump(2) << '\n';
      }
      print_summary(r);
      if (f.assert_rate) {
        auto it = r.summary.rates.find(f.rate_key);
        if (it == r.summary.rates.end()) throw ConfigError("no rate named '" + f.rate_key + "'");
        if (it->second.rate < f.min_rate) {
          std::cerr << "rate " << f.rate_key << " = " << it->second.rate << " below " << f.min_rate << '\n';
          return 3;
        }
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

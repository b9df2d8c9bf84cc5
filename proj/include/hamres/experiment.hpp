#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hamres/adversary.hpp"
#include "hamres/structure.hpp"

namespace hamres {

enum class ExperimentKind { hitting, pm_resilience, ham_resilience, sweep, classify };
enum class AdversaryKind { random, bipartition, targeted };

const char* to_string(ExperimentKind k);
const char* to_string(AdversaryKind k);
ExperimentKind parse_experiment_kind(const std::string& s);
AdversaryKind parse_adversary_kind(const std::string& s);

struct AdversarySpec {
  AdversaryKind strategy = AdversaryKind::random;
  double alpha = 0;
  BudgetMode budget = BudgetMode::simple;
  double delta_t = 0.2;
  std::size_t k_t = 2;
  double delta_a = 0.6;
  std::size_t k_a = 4;
  // Bipartition only: delete every internal edge, ignoring the budget.
  bool uncapped = false;
};

struct SolverSpec {
  double eps = 0.1;
  std::size_t K = 4;
  std::size_t L = 2;
  double mu = 0.25;
  // Classification thresholds used by the solvers.
  double delta_t = 0.2;
  double delta_a = 0.6;
  bool strict_preconditions = true;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::hitting;
  std::size_t n = 1000;
  std::optional<std::size_t> m;
  std::optional<double> m_coeff;       // m = ceil(coeff * n ln n)
  std::vector<double> sweep_coeffs;    // sweep only
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  AdversarySpec adversary;
  SolverSpec solver;
  std::size_t workers = 1;
  std::string out_dir;
  std::string format = "csv";
  bool timing = false;

  // Throws ConfigError.
  void validate() const;
  // Explicit m, else the coefficient formula; none means "use a hitting time".
  std::optional<std::size_t> resolve_m() const;
};

std::size_t m_from_coeff(std::size_t n, double coeff);

struct TrialRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  double coeff = 0;  // sweep rows
  std::optional<std::size_t> m1;
  std::optional<std::size_t> m2;
  std::size_t vertices = 0;  // after isolated-vertex removal or 2-core
  std::size_t edges_deleted = 0;
  double max_fraction = 0;
  bool success = false;
  std::string stage;  // "ok" or where/why it stopped
  std::optional<bool> pm;
  std::optional<bool> ham;
  std::optional<bool> cherry;
  std::optional<bool> oracle;  // exact-oracle verdict when computed
  std::string solver;          // which procedure produced the verified object
  std::size_t e_prime = 0;
  std::optional<bool> unbalanced;      // bipartition adversary
  std::optional<bool> parity_certified;
  std::optional<bool> witness_valid;
  double runtime_ms = 0;
};

struct RateEstimate {
  std::size_t successes = 0;
  std::size_t trials = 0;
  double rate = 0;
  double lo = 0;  // Wilson 95% interval
  double hi = 0;
};

RateEstimate wilson(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

struct Summary {
  ExperimentKind kind = ExperimentKind::hitting;
  std::size_t n = 0;
  std::optional<std::size_t> m;
  std::size_t trials = 0;
  std::map<std::string, RateEstimate> rates;
  std::map<std::string, double> metrics;
};

struct SweepRow {
  double coeff = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t trials = 0;
  RateEstimate pm;
  RateEstimate ham;
  RateEstimate cherry;
  double core_size_mean = 0;
};

struct RunResult {
  std::vector<TrialRecord> records;
  Summary summary;
  std::vector<SweepRow> sweep;  // sweep only
};

// Single trials; (config, index) determines the record.
TrialRecord hitting_trial(const ExperimentConfig& c, std::size_t index);
TrialRecord pm_resilience_trial(const ExperimentConfig& c, std::size_t index);
TrialRecord ham_resilience_trial(const ExperimentConfig& c, std::size_t index);
TrialRecord sweep_trial(const ExperimentConfig& c, double coeff, std::size_t index);
TrialRecord classify_trial(const ExperimentConfig& c, std::size_t index);

RunResult run_hitting(const ExperimentConfig& c);
RunResult run_pm_resilience(const ExperimentConfig& c);
RunResult run_ham_resilience(const ExperimentConfig& c);
RunResult run_sweep(const ExperimentConfig& c);
RunResult run_classify(const ExperimentConfig& c);
RunResult run_experiment(const ExperimentConfig& c);

// Classification and scatter report of the instance behind classify_trial.
struct ClassifyDetail {
  Classification cls;
  ScatterReport scatter;
};
ClassifyDetail classify_instance(const ExperimentConfig& c, std::size_t index);

// Re-runs one trial of the experiment.
TrialRecord replay_trial(const ExperimentConfig& c, std::size_t index, double coeff = 0);

// Runs fn(i) for i in [0, count) on `workers` threads; results land in index
// order.
std::vector<TrialRecord> run_pool(std::size_t count, std::size_t workers,
                                  const std::function<TrialRecord(std::size_t)>& fn);

// CSV column order of trials.csv.
const std::vector<std::string>& trial_columns();
std::string trial_csv_row(const TrialRecord& r, bool timing);
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Writes trials.csv (or trials.json), summary.json and, for sweeps,
// sweep.csv into out_dir.
void write_outputs(const ExperimentConfig& c, const RunResult& r);

}  // namespace hamres

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hamres/error.hpp"
#include "hamres/experiment.hpp"
#include "hamres/serialize.hpp"

using namespace hamres;

namespace {

ExperimentConfig small(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.n = 200;
  c.trials = 6;
  c.seed = 5;
  return c;
}

std::string csv_of(const RunResult& r) {
  std::string out;
  for (const auto& rec : r.records) out += trial_csv_row(rec, false) + "\n";
  return out;
}

}  // namespace

TEST(Config, MFromCoefficient) {
  EXPECT_EQ(m_from_coeff(2000, 0.35), std::size_t(std::ceil(0.35 * 2000 * std::log(2000.0))));
  EXPECT_EQ(m_from_coeff(100, 0.0), 0u);
}

TEST(Config, ValidationErrors) {
  ExperimentConfig c;
  c.n = 2;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.m = 10;
  c.m_coeff = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.adversary.alpha = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.kind = ExperimentKind::sweep;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.m = 10'000'000;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(parse_experiment_kind("nope"), ConfigError);
  EXPECT_THROW(parse_adversary_kind("nope"), ConfigError);
}

TEST(Config, JsonRoundTripAndStrictKeys) {
  ExperimentConfig c = small(ExperimentKind::ham_resilience);
  c.m_coeff = 1.0;
  c.adversary.alpha = 0.3;
  c.adversary.strategy = AdversaryKind::targeted;
  Json j = c;
  ExperimentConfig back = config_from_json(j);
  EXPECT_EQ(Json(back), j);
  EXPECT_THROW(config_from_json(Json{{"bogus", 1}}), ConfigError);
  EXPECT_THROW(config_from_json(Json{{"n", "many"}}), ConfigError);
  EXPECT_THROW(config_from_json(Json{{"adversary", {{"alpha", 2.0}}}}), ConfigError);
}

TEST(Wilson, MatchesQuadraticRoots) {
  // The Wilson bounds solve (phat - p)^2 = z^2 p (1 - p) / n.
  const double z = 1.959963984540054;
  for (auto [k, n] : {std::pair{8, 10}, {0, 20}, {50, 50}, {37, 100}}) {
    const double ph = double(k) / n, a = 1 + z * z / n, b = -(2 * ph + z * z / n), cc = ph * ph;
    const double disc = std::sqrt(b * b - 4 * a * cc);
    auto r = wilson(k, n);
    EXPECT_NEAR(r.lo, std::max(0.0, (-b - disc) / (2 * a)), 1e-12);
    EXPECT_NEAR(r.hi, std::min(1.0, (-b + disc) / (2 * a)), 1e-12);
    EXPECT_DOUBLE_EQ(r.rate, ph);
  }
}

TEST(Hitting, TriangleIsForced) {
  ExperimentConfig c = small(ExperimentKind::hitting);
  c.n = 3;
  auto r = run_hitting(c);
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.m1, 2u);
    EXPECT_EQ(rec.m2, 3u);
    EXPECT_EQ(rec.ham, true);
  }
}

TEST(Harness, DeterministicAcrossWorkerCounts) {
  for (auto kind : {ExperimentKind::hitting, ExperimentKind::pm_resilience, ExperimentKind::ham_resilience}) {
    ExperimentConfig c = small(kind);
    if (kind != ExperimentKind::hitting) c.m_coeff = 0.6;
    c.adversary.alpha = 0.3;
    auto one = run_experiment(c);
    c.workers = 3;
    auto three = run_experiment(c);
    EXPECT_EQ(csv_of(one), csv_of(three));
    // Replaying a single index reproduces its row.
    EXPECT_EQ(trial_csv_row(replay_trial(c, 4), false), trial_csv_row(one.records[4], false));
  }
}

TEST(PmResilience, ZeroAlphaIsPlainRate) {
  ExperimentConfig c = small(ExperimentKind::pm_resilience);
  c.m_coeff = 0.5;
  auto r = run_pm_resilience(c);
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.edges_deleted, 0u);
    EXPECT_EQ(rec.success, rec.oracle.value_or(false));
  }
}

TEST(HamResilience, SmallInstancesAgreeWithOracle) {
  ExperimentConfig c = small(ExperimentKind::ham_resilience);
  c.n = 12;
  c.trials = 60;
  c.m_coeff = 1.0;
  c.adversary.alpha = 0.3;
  auto r = run_ham_resilience(c);
  for (const auto& rec : r.records) {
    ASSERT_TRUE(rec.oracle.has_value());
    if (rec.success) EXPECT_TRUE(*rec.oracle);
  }
}

TEST(Sweep, ZeroAndDuplicateCoefficients) {
  ExperimentConfig c = small(ExperimentKind::sweep);
  c.sweep_coeffs = {0.0, 0.3, 0.3};
  auto r = run_sweep(c);
  ASSERT_EQ(r.sweep.size(), 3u);
  EXPECT_EQ(r.sweep[0].pm.successes, 0u);
  EXPECT_EQ(r.sweep[0].ham.successes, 0u);
  EXPECT_EQ(Json(r.sweep[1]).dump(), Json(r.sweep[2]).dump());
  std::istringstream lines(sweep_csv(r.sweep));
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header.rfind("coeff,n,", 0), 0u);
}

TEST(Outputs, WritesFiles) {
  auto dir = std::filesystem::temp_directory_path() / "hamres_test_outputs";
  std::filesystem::remove_all(dir);
  ExperimentConfig c = small(ExperimentKind::hitting);
  c.trials = 2;
  c.out_dir = dir.string();
  auto r = run_experiment(c);
  write_outputs(c, r);
  std::ifstream csv(dir / "trials.csv");
  std::string header;
  std::getline(csv, header);
  std::string want;
  for (const auto& col : trial_columns()) want += (want.empty() ? "" : ",") + col;
  EXPECT_EQ(header, want);
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.json"));
  std::filesystem::remove_all(dir);
}

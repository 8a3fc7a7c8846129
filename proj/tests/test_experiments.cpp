#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "mssr/errors.hpp"
#include "mssr/experiments.hpp"
#include "support.hpp"

using namespace mssr;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig c;
  c.specs = {SystemSpec(2, 4), SystemSpec(1, 3)};
  c.sizes = {{10, 10}};
  c.replications = 200;
  c.seed = 17;
  return c;
}

std::string csv_of(const std::vector<McRow>& rows) {
  std::ostringstream os;
  write_rows_csv(os, rows);
  return os.str();
}

// Runs `body` with MSSR_THREADS set, restoring the previous value.
template <class F>
auto with_threads(const char* value, F&& body) {
  const char* old = std::getenv("MSSR_THREADS");
  const std::string saved = old ? old : "";
  setenv("MSSR_THREADS", value, 1);
  auto out = body();
  if (old) setenv("MSSR_THREADS", saved.c_str(), 1);
  else unsetenv("MSSR_THREADS");
  return out;
}

}  // namespace

TEST(ExtractUpperRecords, Examples) {
  const std::vector<double> raw{3, 1, 4, 1, 5, 9, 2, 6};
  EXPECT_EQ(extract_upper_records(raw).values(), (std::vector<double>{3, 4, 5, 9}));
  EXPECT_EQ(extract_upper_records(fixtures::kData1).values(), fixtures::records1().values());
  EXPECT_EQ(extract_upper_records(fixtures::kData2).values(), fixtures::records2().values());
  // ties are not new records
  EXPECT_EQ(extract_upper_records(std::vector<double>{2, 2, 3}).values(), (std::vector<double>{2, 3}));
  EXPECT_THROW(extract_upper_records(std::vector<double>{5, 4, 3}), InsufficientRecords);
  EXPECT_THROW(extract_upper_records(std::vector<double>{}), InsufficientRecords);
  EXPECT_THROW(extract_upper_records(std::vector<double>{1.0}), DomainError);
}

TEST(ScenarioConfig, Validation) {
  ScenarioConfig c;
  EXPECT_NO_THROW(c.validate());
  c.estimators = {"umvue"};
  EXPECT_THROW(c.validate(), DomainError);
  c.theta_known = true;
  EXPECT_NO_THROW(c.validate());
  c.intervals = {"boot_p"};
  c.theta_known = false;
  c.estimators = {"mle"};
  EXPECT_THROW(c.validate(), DomainError);
  c = ScenarioConfig{};
  c.estimators = {"mle", "posterior_mode"};
  EXPECT_THROW(c.validate(), DomainError);
  c = ScenarioConfig{};
  c.replications = 0;
  EXPECT_THROW(c.validate(), DomainError);
  c = ScenarioConfig{};
  c.sizes = {{1, 5}};
  EXPECT_THROW(c.validate(), DomainError);
  c = ScenarioConfig{};
  c.linex_cs = {0.0};
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(EstimatorSets, NamesExpand) {
  ScenarioConfig c;
  c.estimators = {"mle", "lindley_linex"};
  c.linex_cs = {-1.0, 1.0, 1.5};
  const auto pe = point_estimators(c);
  ASSERT_EQ(pe.size(), 4u);
  EXPECT_EQ(pe[1].name, "lindley_linex(c=-1)");
  EXPECT_EQ(pe[3].name, "lindley_linex(c=1.5)");
  c.intervals = {"asymptotic", "hpd"};
  c.levels = {0.9, 0.95};
  const auto ie = interval_estimators(c);
  ASSERT_EQ(ie.size(), 4u);
  EXPECT_EQ(ie[1].name, "asymptotic");
  EXPECT_DOUBLE_EQ(ie[1].level, 0.95);
}

TEST(RunPointStudy, IdentityEstimatorHasZeroError) {
  const ScenarioConfig c = small_config();
  const std::vector<PointEstimator> truth{{"truth", [&](ReplicationContext& ctx, const SystemSpec& sp) {
                                             return r_sk(ctx.config().alpha1, ctx.config().alpha2, sp);
                                           }}};
  for (const McRow& row : run_point_study(c, truth)) {
    EXPECT_EQ(row.mse, 0.0);
    EXPECT_EQ(row.ae, row.true_r);
    EXPECT_EQ(row.used, 200u);
    EXPECT_TRUE(std::isnan(row.cp));
  }
}

TEST(RunPointStudy, FailuresAreCountedAndExcluded) {
  const ScenarioConfig c = small_config();
  const std::vector<PointEstimator> flaky{{"flaky", [](ReplicationContext& ctx, const SystemSpec&) -> double {
                                             if (ctx.r().last() > 100.0) throw NumericalError("boom");
                                             return 0.5;
                                           }}};
  const auto rows = run_point_study(c, flaky);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_GT(rows[0].failures, 0u);
  EXPECT_EQ(rows[0].used + rows[0].failures, 200u);
  EXPECT_NEAR(rows[0].ae, 0.5, 1e-14);
}

TEST(RunCoverageStudy, UnitIntervalAlwaysCovers) {
  const ScenarioConfig c = small_config();
  const std::vector<IntervalEstimator> all{
      {"all", 0.95, [](ReplicationContext&, const SystemSpec&) {
         return make_interval(-0.5, 1.5, 0.95, IntervalMethod::asymptotic);
       }}};
  for (const McRow& row : run_coverage_study(c, all)) {
    EXPECT_EQ(row.cp, 1.0);
    EXPECT_DOUBLE_EQ(row.al, 2.0);
    EXPECT_DOUBLE_EQ(row.al_clamped, 1.0);
    EXPECT_TRUE(std::isnan(row.mse));
  }
}

TEST(RunPointStudy, SingleReplication) {
  ScenarioConfig c = small_config();
  c.replications = 1;
  c.estimators = {"mle"};
  const auto rows = run_point_study(c);
  ReplicationContext ctx = make_replication(c, 0, {10, 10});
  const double v = mle_r_sk(ctx.fit(), c.specs[0]);
  EXPECT_EQ(rows[0].ae, v);
  EXPECT_DOUBLE_EQ(rows[0].mse, (v - rows[0].true_r) * (v - rows[0].true_r));
}

TEST(RunPointStudy, SeedDeterminism) {
  ScenarioConfig c = small_config();
  c.estimators = {"mle", "lindley_sel"};
  const std::string a = csv_of(run_point_study(c));
  EXPECT_EQ(a, csv_of(run_point_study(c)));
  c.seed = 18;
  EXPECT_NE(a, csv_of(run_point_study(c)));
}

TEST(RunPointStudy, ThreadCountDoesNotChangeResults) {
  ScenarioConfig c = small_config();
  c.estimators = {"mle", "mcmc_sel"};
  c.mcmc_T = 600;
  c.mcmc_burn_in = 100;
  c.replications = 40;
  const auto serial = with_threads("1", [&] { return csv_of(run_point_study(c)); });
  const auto parallel = with_threads("4", [&] { return csv_of(run_point_study(c)); });
  EXPECT_EQ(serial, parallel);
  EXPECT_EQ(with_threads("3", [] { return worker_threads(); }), 3u);
}

TEST(RunPointStudy, ReplicationDependsOnlyOnItsIndex) {
  ScenarioConfig c = small_config();
  ScenarioConfig bigger = c;
  bigger.replications = 500;
  bigger.sizes = {{10, 10}, {20, 20}};
  EXPECT_EQ(make_replication(c, 7, {10, 10}).r().values(), make_replication(bigger, 7, {10, 10}).r().values());
  EXPECT_NE(make_replication(c, 7, {10, 10}).r().values(), make_replication(c, 7, {10, 11}).r().values());
}

TEST(RunPointStudy, MleErrorShrinksWithSampleSize) {
  ScenarioConfig c = small_config();
  c.specs = {SystemSpec(2, 4)};
  c.sizes = {{10, 10}, {20, 20}, {40, 40}};
  c.replications = 1000;
  const auto rows = run_point_study(c);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_LT(rows[1].mse, rows[0].mse);
  EXPECT_LT(rows[2].mse, rows[1].mse);
}

TEST(RunCoverageStudy, AsymptoticCoverageNearNominalForLargeSamples) {
  ScenarioConfig c = small_config();
  c.specs = {SystemSpec(2, 4)};
  c.sizes = {{200, 200}};
  c.replications = 2000;
  c.estimators = {};
  c.intervals = {"asymptotic"};
  const auto rows = run_coverage_study(c);
  const double se = std::sqrt(0.95 * 0.05 / 2000);
  EXPECT_NEAR(rows[0].cp, 0.95, 4 * se);
}

TEST(SolveAlpha2, InvertsReliability) {
  for (SystemSpec sp : {SystemSpec(1, 3), SystemSpec(2, 4), SystemSpec(4, 6)})
    for (double a1 : {0.5, 2.0})
      for (double target : {0.1, 0.5, 0.9}) {
        const double a2 = solve_alpha2(a1, sp, target);
        EXPECT_NEAR(r_sk(a1, a2, sp), target, 1e-12);
      }
  // 1-out-of-1: R = a2/(a1 + a2)
  EXPECT_NEAR(solve_alpha2(2.0, SystemSpec(1, 1), 0.8), 8.0, 1e-10);
  EXPECT_THROW(solve_alpha2(2.0, SystemSpec(1, 1), 1.0), DomainError);
  EXPECT_THROW(solve_alpha2(2.0, SystemSpec(1, 1), 1.0 - 1e-14), NumericalError);
}

TEST(BiasSweep, MleBiasSmallAtModerateSizes) {
  ScenarioConfig c = small_config();
  c.specs = {SystemSpec(2, 4)};
  c.sizes = {{30, 30}};
  c.replications = 400;
  const std::vector<double> grid{0.2, 0.5, 0.8};
  const BiasSweep sw = bias_sweep(c, grid);
  ASSERT_EQ(sw.rows.size(), 3u);
  EXPECT_FALSE(sw.parameterization.empty());
  for (const BiasRow& b : sw.rows) {
    EXPECT_NEAR(r_sk(b.alpha1, b.alpha2, SystemSpec(2, 4)), b.target_r, 1e-12);
    EXPECT_LT(std::abs(b.bias), 0.02) << b.target_r;
  }
}

TEST(Serialization, McRowJsonRoundTrip) {
  ScenarioConfig c = small_config();
  c.replications = 20;
  c.intervals = {"asymptotic"};
  auto rows = run_point_study(c);
  const auto cov = run_coverage_study(c);
  rows.insert(rows.end(), cov.begin(), cov.end());
  const nlohmann::json j = rows_json(rows);
  const auto back = nlohmann::json::parse(j.dump()).get<std::vector<McRow>>();
  ASSERT_EQ(back.size(), rows.size());
  // NaN compares unequal, so compare through the CSV form
  EXPECT_EQ(csv_of(back), csv_of(rows));
  EXPECT_TRUE(j[0]["cp"].is_null());
  EXPECT_EQ(j[0]["ae"].get<double>(), rows[0].ae);
}

TEST(Serialization, CsvAndJsonCarrySameNumbers) {
  ScenarioConfig c = small_config();
  c.replications = 20;
  const auto rows = run_point_study(c);
  std::istringstream in(csv_of(rows));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "estimator,kind,n,m,s,k,true_r,ae,mse,cp,al,al_clamped,level,used,failures");
  for (const McRow& row : rows) {
    std::getline(in, line);
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string x; std::getline(ls, x, ',');) f.push_back(x);
    ASSERT_EQ(f.size(), 15u);
    EXPECT_EQ(std::stod(f[7]), row.ae);
    EXPECT_EQ(std::stod(f[8]), row.mse);
  }
}

TEST(RealDataPipeline, ReproducesFitAndIsDeterministic) {
  RealDataConfig cfg;
  cfg.mcmc.seed = 3;
  cfg.mcmc.T = 3000;
  cfg.mcmc.burn_in = 500;
  cfg.linex_cs = {1.0, -1.0};
  const PriorConfig prior({3, 3, 3}, {1.5, 1.5, 1.5});
  const auto rep = real_data_pipeline(fixtures::kData1, fixtures::kData2, SystemSpec(2, 4), prior, cfg);
  EXPECT_EQ(rep.theta_hat, 0.4);
  EXPECT_NEAR(rep.alpha1_hat, 4.0 / std::log(215.10 / 0.4), 1e-14);
  EXPECT_NEAR(rep.alpha2_hat, 4.0 / std::log(2.38 / 0.4), 1e-14);
  EXPECT_NEAR(rep.lindley_sel, 0.8633120160892036, 1e-12);
  EXPECT_EQ(rep.lindley_linex.count("1"), 1u);
  EXPECT_EQ(rep.lindley_linex.count("-1"), 1u);
  EXPECT_LT(rep.mcmc_linex.at("1"), rep.mcmc_sel);
  EXPECT_LE(rep.hpd_lower, rep.hpd_upper);
  const auto again = real_data_pipeline(fixtures::kData1, fixtures::kData2, SystemSpec(2, 4), prior, cfg);
  EXPECT_EQ(rep, again);
  const auto back = nlohmann::json::parse(nlohmann::json(rep).dump()).get<RealDataReport>();
  EXPECT_EQ(back, rep);
}

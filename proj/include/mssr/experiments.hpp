#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mssr/bootstrap.hpp"
#include "mssr/lindley.hpp"
#include "mssr/mcmc.hpp"

namespace mssr {

using SizePair = std::pair<std::size_t, std::size_t>;

/// One Monte Carlo scenario. Estimator names:
///   point:    mle, umvue, lindley_sel, lindley_linex, mcmc_sel, mcmc_linex
///   interval: asymptotic, boot_normal, boot_p, boot_t, hpd
/// LINEX estimators expand over linex_cs, intervals over levels.
struct ScenarioConfig {
  double alpha1 = 2.0;
  double alpha2 = 4.0;
  double theta = 1.0;
  std::vector<SystemSpec> specs{SystemSpec(2, 4)};
  std::vector<SizePair> sizes{{20, 20}};
  std::size_t replications = 1000;
  std::vector<std::string> estimators{"mle"};
  std::vector<std::string> intervals{};
  PriorConfig prior{};
  std::vector<double> linex_cs{1.0};
  std::vector<double> levels{0.95};
  std::uint64_t seed = 1;
  bool theta_known = false;
  std::size_t mcmc_T = 11000;
  std::size_t mcmc_burn_in = 1000;
  std::size_t bootstrap_B = 2000;
  std::vector<double> r_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

  /// Throws DomainError on inconsistent settings.
  void validate() const;
};

/// Everything an estimator may need for one replication. Expensive shared
/// pieces (posterior chain, bootstrap shapes) are computed on first use and
/// reused for every system evaluated on the same data.
class ReplicationContext {
 public:
  ReplicationContext(const ScenarioConfig& cfg, RecordSample r, RecordSample s,
                     std::uint64_t aux_seed);

  const ScenarioConfig& config() const { return *cfg_; }
  const RecordSample& r() const { return r_; }
  const RecordSample& s() const { return s_; }
  /// Known-theta or unknown-theta MLE according to the scenario.
  const MleFit& fit() const { return fit_; }
  double theta_used() const { return fit_.theta; }

  /// Chain from the appropriate sampler, scored for `spec`.
  PosteriorChain chain(const SystemSpec& spec);
  BootstrapSample bootstrap(const SystemSpec& spec);

 private:
  const ScenarioConfig* cfg_;
  RecordSample r_;
  RecordSample s_;
  MleFit fit_;
  std::uint64_t aux_seed_;
  std::optional<PosteriorChain> chain_;
  std::optional<std::vector<ShapePair>> boot_pairs_;
};

using PointFn = std::function<double(ReplicationContext&, const SystemSpec&)>;
using IntervalFn = std::function<IntervalEstimate(ReplicationContext&, const SystemSpec&)>;

struct PointEstimator {
  std::string name;
  PointFn fn;
};

struct IntervalEstimator {
  std::string name;
  double level;
  IntervalFn fn;
};

/// One (estimator, size, system) cell. Point cells fill ae/mse, interval cells
/// fill cp/al; the other pair is NaN. al is the mean unclamped width,
/// al_clamped the mean width after clamping to [0,1].
struct McRow {
  std::string estimator;
  std::string kind;  // "point" or "interval"
  std::size_t n = 0;
  std::size_t m = 0;
  int s = 0;
  int k = 0;
  double true_r = 0.0;
  double ae = 0.0;
  double mse = 0.0;
  double cp = 0.0;
  double al = 0.0;
  double al_clamped = 0.0;
  double level = 0.0;
  std::size_t used = 0;
  std::size_t failures = 0;

  friend bool operator==(const McRow&, const McRow&) = default;
};

std::vector<PointEstimator> point_estimators(const ScenarioConfig& cfg);
std::vector<IntervalEstimator> interval_estimators(const ScenarioConfig& cfg);

/// Upper records of a raw sequence in arrival order.
/// Throws InsufficientRecords when fewer than two are found.
RecordSample extract_upper_records(std::span<const double> raw);

/// Records for replication `rep` at size (n, m); depends only on
/// (seed, rep, n, m).
ReplicationContext make_replication(const ScenarioConfig& cfg, std::size_t rep, SizePair size);

std::vector<McRow> run_point_study(const ScenarioConfig& cfg);
std::vector<McRow> run_point_study(const ScenarioConfig& cfg,
                                   const std::vector<PointEstimator>& estimators);
std::vector<McRow> run_coverage_study(const ScenarioConfig& cfg);
std::vector<McRow> run_coverage_study(const ScenarioConfig& cfg,
                                      const std::vector<IntervalEstimator>& estimators);

/// alpha2 with r_sk(alpha1, alpha2, spec) = target, by bisection on
/// log(alpha2) over [1e-6, 1e6]. Throws NumericalError if not bracketed.
double solve_alpha2(double alpha1, const SystemSpec& spec, double target);

struct BiasRow {
  double target_r = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  std::string estimator;
  std::size_t n = 0;
  std::size_t m = 0;
  int s = 0;
  int k = 0;
  double bias = 0.0;
  std::size_t failures = 0;
};

struct BiasSweep {
  std::string parameterization;  // how the grid was mapped to shapes
  std::vector<BiasRow> rows;
};

BiasSweep bias_sweep(const ScenarioConfig& cfg, std::span<const double> r_grid);

struct RealDataConfig {
  McmcConfig mcmc{};
  std::vector<double> linex_cs{1.0};
  double level = 0.95;
  /// Reference fits for the goodness-of-fit checks of the two raw datasets.
  ParetoParams ks_fit_1{0.3, 0.8};
  ParetoParams ks_fit_2{1.4, 0.8};
};

struct RealDataReport {
  std::vector<double> records_r;
  std::vector<double> records_s;
  double theta_hat = 0.0;
  double alpha1_hat = 0.0;
  double alpha2_hat = 0.0;
  int s = 0;
  int k = 0;
  double r_mle = 0.0;
  double ks_pareto_1 = 0.0;
  double ks_pareto_2 = 0.0;
  double ks_lomax_1 = 0.0;
  double ks_lomax_2 = 0.0;
  double lindley_sel = 0.0;
  std::map<std::string, double> lindley_linex;  // keyed by c
  std::map<std::string, std::string> lindley_errors;
  double mcmc_sel = 0.0;
  std::map<std::string, double> mcmc_linex;
  double hpd_lower = 0.0;
  double hpd_upper = 0.0;
  double hpd_level = 0.0;
  double acceptance_rate = 0.0;
  std::string mcmc_warning;
  std::uint64_t seed = 0;

  friend bool operator==(const RealDataReport&, const RealDataReport&) = default;
};

RealDataReport real_data_pipeline(std::span<const double> data1, std::span<const double> data2,
                                  const SystemSpec& spec, const PriorConfig& prior,
                                  const RealDataConfig& cfg);

void to_json(nlohmann::json& j, const RealDataReport& r);
void from_json(const nlohmann::json& j, RealDataReport& r);
void to_json(nlohmann::json& j, const McRow& r);
void from_json(const nlohmann::json& j, McRow& r);

/// Key used in LINEX maps and estimator names, e.g. "1", "-1", "1.5".
std::string format_c(double c);

void write_rows_csv(std::ostream& os, const std::vector<McRow>& rows);
nlohmann::json rows_json(const std::vector<McRow>& rows);
void write_bias_csv(std::ostream& os, const BiasSweep& sweep);
nlohmann::json bias_json(const BiasSweep& sweep);

/// Worker count: MSSR_THREADS if set and positive, else hardware concurrency.
unsigned worker_threads();

}  // namespace mssr

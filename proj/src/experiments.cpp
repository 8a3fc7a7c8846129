#include "mssr/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "mssr/errors.hpp"

namespace mssr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string>& point_names() {
  static const std::vector<std::string> v{"mle",      "umvue",    "lindley_sel", "lindley_linex",
                                          "mcmc_sel", "mcmc_linex"};
  return v;
}

const std::vector<std::string>& interval_names() {
  static const std::vector<std::string> v{"asymptotic", "boot_normal", "boot_p", "boot_t", "hpd"};
  return v;
}

bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

std::string fmt_double(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Runs body(i) for i in [0, n) on worker_threads() threads. The first
// exception thrown by any body is rethrown after all workers finish.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t nt = std::min<std::size_t>(worker_threads(), std::max<std::size_t>(n, 1));
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (std::size_t t = 0; t < nt; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
          next.store(n);
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace

unsigned worker_threads() {
  if (const char* env = std::getenv("MSSR_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string format_c(double c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", c);
  return buf;
}

void ScenarioConfig::validate() const {
  ParetoParams(alpha1, theta);
  ParetoParams(alpha2, theta);
  if (specs.empty()) throw DomainError("scenario needs at least one system spec");
  if (sizes.empty()) throw DomainError("scenario needs at least one sample size pair");
  for (const auto& [n, m] : sizes)
    if (n < 2 || m < 2) throw DomainError("sample sizes must be at least 2");
  if (replications < 1) throw DomainError("replications must be >= 1");
  for (const auto& e : estimators) {
    if (!contains(point_names(), e)) throw DomainError("unknown point estimator '" + e + "'");
    if (e == "umvue" && !theta_known) throw DomainError("umvue requires theta_known = true");
  }
  for (const auto& e : intervals) {
    if (!contains(interval_names(), e)) throw DomainError("unknown interval estimator '" + e + "'");
    if (e.rfind("boot", 0) == 0 && !theta_known)
      throw DomainError(e + " requires theta_known = true");
  }
  for (double c : linex_cs)
    if (c == 0.0 || !std::isfinite(c)) throw DomainError("LINEX c values must be nonzero");
  for (double l : levels)
    if (!(l > 0.0 && l < 1.0)) throw DomainError("levels must lie in (0,1)");
  McmcConfig mc;
  mc.T = mcmc_T;
  mc.burn_in = mcmc_burn_in;
  mc.validate();
  if (bootstrap_B < 2) throw DomainError("bootstrap_B must be >= 2");
  for (double r : r_grid)
    if (!(r > 0.0 && r < 1.0)) throw DomainError("r_grid values must lie in (0,1)");
}

ReplicationContext::ReplicationContext(const ScenarioConfig& cfg, RecordSample r, RecordSample s,
                                       std::uint64_t aux_seed)
    : cfg_(&cfg),
      r_(std::move(r)),
      s_(std::move(s)),
      fit_(cfg.theta_known ? mle_known_theta(r_, s_, cfg.theta) : mle_unknown_theta(r_, s_)),
      aux_seed_(aux_seed) {}

PosteriorChain ReplicationContext::chain(const SystemSpec& spec) {
  if (!chain_) {
    McmcConfig mc;
    mc.T = cfg_->mcmc_T;
    mc.burn_in = cfg_->mcmc_burn_in;
    mc.seed = splitmix64(aux_seed_ ^ 0x6d636d63ULL);
    chain_ = cfg_->theta_known ? gibbs_known_theta(r_, s_, cfg_->theta, cfg_->prior, spec, mc)
                               : mh_within_gibbs(r_, s_, cfg_->prior, spec, mc);
    return *chain_;
  }
  return rescore(*chain_, spec);
}

BootstrapSample ReplicationContext::bootstrap(const SystemSpec& spec) {
  if (!boot_pairs_)
    boot_pairs_ = boot_shape_pairs(fit_, cfg_->theta, cfg_->bootstrap_B,
                                   splitmix64(aux_seed_ ^ 0x626f6f74ULL));
  return boot_from_pairs(*boot_pairs_, fit_, spec);
}

std::vector<PointEstimator> point_estimators(const ScenarioConfig& cfg) {
  std::vector<PointEstimator> out;
  for (const auto& e : cfg.estimators) {
    if (e == "mle") {
      out.push_back({e, [](ReplicationContext& c, const SystemSpec& sp) { return mle_r_sk(c.fit(), sp); }});
    } else if (e == "umvue") {
      out.push_back({e, [](ReplicationContext& c, const SystemSpec& sp) {
                       return umvue_r_sk(c.r(), c.s(), c.theta_used(), sp);
                     }});
    } else if (e == "lindley_sel") {
      out.push_back({e, [](ReplicationContext& c, const SystemSpec& sp) {
                       return lindley_estimate(c.fit(), c.config().prior, sp, Loss::sel());
                     }});
    } else if (e == "mcmc_sel") {
      out.push_back({e, [](ReplicationContext& c, const SystemSpec& sp) { return point_sel(c.chain(sp)); }});
    } else if (e == "lindley_linex") {
      for (double cc : cfg.linex_cs)
        out.push_back({"lindley_linex(c=" + format_c(cc) + ")",
                       [cc](ReplicationContext& c, const SystemSpec& sp) {
                         return lindley_estimate(c.fit(), c.config().prior, sp, Loss::linex(cc));
                       }});
    } else if (e == "mcmc_linex") {
      for (double cc : cfg.linex_cs)
        out.push_back({"mcmc_linex(c=" + format_c(cc) + ")",
                       [cc](ReplicationContext& c, const SystemSpec& sp) {
                         return point_linex(c.chain(sp), cc);
                       }});
    } else {
      throw DomainError("unknown point estimator '" + e + "'");
    }
  }
  return out;
}

std::vector<IntervalEstimator> interval_estimators(const ScenarioConfig& cfg) {
  std::vector<IntervalEstimator> out;
  for (const auto& e : cfg.intervals)
    for (double level : cfg.levels) {
      const double beta = 1.0 - level;
      IntervalFn fn;
      if (e == "asymptotic")
        fn = [beta](ReplicationContext& c, const SystemSpec& sp) { return asymptotic_ci(c.fit(), sp, beta); };
      else if (e == "boot_normal")
        fn = [beta](ReplicationContext& c, const SystemSpec& sp) { return boot_normal_ci(c.bootstrap(sp), beta); };
      else if (e == "boot_p")
        fn = [beta](ReplicationContext& c, const SystemSpec& sp) {
          return boot_percentile_ci(c.bootstrap(sp), beta);
        };
      else if (e == "boot_t")
        fn = [beta](ReplicationContext& c, const SystemSpec& sp) { return boot_t_ci(c.bootstrap(sp), beta); };
      else if (e == "hpd")
        fn = [level](ReplicationContext& c, const SystemSpec& sp) { return hpd_interval(c.chain(sp), level); };
      else
        throw DomainError("unknown interval estimator '" + e + "'");
      out.push_back({e, level, std::move(fn)});
    }
  return out;
}

RecordSample extract_upper_records(std::span<const double> raw) {
  if (raw.empty()) throw InsufficientRecords("no observations to extract records from");
  std::vector<double> rec{raw.front()};
  for (double x : raw.subspan(1))
    if (x > rec.back()) rec.push_back(x);
  if (rec.size() < 2)
    throw InsufficientRecords("only " + std::to_string(rec.size()) + " upper record found");
  return RecordSample(std::move(rec));
}

ReplicationContext make_replication(const ScenarioConfig& cfg, std::size_t rep, SizePair size) {
  const std::uint64_t cell = (static_cast<std::uint64_t>(size.first) << 32) ^ size.second;
  Rng rng = make_stream(cfg.seed, rep, cell);
  RecordSample r = gen_records(ParetoParams(cfg.alpha1, cfg.theta), size.first, rng);
  RecordSample s = gen_records(ParetoParams(cfg.alpha2, cfg.theta), size.second, rng);
  const std::uint64_t aux = draw_seed(rng);
  return ReplicationContext(cfg, std::move(r), std::move(s), aux);
}

std::vector<McRow> run_point_study(const ScenarioConfig& cfg) {
  return run_point_study(cfg, point_estimators(cfg));
}

std::vector<McRow> run_point_study(const ScenarioConfig& cfg,
                                   const std::vector<PointEstimator>& estimators) {
  cfg.validate();
  const std::size_t ns = cfg.specs.size(), ne = estimators.size();
  const std::size_t ncell = ns * ne;
  std::vector<McRow> rows;
  for (const SizePair& size : cfg.sizes) {
    std::vector<double> vals(cfg.replications * ncell, kNaN);
    parallel_for(cfg.replications, [&](std::size_t rep) {
      ReplicationContext ctx = make_replication(cfg, rep, size);
      for (std::size_t si = 0; si < ns; ++si)
        for (std::size_t ei = 0; ei < ne; ++ei) {
          double v = kNaN;
          try {
            v = estimators[ei].fn(ctx, cfg.specs[si]);
          } catch (const Error&) {
          }
          vals[rep * ncell + si * ne + ei] = std::isfinite(v) ? v : kNaN;
        }
    });
    for (std::size_t si = 0; si < ns; ++si) {
      const SystemSpec& sp = cfg.specs[si];
      const double truth = r_sk(cfg.alpha1, cfg.alpha2, sp);
      for (std::size_t ei = 0; ei < ne; ++ei) {
        McRow row;
        row.estimator = estimators[ei].name;
        row.kind = "point";
        row.n = size.first;
        row.m = size.second;
        row.s = sp.s();
        row.k = sp.k();
        row.true_r = truth;
        row.cp = row.al = row.al_clamped = row.level = kNaN;
        double sum = 0.0, sq = 0.0;
        for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
          const double v = vals[rep * ncell + si * ne + ei];
          if (std::isnan(v)) {
            ++row.failures;
            continue;
          }
          ++row.used;
          sum += v - truth;
          sq += (v - truth) * (v - truth);
        }
        row.ae = row.used ? truth + sum / static_cast<double>(row.used) : kNaN;
        row.mse = row.used ? sq / static_cast<double>(row.used) : kNaN;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::vector<McRow> run_coverage_study(const ScenarioConfig& cfg) {
  return run_coverage_study(cfg, interval_estimators(cfg));
}

std::vector<McRow> run_coverage_study(const ScenarioConfig& cfg,
                                      const std::vector<IntervalEstimator>& estimators) {
  cfg.validate();
  const std::size_t ns = cfg.specs.size(), ne = estimators.size();
  const std::size_t ncell = ns * ne;
  std::vector<McRow> rows;
  for (const SizePair& size : cfg.sizes) {
    std::vector<std::optional<IntervalEstimate>> vals(cfg.replications * ncell);
    parallel_for(cfg.replications, [&](std::size_t rep) {
      ReplicationContext ctx = make_replication(cfg, rep, size);
      for (std::size_t si = 0; si < ns; ++si)
        for (std::size_t ei = 0; ei < ne; ++ei) {
          try {
            const IntervalEstimate iv = estimators[ei].fn(ctx, cfg.specs[si]);
            if (std::isfinite(iv.raw_lower) && std::isfinite(iv.raw_upper))
              vals[rep * ncell + si * ne + ei] = iv;
          } catch (const Error&) {
          }
        }
    });
    for (std::size_t si = 0; si < ns; ++si) {
      const SystemSpec& sp = cfg.specs[si];
      const double truth = r_sk(cfg.alpha1, cfg.alpha2, sp);
      for (std::size_t ei = 0; ei < ne; ++ei) {
        McRow row;
        row.estimator = estimators[ei].name;
        row.kind = "interval";
        row.n = size.first;
        row.m = size.second;
        row.s = sp.s();
        row.k = sp.k();
        row.true_r = truth;
        row.ae = row.mse = kNaN;
        row.level = estimators[ei].level;
        double hits = 0.0, len = 0.0, len_c = 0.0;
        for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
          const auto& iv = vals[rep * ncell + si * ne + ei];
          if (!iv) {
            ++row.failures;
            continue;
          }
          ++row.used;
          hits += iv->contains(truth) ? 1.0 : 0.0;
          len += iv->raw_width();
          len_c += iv->width();
        }
        const double u = static_cast<double>(row.used);
        row.cp = row.used ? hits / u : kNaN;
        row.al = row.used ? len / u : kNaN;
        row.al_clamped = row.used ? len_c / u : kNaN;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

double solve_alpha2(double alpha1, const SystemSpec& spec, double target) {
  if (!(target > 0.0 && target < 1.0)) throw DomainError("target reliability must lie in (0,1)");
  double lo = std::log(1e-6), hi = std::log(1e6);
  const double flo = r_sk(alpha1, std::exp(lo), spec) - target;
  const double fhi = r_sk(alpha1, std::exp(hi), spec) - target;
  if (flo > 0.0 || fhi < 0.0)
    throw NumericalError("target reliability not bracketed for alpha2 in [1e-6, 1e6]",
                         std::min(std::abs(flo), std::abs(fhi)));
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (r_sk(alpha1, std::exp(mid), spec) < target) lo = mid;
    else hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

BiasSweep bias_sweep(const ScenarioConfig& cfg, std::span<const double> r_grid) {
  BiasSweep out;
  out.parameterization =
      "alpha1 fixed at the scenario value; alpha2 solved so that R_{s;k}(alpha1, alpha2) equals "
      "each grid target";
  for (const SystemSpec& sp : cfg.specs)
    for (double target : r_grid) {
      ScenarioConfig sub = cfg;
      sub.alpha2 = solve_alpha2(cfg.alpha1, sp, target);
      sub.specs = {sp};
      for (const McRow& row : run_point_study(sub)) {
        BiasRow b;
        b.target_r = target;
        b.alpha1 = sub.alpha1;
        b.alpha2 = sub.alpha2;
        b.estimator = row.estimator;
        b.n = row.n;
        b.m = row.m;
        b.s = row.s;
        b.k = row.k;
        b.bias = row.ae - row.true_r;
        b.failures = row.failures;
        out.rows.push_back(std::move(b));
      }
    }
  return out;
}

RealDataReport real_data_pipeline(std::span<const double> data1, std::span<const double> data2,
                                  const SystemSpec& spec, const PriorConfig& prior,
                                  const RealDataConfig& cfg) {
  RealDataReport rep;
  const RecordSample r = extract_upper_records(data1);
  const RecordSample s = extract_upper_records(data2);
  rep.records_r = r.values();
  rep.records_s = s.values();
  const MleFit fit = mle_unknown_theta(r, s);
  rep.theta_hat = fit.theta;
  rep.alpha1_hat = fit.alpha1;
  rep.alpha2_hat = fit.alpha2;
  rep.s = spec.s();
  rep.k = spec.k();
  rep.r_mle = mle_r_sk(fit, spec);

  rep.ks_pareto_1 = ks_statistic(data1, cfg.ks_fit_1);
  rep.ks_pareto_2 = ks_statistic(data2, cfg.ks_fit_2);
  rep.ks_lomax_1 = ks_statistic(data1, [&](double x) { return lomax_cdf(x, cfg.ks_fit_1); });
  rep.ks_lomax_2 = ks_statistic(data2, [&](double x) { return lomax_cdf(x, cfg.ks_fit_2); });

  rep.lindley_sel = lindley_estimate(fit, prior, spec, Loss::sel());
  for (double c : cfg.linex_cs) {
    try {
      rep.lindley_linex[format_c(c)] = lindley_estimate(fit, prior, spec, Loss::linex(c));
    } catch (const ApproximationBreakdown& e) {
      rep.lindley_errors[format_c(c)] = e.what();
    }
  }

  const PosteriorChain chain = mh_within_gibbs(r, s, prior, spec, cfg.mcmc);
  rep.mcmc_sel = point_sel(chain);
  for (double c : cfg.linex_cs) rep.mcmc_linex[format_c(c)] = point_linex(chain, c);
  const IntervalEstimate hpd = hpd_interval(chain, cfg.level);
  rep.hpd_lower = hpd.lower;
  rep.hpd_upper = hpd.upper;
  rep.hpd_level = cfg.level;
  rep.acceptance_rate = chain.acceptance_rate;
  rep.mcmc_warning = chain.warning;
  rep.seed = cfg.mcmc.seed;
  return rep;
}

void to_json(nlohmann::json& j, const RealDataReport& r) {
  j = nlohmann::json{{"records_r", r.records_r},
                     {"records_s", r.records_s},
                     {"theta_hat", r.theta_hat},
                     {"alpha1_hat", r.alpha1_hat},
                     {"alpha2_hat", r.alpha2_hat},
                     {"s", r.s},
                     {"k", r.k},
                     {"r_mle", r.r_mle},
                     {"ks_pareto_1", r.ks_pareto_1},
                     {"ks_pareto_2", r.ks_pareto_2},
                     {"ks_lomax_1", r.ks_lomax_1},
                     {"ks_lomax_2", r.ks_lomax_2},
                     {"lindley_sel", r.lindley_sel},
                     {"lindley_linex", r.lindley_linex},
                     {"lindley_errors", r.lindley_errors},
                     {"mcmc_sel", r.mcmc_sel},
                     {"mcmc_linex", r.mcmc_linex},
                     {"hpd_lower", r.hpd_lower},
                     {"hpd_upper", r.hpd_upper},
                     {"hpd_level", r.hpd_level},
                     {"acceptance_rate", r.acceptance_rate},
                     {"mcmc_warning", r.mcmc_warning},
                     {"seed", r.seed}};
}

void from_json(const nlohmann::json& j, RealDataReport& r) {
  j.at("records_r").get_to(r.records_r);
  j.at("records_s").get_to(r.records_s);
  j.at("theta_hat").get_to(r.theta_hat);
  j.at("alpha1_hat").get_to(r.alpha1_hat);
  j.at("alpha2_hat").get_to(r.alpha2_hat);
  j.at("s").get_to(r.s);
  j.at("k").get_to(r.k);
  j.at("r_mle").get_to(r.r_mle);
  j.at("ks_pareto_1").get_to(r.ks_pareto_1);
  j.at("ks_pareto_2").get_to(r.ks_pareto_2);
  j.at("ks_lomax_1").get_to(r.ks_lomax_1);
  j.at("ks_lomax_2").get_to(r.ks_lomax_2);
  j.at("lindley_sel").get_to(r.lindley_sel);
  j.at("lindley_linex").get_to(r.lindley_linex);
  j.at("lindley_errors").get_to(r.lindley_errors);
  j.at("mcmc_sel").get_to(r.mcmc_sel);
  j.at("mcmc_linex").get_to(r.mcmc_linex);
  j.at("hpd_lower").get_to(r.hpd_lower);
  j.at("hpd_upper").get_to(r.hpd_upper);
  j.at("hpd_level").get_to(r.hpd_level);
  j.at("acceptance_rate").get_to(r.acceptance_rate);
  j.at("mcmc_warning").get_to(r.mcmc_warning);
  j.at("seed").get_to(r.seed);
}

namespace {

nlohmann::json num(double x) { return std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x); }
double num_from(const nlohmann::json& j) { return j.is_null() ? kNaN : j.get<double>(); }

}  // namespace

void to_json(nlohmann::json& j, const McRow& r) {
  j = nlohmann::json{{"estimator", r.estimator}, {"kind", r.kind},       {"n", r.n},
                     {"m", r.m},                 {"s", r.s},             {"k", r.k},
                     {"true_r", num(r.true_r)},  {"ae", num(r.ae)},      {"mse", num(r.mse)},
                     {"cp", num(r.cp)},          {"al", num(r.al)},      {"al_clamped", num(r.al_clamped)},
                     {"level", num(r.level)},    {"used", r.used},       {"failures", r.failures}};
}

void from_json(const nlohmann::json& j, McRow& r) {
  j.at("estimator").get_to(r.estimator);
  j.at("kind").get_to(r.kind);
  j.at("n").get_to(r.n);
  j.at("m").get_to(r.m);
  j.at("s").get_to(r.s);
  j.at("k").get_to(r.k);
  r.true_r = num_from(j.at("true_r"));
  r.ae = num_from(j.at("ae"));
  r.mse = num_from(j.at("mse"));
  r.cp = num_from(j.at("cp"));
  r.al = num_from(j.at("al"));
  r.al_clamped = num_from(j.at("al_clamped"));
  r.level = num_from(j.at("level"));
  j.at("used").get_to(r.used);
  j.at("failures").get_to(r.failures);
}

void write_rows_csv(std::ostream& os, const std::vector<McRow>& rows) {
  os << "estimator,kind,n,m,s,k,true_r,ae,mse,cp,al,al_clamped,level,used,failures\n";
  for (const auto& r : rows)
    os << r.estimator << ',' << r.kind << ',' << r.n << ',' << r.m << ',' << r.s << ',' << r.k << ','
       << fmt_double(r.true_r) << ',' << fmt_double(r.ae) << ',' << fmt_double(r.mse) << ','
       << fmt_double(r.cp) << ',' << fmt_double(r.al) << ',' << fmt_double(r.al_clamped) << ','
       << fmt_double(r.level) << ',' << r.used << ',' << r.failures << '\n';
}

nlohmann::json rows_json(const std::vector<McRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) j.push_back(r);
  return j;
}

void write_bias_csv(std::ostream& os, const BiasSweep& sweep) {
  os << "# " << sweep.parameterization << '\n';
  os << "target_r,alpha1,alpha2,estimator,n,m,s,k,bias,failures\n";
  for (const auto& b : sweep.rows)
    os << fmt_double(b.target_r) << ',' << fmt_double(b.alpha1) << ',' << fmt_double(b.alpha2) << ','
       << b.estimator << ',' << b.n << ',' << b.m << ',' << b.s << ',' << b.k << ','
       << fmt_double(b.bias) << ',' << b.failures << '\n';
}

nlohmann::json bias_json(const BiasSweep& sweep) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& b : sweep.rows)
    rows.push_back({{"target_r", b.target_r}, {"alpha1", b.alpha1},   {"alpha2", b.alpha2},
                    {"estimator", b.estimator}, {"n", b.n},           {"m", b.m},
                    {"s", b.s},                 {"k", b.k},           {"bias", num(b.bias)},
                    {"failures", b.failures}});
  return {{"parameterization", sweep.parameterization}, {"rows", rows}};
}

}  // namespace mssr

// mssr: command-line front end for the multicomponent stress-strength toolkit.
// Exit status: 0 success, 2 usage or validation error, 3 numerical failure.

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mssr/bootstrap.hpp"
#include "mssr/errors.hpp"
#include "mssr/experiments.hpp"
#include "mssr/lindley.hpp"
#include "mssr/mcmc.hpp"
#include "mssr/scenario_io.hpp"

using namespace mssr;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

// Breakdown times of insulating fluid at two voltage levels, used by
// `real-example` when no files are given.
const std::vector<double> kFluid1{0.40, 82.85, 9.88,   89.29, 215.10, 2.75,  0.79, 15.93,
                                  3.91, 0.27,  0.69,   100.58, 27.80, 13.95, 53.24};
const std::vector<double> kFluid2{0.47, 0.73, 1.40, 0.74, 0.39, 1.13, 0.09, 2.38};

std::string num(double x) {
  if (std::isnan(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string hex(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "0x%016" PRIx64, h);
  return buf;
}

json jnum(double x) { return std::isnan(x) ? json(nullptr) : json(x); }

struct Common {
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
  std::string output;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Random seed (drawn from entropy and echoed if omitted)");
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("-o,--output", c.output, "Output file (default stdout)");
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& s) {
  if (s) return *s;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

// Writes to the --output file or stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw DomainError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

RecordSample load_records(const std::string& path, bool extract) {
  const auto v = read_values(path);
  return extract ? extract_upper_records(v) : RecordSample(v);
}

std::vector<SystemSpec> parse_specs(const std::vector<std::string>& items) {
  std::vector<SystemSpec> out;
  for (const auto& s : items)
    for (const auto& sp : parse_spec_list(s)) out.push_back(sp);
  if (out.empty()) throw DomainError("at least one --spec is required");
  return out;
}

// ---- estimate / bootstrap ----------------------------------------------------

struct EstimateArgs {
  Common common;
  std::string file_r, file_s;
  bool extract = false;
  std::vector<std::string> specs;
  std::optional<double> theta;
  std::string prior = "1,1:1,1";
  std::vector<double> linex_cs{1.0};
  std::vector<double> levels{0.95};
  std::size_t mcmc_T = 11000;
  std::size_t mcmc_burn_in = 1000;
  std::size_t boot_B = 2000;
  std::string chain_out;
  std::string replicates_out;
};

struct ResultRow {
  std::string spec;
  std::string estimator;
  std::string kind;
  double value = NAN;
  double lower = NAN, upper = NAN, level = NAN;
};

struct Failure {
  std::string spec;
  std::string estimator;
  std::string message;
};

// Evaluates one estimator; numerical failures are recorded and reported
// together after the rest of the output.
template <class F>
void attempt(std::vector<Failure>& failures, const std::string& spec, const std::string& name, F&& f) {
  try {
    f();
  } catch (const DomainError&) {
    throw;
  } catch (const SupportError&) {
    throw;
  } catch (const Error& e) {
    failures.push_back({spec, name, e.what()});
  }
}

void emit(const Common& common, std::uint64_t seed, std::uint64_t hash, const json& header,
          const std::vector<ResultRow>& rows, const std::vector<Failure>& failures) {
  Sink sink(common.output);
  std::ostream& os = sink.os();
  if (common.format == "json") {
    json j = header;
    j["seed"] = seed;
    j["config_hash"] = hex(hash);
    j["results"] = json::array();
    for (const auto& r : rows)
      j["results"].push_back({{"spec", r.spec},       {"estimator", r.estimator}, {"kind", r.kind},
                              {"value", jnum(r.value)}, {"lower", jnum(r.lower)}, {"upper", jnum(r.upper)},
                              {"level", jnum(r.level)}});
    j["failures"] = json::array();
    for (const auto& f : failures)
      j["failures"].push_back({{"spec", f.spec}, {"estimator", f.estimator}, {"message", f.message}});
    os << j.dump(2) << '\n';
    return;
  }
  os << "# seed=" << seed << " config_hash=" << hex(hash) << '\n';
  for (auto it = header.begin(); it != header.end(); ++it) os << "# " << it.key() << '=' << it.value().dump() << '\n';
  os << "spec,estimator,kind,value,lower,upper,level\n";
  for (const auto& r : rows)
    os << '"' << r.spec << "\"," << r.estimator << ',' << r.kind << ',' << num(r.value) << ','
       << num(r.lower) << ',' << num(r.upper) << ',' << num(r.level) << '\n';
  for (const auto& f : failures) os << "# failed " << f.spec << ' ' << f.estimator << ": " << f.message << '\n';
}

std::string settings_text(const EstimateArgs& a, const char* cmd) {
  std::ostringstream os;
  os << cmd << '\n' << a.file_r << '\n' << a.file_s << '\n' << a.extract << '\n';
  for (const auto& s : a.specs) os << s << ';';
  os << '\n' << (a.theta ? num(*a.theta) : "unknown") << '\n' << a.prior << '\n';
  for (double c : a.linex_cs) os << num(c) << ',';
  os << '\n';
  for (double l : a.levels) os << num(l) << ',';
  os << '\n' << a.mcmc_T << ',' << a.mcmc_burn_in << ',' << a.boot_B << '\n';
  return os.str();
}

int run_estimate(const EstimateArgs& a) {
  const std::uint64_t seed = resolve_seed(a.common.seed);
  const std::uint64_t hash = fnv1a(settings_text(a, "estimate"));
  const RecordSample r = load_records(a.file_r, a.extract);
  const RecordSample s = load_records(a.file_s, a.extract);
  const auto specs = parse_specs(a.specs);
  const ParsedPrior pp = parse_prior(a.prior);
  if (a.theta && pp.has_theta_pair)
    std::cerr << "warning: theta is known; the third prior pair is ignored\n";
  for (double l : a.levels)
    if (!(l > 0.0 && l < 1.0)) throw DomainError("--level values must lie in (0,1)");
  for (double c : a.linex_cs)
    if (c == 0.0) throw DomainError("--linex-c values must be nonzero");

  const MleFit fit = a.theta ? mle_known_theta(r, s, *a.theta) : mle_unknown_theta(r, s);
  McmcConfig mc;
  mc.T = a.mcmc_T;
  mc.burn_in = a.mcmc_burn_in;
  mc.seed = splitmix64(seed ^ 0x6d636d63ULL);
  mc.validate();

  std::vector<ResultRow> rows;
  std::vector<Failure> failures;
  std::optional<PosteriorChain> chain;
  attempt(failures, "*", "mcmc", [&] {
    chain = a.theta ? gibbs_known_theta(r, s, *a.theta, pp.prior, specs.front(), mc)
                    : mh_within_gibbs(r, s, pp.prior, specs.front(), mc);
    if (!chain->warning.empty()) std::cerr << "warning: " << chain->warning << '\n';
  });
  std::optional<std::vector<ShapePair>> pairs;
  if (a.theta) attempt(failures, "*", "bootstrap", [&] {
      pairs = boot_shape_pairs(fit, *a.theta, a.boot_B, splitmix64(seed ^ 0x626f6f74ULL));
    });

  for (const SystemSpec& sp : specs) {
    const std::string tag = std::to_string(sp.s()) + "," + std::to_string(sp.k());
    auto point = [&](const std::string& name, auto f) {
      attempt(failures, tag, name, [&] { rows.push_back({tag, name, "point", f()}); });
    };
    auto interval = [&](const std::string& name, auto f) {
      attempt(failures, tag, name, [&] {
        const IntervalEstimate iv = f();
        rows.push_back({tag, name, "interval", NAN, iv.lower, iv.upper, iv.level});
      });
    };
    point("mle", [&] { return mle_r_sk(fit, sp); });
    if (a.theta) point("umvue", [&] { return umvue_r_sk(r, s, *a.theta, sp); });
    point("lindley_sel", [&] { return lindley_estimate(fit, pp.prior, sp, Loss::sel()); });
    for (double c : a.linex_cs)
      point("lindley_linex(c=" + format_c(c) + ")",
            [&] { return lindley_estimate(fit, pp.prior, sp, Loss::linex(c)); });
    std::optional<PosteriorChain> scored;
    if (chain) scored = rescore(*chain, sp);
    if (scored) {
      point("mcmc_sel", [&] { return point_sel(*scored); });
      for (double c : a.linex_cs)
        point("mcmc_linex(c=" + format_c(c) + ")", [&] { return point_linex(*scored, c); });
    }
    std::optional<BootstrapSample> bs;
    if (pairs) bs = boot_from_pairs(*pairs, fit, sp);
    for (double level : a.levels) {
      const double beta = 1.0 - level;
      interval("asymptotic", [&] { return asymptotic_ci(fit, sp, beta); });
      if (bs) {
        interval("boot_normal", [&] { return boot_normal_ci(*bs, beta); });
        interval("boot_p", [&] { return boot_percentile_ci(*bs, beta); });
        interval("boot_t", [&] { return boot_t_ci(*bs, beta); });
      }
      if (scored) interval("hpd", [&] { return hpd_interval(*scored, level); });
    }
  }
  if (chain && !a.chain_out.empty()) {
    std::ofstream out(a.chain_out);
    if (!out) throw DomainError("cannot open chain file '" + a.chain_out + "'");
    write_chain_csv(out, *chain);
  }

  const json header{{"theta_mode", a.theta ? "known" : "unknown"},
                    {"theta", fit.theta},
                    {"alpha1_hat", fit.alpha1},
                    {"alpha2_hat", fit.alpha2},
                    {"n", fit.n},
                    {"m", fit.m},
                    {"mcmc_acceptance", chain ? jnum(chain->acceptance_rate) : json(nullptr)}};
  emit(a.common, seed, hash, header, rows, failures);
  for (const auto& f : failures)
    std::cerr << "error: " << f.estimator << " (spec " << f.spec << "): " << f.message << '\n';
  return failures.empty() ? 0 : kExitNumerical;
}

int run_bootstrap(const EstimateArgs& a) {
  const std::uint64_t seed = resolve_seed(a.common.seed);
  const std::uint64_t hash = fnv1a(settings_text(a, "bootstrap"));
  if (!a.theta) throw DomainError("bootstrap intervals need --theta (known-theta mode)");
  const RecordSample r = load_records(a.file_r, a.extract);
  const RecordSample s = load_records(a.file_s, a.extract);
  const auto specs = parse_specs(a.specs);
  const MleFit fit = mle_known_theta(r, s, *a.theta);
  const auto pairs = boot_shape_pairs(fit, *a.theta, a.boot_B, seed);

  std::vector<ResultRow> rows;
  std::vector<Failure> failures;
  std::ofstream dump;
  if (!a.replicates_out.empty()) {
    dump.open(a.replicates_out);
    if (!dump) throw DomainError("cannot open replicate file '" + a.replicates_out + "'");
    dump << "spec,b,r\n";
  }
  for (const SystemSpec& sp : specs) {
    const std::string tag = std::to_string(sp.s()) + "," + std::to_string(sp.k());
    const BootstrapSample bs = boot_from_pairs(pairs, fit, sp);
    rows.push_back({tag, "mle", "point", bs.point});
    rows.push_back({tag, "boot_se", "point", bs.se_hat});
    if (dump.is_open())
      for (std::size_t b = 0; b < bs.estimates.size(); ++b)
        dump << '"' << tag << "\"," << b << ',' << num(bs.estimates[b]) << '\n';
    for (double level : a.levels) {
      const double beta = 1.0 - level;
      for (auto [name, fn] : {std::pair{"boot_normal", &boot_normal_ci}, {"boot_p", &boot_percentile_ci},
                              {"boot_t", &boot_t_ci}})
        attempt(failures, tag, name, [&, fn = fn, name = name] {
          const IntervalEstimate iv = fn(bs, beta);
          rows.push_back({tag, name, "interval", NAN, iv.lower, iv.upper, iv.level});
        });
    }
  }
  const json header{{"theta", *a.theta}, {"alpha1_hat", fit.alpha1}, {"alpha2_hat", fit.alpha2},
                    {"B", a.boot_B}};
  emit(a.common, seed, hash, header, rows, failures);
  for (const auto& f : failures)
    std::cerr << "error: " << f.estimator << " (spec " << f.spec << "): " << f.message << '\n';
  return failures.empty() ? 0 : kExitNumerical;
}

// ---- records -----------------------------------------------------------------

int run_records(const std::string& input, const Common& c) {
  const RecordSample rec = extract_upper_records(read_values(input));
  Sink sink(c.output);
  if (c.format == "json") {
    sink.os() << json{{"records", rec.values()}, {"count", rec.size()}}.dump(2) << '\n';
  } else {
    sink.os() << "index,value\n";
    for (std::size_t i = 0; i < rec.size(); ++i) sink.os() << i + 1 << ',' << num(rec.values()[i]) << '\n';
  }
  return 0;
}

// ---- simulate / coverage / bias-sweep ----------------------------------------

struct StudyArgs {
  Common common;
  std::string config;
  std::vector<std::string> sets;
  std::optional<unsigned> threads;
};

ScenarioConfig resolve_scenario(const StudyArgs& a) {
  ScenarioConfig cfg = a.config.empty() ? ScenarioConfig{} : load_scenario(a.config);
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw DomainError("--set expects key=value, got '" + kv + "'");
    apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (a.common.seed) cfg.seed = *a.common.seed;
  cfg.validate();
  if (a.threads) setenv("MSSR_THREADS", std::to_string(*a.threads).c_str(), 1);
  return cfg;
}

int run_study(const StudyArgs& a, const std::string& which) {
  const ScenarioConfig cfg = resolve_scenario(a);
  const std::string hash = hex(config_hash(cfg));
  Sink sink(a.common.output);
  std::ostream& os = sink.os();
  if (which == "bias-sweep") {
    const BiasSweep sw = bias_sweep(cfg, cfg.r_grid);
    if (a.common.format == "json") {
      json j = bias_json(sw);
      j["seed"] = cfg.seed;
      j["config_hash"] = hash;
      os << j.dump(2) << '\n';
    } else {
      os << "# seed=" << cfg.seed << " config_hash=" << hash << '\n';
      write_bias_csv(os, sw);
    }
    return 0;
  }
  const auto rows = which == "simulate" ? run_point_study(cfg) : run_coverage_study(cfg);
  if (a.common.format == "json") {
    os << json{{"seed", cfg.seed}, {"config_hash", hash}, {"rows", rows_json(rows)}}.dump(2) << '\n';
  } else {
    os << "# seed=" << cfg.seed << " config_hash=" << hash << '\n';
    write_rows_csv(os, rows);
  }
  for (const auto& r : rows)
    if (r.failures)
      std::cerr << "note: " << r.estimator << " failed in " << r.failures << " of " << cfg.replications
                << " replications at (n,m)=(" << r.n << ',' << r.m << "), spec " << r.s << ',' << r.k << '\n';
  return 0;
}

// ---- real-example ------------------------------------------------------------

struct RealArgs {
  Common common;
  std::string data1, data2;
  std::string spec = "2,4";
  std::string prior = "3,3,3:1.5,1.5,1.5";
  std::vector<double> linex_cs{1.0, 1.5};
  double level = 0.95;
  std::size_t mcmc_T = 11000;
  std::size_t mcmc_burn_in = 1000;
};

int run_real(const RealArgs& a) {
  const std::uint64_t seed = resolve_seed(a.common.seed);
  const auto d1 = a.data1.empty() ? kFluid1 : read_values(a.data1);
  const auto d2 = a.data2.empty() ? kFluid2 : read_values(a.data2);
  RealDataConfig cfg;
  cfg.mcmc.T = a.mcmc_T;
  cfg.mcmc.burn_in = a.mcmc_burn_in;
  cfg.mcmc.seed = seed;
  cfg.linex_cs = a.linex_cs;
  cfg.level = a.level;
  std::ostringstream st;
  st << "real-example\n" << a.data1 << '\n' << a.data2 << '\n' << a.spec << '\n' << a.prior << '\n';
  for (double c : a.linex_cs) st << num(c) << ',';
  st << '\n' << num(a.level) << '\n' << a.mcmc_T << ',' << a.mcmc_burn_in << '\n';
  const std::string hash = hex(fnv1a(st.str()));

  const RealDataReport rep = real_data_pipeline(d1, d2, parse_spec(a.spec), parse_prior(a.prior).prior, cfg);
  if (!rep.mcmc_warning.empty()) std::cerr << "warning: " << rep.mcmc_warning << '\n';
  Sink sink(a.common.output);
  std::ostream& os = sink.os();
  json j = rep;
  if (a.common.format == "json") {
    j["config_hash"] = hash;
    os << j.dump(2) << '\n';
  } else {
    os << "# seed=" << seed << " config_hash=" << hash << '\n' << "quantity,value\n";
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.value().is_object()) {
        for (auto jt = it.value().begin(); jt != it.value().end(); ++jt)
          os << it.key() << "(c=" << jt.key() << ")," << (jt.value().is_number() ? num(jt.value().get<double>())
                                                                                : jt.value().dump())
             << '\n';
      } else if (it.value().is_array()) {
        std::string joined;
        for (const auto& v : it.value()) joined += (joined.empty() ? "" : " ") + num(v.get<double>());
        os << it.key() << ",\"" << joined << "\"\n";
      } else if (it.value().is_string() && it.value().get<std::string>().empty()) {
        continue;
      } else if (it.value().is_number_float()) {
        os << it.key() << ',' << num(it.value().get<double>()) << '\n';
      } else {
        os << it.key() << ',' << it.value().dump() << '\n';
      }
    }
  }
  for (const auto& [c, msg] : rep.lindley_errors) std::cerr << "error: lindley_linex(c=" << c << "): " << msg << '\n';
  return rep.lindley_errors.empty() ? 0 : kExitNumerical;
}

void add_estimate_options(CLI::App* sub, EstimateArgs& a) {
  add_common(sub, a.common);
  sub->add_option("--records-r", a.file_r, "Strength records (one value per line)")->required();
  sub->add_option("--records-s", a.file_s, "Stress records (one value per line)")->required();
  sub->add_flag("--extract-records", a.extract, "Treat the files as raw sequences and extract upper records");
  sub->add_option("--spec", a.specs, "System as s,k (repeatable, or s,k;s,k)")->required();
  sub->add_option("--theta", a.theta, "Known common scale; omit to estimate it");
  sub->add_option("--level", a.levels, "Interval level(s)");
  sub->add_option("--bootstrap-B", a.boot_B, "Bootstrap replicates");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reliability of s-out-of-k systems from Pareto upper records"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "Point and interval estimates from two record files");
  add_estimate_options(c_est, est);
  c_est->add_option("--prior", est.prior, "Gamma prior a1,a2,a3:b1,b2,b3");
  c_est->add_option("--linex-c", est.linex_cs, "LINEX shape(s)");
  c_est->add_option("--mcmc-T", est.mcmc_T, "Total MCMC sweeps");
  c_est->add_option("--mcmc-burn-in", est.mcmc_burn_in, "Burn-in sweeps");
  c_est->add_option("--chain-out", est.chain_out, "Write the posterior chain as CSV");

  EstimateArgs boot;
  auto* c_boot = app.add_subcommand("bootstrap", "Parametric bootstrap intervals (theta known)");
  add_estimate_options(c_boot, boot);
  c_boot->add_option("--replicates-out", boot.replicates_out, "Write the bootstrap replicates as CSV");

  std::string rec_input;
  Common rec_common;
  auto* c_rec = app.add_subcommand("records", "Extract upper records from a raw sequence");
  c_rec->add_option("--input", rec_input, "Raw data file")->required();
  add_common(c_rec, rec_common);

  StudyArgs study;
  std::string study_name;
  for (const char* name : {"simulate", "coverage", "bias-sweep"}) {
    const char* help = std::string(name) == "simulate"   ? "Monte Carlo AE/MSE of point estimators"
                       : std::string(name) == "coverage" ? "Monte Carlo coverage and length of intervals"
                                                          : "Bias of point estimators over the r_grid targets";
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, study.common);
    sub->add_option("--config", study.config, "Scenario file (key = value lines)");
    sub->add_option("--set", study.sets, "Override one scenario setting, key=value (repeatable)");
    sub->add_option("--threads", study.threads, "Worker threads (default MSSR_THREADS or all cores)");
    sub->callback([&study_name, name] { study_name = name; });
  }

  RealArgs real;
  auto* c_real = app.add_subcommand("real-example", "Full analysis of the insulating-fluid data");
  add_common(c_real, real.common);
  c_real->add_option("--data1", real.data1, "Raw strength data (default: built-in set)");
  c_real->add_option("--data2", real.data2, "Raw stress data (default: built-in set)");
  c_real->add_option("--spec", real.spec, "System as s,k");
  c_real->add_option("--prior", real.prior, "Gamma prior a1,a2,a3:b1,b2,b3");
  c_real->add_option("--linex-c", real.linex_cs, "LINEX shape(s)");
  c_real->add_option("--level", real.level, "HPD level");
  c_real->add_option("--mcmc-T", real.mcmc_T, "Total MCMC sweeps");
  c_real->add_option("--mcmc-burn-in", real.mcmc_burn_in, "Burn-in sweeps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (c_est->parsed()) return run_estimate(est);
    if (c_boot->parsed()) return run_bootstrap(boot);
    if (c_rec->parsed()) return run_records(rec_input, rec_common);
    if (c_real->parsed()) return run_real(real);
    if (!study_name.empty()) return run_study(study, study_name);
  } catch (const SupportError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

// Acceptance checks. Prints one PASS/FAIL line per criterion, preceded by
// indented detail lines for each sub-check. Exit status is nonzero if any
// selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "mssr/bootstrap.hpp"
#include "mssr/errors.hpp"
#include "mssr/experiments.hpp"
#include "mssr/lindley.hpp"
#include "mssr/mcmc.hpp"

using namespace mssr;

namespace {

struct Report {
  bool ok = true;

  __attribute__((format(printf, 3, 4))) void check(bool pass, const char* fmt, ...) {
    std::printf("  [%s] ", pass ? "ok" : "MISS");
    va_list ap;
    va_start(ap, fmt);
    std::vprintf(fmt, ap);
    va_end(ap);
    std::printf("\n");
    ok = ok && pass;
  }
  void near(const char* what, double got, double want, double tol) {
    check(std::abs(got - want) <= tol, "%s = %.6f (target %.4f +/- %g)", what, got, want, tol);
  }
};

const std::vector<double> kData1{0.40, 82.85, 9.88,   89.29, 215.10, 2.75,  0.79, 15.93,
                                 3.91, 0.27,  0.69,   100.58, 27.80, 13.95, 53.24};
const std::vector<double> kData2{0.47, 0.73, 1.40, 0.74, 0.39, 1.13, 0.09, 2.38};

bool closed_form(Report& rep) {
  struct Case {
    double a1, a2;
    int s, k;
    double want;
  };
  const std::vector<Case> cases{
      {2, 4, 2, 4, 0.80},   {2, 4, 2, 5, 0.8571}, {2, 4, 2, 6, 0.8929}, {2, 4, 3, 4, 0.60},
      {2, 4, 3, 5, 0.7143}, {2, 4, 3, 6, 0.7857}, {1, 2, 1, 3, 0.90},   {1, 2, 2, 3, 0.70},
      {1, 2, 2, 5, 0.8571}, {1, 2, 3, 5, 0.7143}, {1, 2, 4, 5, 0.5238}, {1, 2, 2, 6, 0.8929},
      {1, 2, 3, 6, 0.7857}, {1, 2, 4, 6, 0.6429}};
  for (const auto& c : cases) {
    const double r = r_sk(c.a1, c.a2, SystemSpec(c.s, c.k));
    rep.check(std::abs(r - c.want) <= 1e-4, "R_{%d;%d}(%g,%g) = %.6f (target %.4f)", c.s, c.k,
              c.a1, c.a2, r, c.want);
  }
  return rep.ok;
}

bool oracle_equivalence(Report& rep) {
  const std::vector<double> shapes{0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 20.0};
  std::vector<SystemSpec> specs;
  for (int k = 1; k <= 10; ++k)
    for (int s = 1; s <= k; ++s) specs.emplace_back(s, k);
  for (int k : {15, 20, 25, 30})
    for (int s : {1, k / 2, k}) specs.emplace_back(s, k);
  double worst = 0.0;
  std::size_t count = 0;
  for (double a1 : shapes)
    for (double a2 : shapes)
      for (const auto& sp : specs) {
        worst = std::max(worst, std::abs(r_sk(a1, a2, sp) - r_sk_oracle(a1, a2, sp)));
        ++count;
      }
  rep.check(worst <= 1e-8, "max |r_sk - quadrature| = %.3g over %zu grid points", worst, count);
  return rep.ok;
}

bool real_data(Report& rep) {
  const SystemSpec sp(2, 4);
  const PriorConfig prior({3, 3, 3}, {1.5, 1.5, 1.5});
  RealDataConfig cfg;
  cfg.mcmc.T = 11000;
  cfg.mcmc.burn_in = 1000;
  cfg.mcmc.seed = 2024;
  cfg.linex_cs = {1.0, 1.5};
  const RealDataReport r = real_data_pipeline(kData1, kData2, sp, prior, cfg);
  rep.near("theta_hat", r.theta_hat, 0.4, 1e-12);
  rep.near("alpha1_hat", r.alpha1_hat, 0.64, 0.005);
  rep.near("alpha2_hat", r.alpha2_hat, 2.24, 0.005);
  rep.near("R_hat_{2;4}", r.r_mle, 0.9105, 0.001);
  std::printf("  [info] R_{2;4} at the rounded shapes (0.64, 2.24) = %.6f\n", r_sk(0.64, 2.24, sp));
  rep.near("Lindley SEL", r.lindley_sel, 0.9032, 0.002);
  if (r.lindley_linex.count("1")) rep.near("Lindley LINEX c=1", r.lindley_linex.at("1"), 0.9100, 0.002);
  else rep.check(false, "Lindley LINEX c=1 broke down");
  if (r.lindley_linex.count("1.5"))
    std::printf("  [info] Lindley LINEX c=1.5 = %.6f\n", r.lindley_linex.at("1.5"));
  rep.near("MCMC SEL", r.mcmc_sel, 0.8813, 0.02);
  rep.near("MCMC LINEX c=1", r.mcmc_linex.at("1"), 0.8832, 0.02);
  std::printf("  [info] MCMC LINEX c=1.5 = %.6f, theta acceptance %.3f\n", r.mcmc_linex.at("1.5"),
              r.acceptance_rate);
  rep.near("HPD lower", r.hpd_lower, 0.68, 0.03);
  rep.near("HPD upper", r.hpd_upper, 0.99, 0.03);
  return rep.ok;
}

McRow single_row(const std::vector<McRow>& rows, const std::string& name) {
  for (const auto& r : rows)
    if (r.estimator == name) return r;
  throw Error("missing row " + name);
}

bool table_cells(Report& rep) {
  {
    ScenarioConfig c;
    c.alpha1 = 2;
    c.alpha2 = 4;
    c.theta = 1.5;
    c.specs = {SystemSpec(2, 4)};
    c.sizes = {{20, 20}};
    c.replications = 1000;
    c.estimators = {"mle"};
    c.seed = 101;
    const McRow row = single_row(run_point_study(c), "mle");
    rep.near("MLE (20,20)/(2,4) AE", row.ae, 0.7970, 0.01);
    rep.near("MLE (20,20)/(2,4) MSE", row.mse, 0.0065, 0.002);
  }
  {
    ScenarioConfig c;
    c.alpha1 = 0.5;
    c.alpha2 = 2;
    c.theta = 1;
    c.theta_known = true;
    c.specs = {SystemSpec(3, 5)};
    c.sizes = {{15, 15}};
    c.replications = 1000;
    c.estimators = {"umvue"};
    c.seed = 102;
    const McRow row = single_row(run_point_study(c), "umvue");
    rep.near("UMVUE (15,15)/(3,5) AE", row.ae, 0.8822, 0.01);
    rep.near("UMVUE (15,15)/(3,5) MSE", row.mse, 0.0050, 0.002);
  }
  {
    ScenarioConfig c;
    c.alpha1 = 0.5;
    c.alpha2 = 2;
    c.theta = 1;
    c.theta_known = true;
    c.specs = {SystemSpec(2, 5)};
    c.sizes = {{20, 20}};
    c.replications = 1000;
    c.estimators = {};
    c.intervals = {"asymptotic", "boot_p"};
    c.levels = {0.95};
    c.bootstrap_B = 2000;
    c.seed = 103;
    const auto rows = run_coverage_study(c);
    const McRow asy = single_row(rows, "asymptotic");
    const McRow bp = single_row(rows, "boot_p");
    rep.near("asymptotic (20,20)/(2,5) CP", asy.cp, 0.891, 0.03);
    rep.near("asymptotic (20,20)/(2,5) AL", asy.al, 0.118, 0.01);
    rep.near("boot-p (20,20)/(2,5) CP", bp.cp, 0.949, 0.03);
    std::printf("  [info] boot-p AL = %.4f, failures asy %zu boot %zu\n", bp.al, asy.failures, bp.failures);
  }
  return rep.ok;
}

double central(const std::function<double(double)>& f, double x) {
  const double h = 1e-5 * std::max(1.0, std::abs(x));
  return (f(x + h) - f(x - h)) / (2 * h);
}

bool properties(Report& rep) {
  const std::vector<double> shapes{0.3, 0.5, 1, 2, 4, 7};
  const std::vector<SystemSpec> specs{SystemSpec(1, 3), SystemSpec(2, 4), SystemSpec(3, 6), SystemSpec(5, 8)};

  bool homog = true, mono = true, fd = true;
  double worst_fd = 0.0;
  for (double a1 : shapes)
    for (double a2 : shapes)
      for (const auto& sp : specs) {
        const double r = r_sk(a1, a2, sp);
        for (double c : {0.01, 3.7, 250.0})
          homog = homog && std::abs(r_sk(c * a1, c * a2, sp) - r) <= 1e-12;
        mono = mono && r_sk(a1 * 1.1, a2, sp) < r && r_sk(a1, a2 * 1.1, sp) > r;
        if (sp.s() > 1) mono = mono && r_sk(a1, a2, SystemSpec(sp.s() - 1, sp.k())) > r;
        const Gradient g = grad_r(a1, a2, sp);
        const Hessian H = hess_r(a1, a2, sp);
        auto rel = [](double got, double want, double scale) {
          return std::abs(got - want) / std::max(std::abs(want), scale);
        };
        const double scale = 1e-3 * std::abs(g.w1) + 1e-12;
        const double e1 = rel(g.w1, central([&](double x) { return r_sk(x, a2, sp); }, a1), scale);
        const double e2 = rel(g.w2, central([&](double x) { return r_sk(a1, x, sp); }, a2), scale);
        const double h11 = rel(H.w11, central([&](double x) { return grad_r(x, a2, sp).w1; }, a1), scale);
        const double h12 = rel(H.w12, central([&](double x) { return grad_r(a1, x, sp).w1; }, a2), scale);
        const double h22 = rel(H.w22, central([&](double x) { return grad_r(a1, x, sp).w2; }, a2), scale);
        worst_fd = std::max({worst_fd, e1, e2, h11, h12, h22});
      }
  fd = worst_fd <= 1e-5;
  rep.check(homog, "degree-0 homogeneity of r_sk");
  rep.check(mono, "r_sk decreasing in alpha1 and s, increasing in alpha2");
  rep.check(fd, "gradient/Hessian vs finite differences, worst relative error %.2g", worst_fd);

  {
    // UMVUE unbiasedness at (0.5, 2, 1), (3,5), n=m=15
    const SystemSpec sp(3, 5);
    const double truth = r_sk(0.5, 2.0, sp);
    double sum = 0.0, sq = 0.0;
    const int reps = 10000;
    for (int i = 0; i < reps; ++i) {
      Rng rng = make_stream(4040, i);
      const RecordSample r = gen_records(ParetoParams(0.5, 1.0), 15, rng);
      const RecordSample s = gen_records(ParetoParams(2.0, 1.0), 15, rng);
      const double v = umvue_r_sk(r, s, 1.0, sp);
      sum += v;
      sq += v * v;
    }
    const double mean = sum / reps;
    const double se = std::sqrt((sq / reps - mean * mean) / (reps - 1));
    rep.check(std::abs(mean - truth) <= 3 * se, "UMVUE mean %.5f vs R %.5f (3 SE = %.5f)", mean, truth, 3 * se);
  }

  const RecordSample r1({0.40, 82.85, 89.29, 215.10}), r2({0.47, 0.73, 1.40, 2.38});
  const PriorConfig prior({3, 3, 3}, {1.5, 1.5, 1.5});
  {
    bool order = true;
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
      McmcConfig mc;
      mc.seed = seed;
      const auto ch = mh_within_gibbs(r1, r2, prior, SystemSpec(2, 4), mc);
      const double sel = point_sel(ch);
      for (double c : {0.1, 0.5, 1.0, 1.5, 3.0}) order = order && point_linex(ch, c) <= sel;
    }
    rep.check(order, "MCMC LINEX <= SEL for c > 0 on 4 chains");
  }
  {
    bool minimal = true;
    Rng rng = make_stream(5050, 0);
    std::gamma_distribution<double> g(1.5, 1.0);
    for (int t = 0; t < 5; ++t) {
      std::vector<double> x(400);
      for (double& v : x) v = g(rng);
      const auto iv = hpd_interval(std::span<const double>(x), 0.95);
      std::sort(x.begin(), x.end());
      const std::size_t need = static_cast<std::size_t>(std::ceil(0.95 * 400 - 1e-9));
      double best = INFINITY;
      for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i; j < x.size(); ++j)
          if (j - i + 1 >= need) best = std::min(best, x[j] - x[i]);
      minimal = minimal && iv.raw_width() == best;
    }
    rep.check(minimal, "HPD width equals exhaustive minimum");
  }
  {
    McmcConfig mc;
    mc.seed = 6060;
    const double theta = 0.3;
    const auto ch = gibbs_known_theta(r1, r2, theta, prior, SystemSpec(2, 4), mc);
    const double sh = 7.0, rt1 = 1.5 + std::log(215.10 / theta), rt2 = 1.5 + std::log(2.38 / theta);
    double s1 = 0, s2 = 0, q1 = 0, q2 = 0;
    const double N = static_cast<double>(ch.draws.size());
    for (const auto& d : ch.draws) {
      s1 += d.alpha1;
      s2 += d.alpha2;
      q1 += d.alpha1 * d.alpha1;
      q2 += d.alpha2 * d.alpha2;
    }
    const double m1 = s1 / N, m2 = s2 / N;
    const double se1 = std::sqrt((q1 / N - m1 * m1) / N), se2 = std::sqrt((q2 / N - m2 * m2) / N);
    rep.check(std::abs(m1 - sh / rt1) <= 4 * se1 && std::abs(m2 - sh / rt2) <= 4 * se2,
              "Gibbs means %.5f, %.5f vs gamma %.5f, %.5f", m1, m2, sh / rt1, sh / rt2);
  }
  {
    ScenarioConfig c;
    c.specs = {SystemSpec(2, 4)};
    c.sizes = {{10, 10}};
    c.replications = 50;
    c.estimators = {"mle", "lindley_sel", "mcmc_sel"};
    c.mcmc_T = 1500;
    c.mcmc_burn_in = 500;
    c.seed = 7070;
    auto dump = [&] {
      std::string s;
      for (const auto& r : run_point_study(c)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%a,%a;", r.ae, r.mse);
        s += buf;
      }
      return s;
    };
    McmcConfig mc;
    mc.seed = 8;
    const auto a = mh_within_gibbs(r1, r2, prior, SystemSpec(2, 4), mc);
    const auto b = mh_within_gibbs(r1, r2, prior, SystemSpec(2, 4), mc);
    bool same = a.draws.size() == b.draws.size();
    for (std::size_t i = 0; same && i < a.draws.size(); ++i)
      same = a.draws[i].theta == b.draws[i].theta && a.draws[i].r == b.draws[i].r;
    rep.check(same && dump() == dump(), "bit-identical reruns for a fixed seed");
  }
  return rep.ok;
}

struct Criterion {
  int id;
  const char* title;
  bool (*run)(Report&);
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);

  const Criterion all[] = {
      {1, "closed-form reliability values", closed_form},
      {2, "product form matches quadrature oracle", oracle_equivalence},
      {3, "insulating-fluid reproduction", real_data},
      {4, "Monte Carlo anchor cells", table_cells},
      {5, "property suite", properties},
  };
  bool all_ok = true;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    Report rep;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = c.run(rep);
    } catch (const std::exception& e) {
      std::printf("  [MISS] exception: %s\n", e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", c.id, c.title, secs);
    std::fflush(stdout);
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}

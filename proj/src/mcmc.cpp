#include "mssr/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "mssr/errors.hpp"

namespace mssr {

void McmcConfig::validate() const {
  if (burn_in >= T) throw DomainError("burn-in must be shorter than the chain");
  if (thinning == 0) throw DomainError("thinning must be >= 1");
  if (!std::isfinite(proposal_sd)) throw DomainError("proposal sd must be finite");
}

std::vector<double> PosteriorChain::r_values() const {
  std::vector<double> v;
  v.reserve(draws.size());
  for (const auto& d : draws) v.push_back(d.r);
  return v;
}

double theta_log_kernel(double theta, double shape, double rate, double upper) {
  if (!(theta > 0.0 && theta < upper)) return -std::numeric_limits<double>::infinity();
  return (shape - 1.0) * std::log(theta) - rate * theta;
}

bool theta_mh_step(double& theta, double shape, double rate, double upper, double sd, Rng& rng) {
  std::normal_distribution<double> step(0.0, sd);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double prop = theta + step(rng);
  const double u = unif(rng);
  if (!(prop > 0.0 && prop < upper)) return false;
  const double log_ratio =
      theta_log_kernel(prop, shape, rate, upper) - theta_log_kernel(theta, shape, rate, upper);
  if (std::log(u) < log_ratio) {
    theta = prop;
    return true;
  }
  return false;
}

namespace {

void check_theta(const RecordSample& r, const RecordSample& s, double theta) {
  if (!(std::isfinite(theta) && theta > 0.0)) throw DomainError("theta must be positive");
  if (theta > std::min(r.first(), s.first()))
    throw SupportError("theta exceeds the smallest first record");
}

double gamma_draw(double shape, double rate, Rng& rng) {
  return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

bool keep(std::size_t t, const McmcConfig& cfg) {
  return t >= cfg.burn_in && (t - cfg.burn_in) % cfg.thinning == 0;
}

}  // namespace

PosteriorChain gibbs_known_theta(const RecordSample& r, const RecordSample& s, double theta,
                                 const PriorConfig& prior, const SystemSpec& spec,
                                 const McmcConfig& cfg) {
  cfg.validate();
  check_theta(r, s, theta);
  const double lt = std::log(theta);
  const double sh1 = static_cast<double>(r.size()) + prior.a[0];
  const double sh2 = static_cast<double>(s.size()) + prior.a[1];
  const double rt1 = prior.b[0] + r.log_last() - lt;
  const double rt2 = prior.b[1] + s.log_last() - lt;
  Rng rng = make_stream(cfg.seed, 0);
  PosteriorChain chain;
  chain.draws.reserve((cfg.T - cfg.burn_in) / cfg.thinning + 1);
  for (std::size_t t = 0; t < cfg.T; ++t) {
    const double a1 = gamma_draw(sh1, rt1, rng);
    const double a2 = gamma_draw(sh2, rt2, rng);
    if (keep(t, cfg)) chain.draws.push_back({a1, a2, theta, r_sk(a1, a2, spec)});
  }
  chain.acceptance_rate = 1.0;
  return chain;
}

PosteriorChain mh_within_gibbs(const RecordSample& r, const RecordSample& s,
                               const PriorConfig& prior, const SystemSpec& spec,
                               const McmcConfig& cfg) {
  cfg.validate();
  const double upper = std::min(r.first(), s.first());
  const MleFit start = mle_unknown_theta(r, s);
  double a1 = start.alpha1, a2 = start.alpha2;
  double theta = 0.99 * upper;
  double sd = cfg.proposal_sd > 0.0 ? cfg.proposal_sd : 0.1 * upper;
  const double n = static_cast<double>(r.size()), m = static_cast<double>(s.size());

  Rng rng = make_stream(cfg.seed, 0);
  PosteriorChain chain;
  chain.draws.reserve((cfg.T - cfg.burn_in) / cfg.thinning + 1);
  std::size_t window_acc = 0, window_len = 0, post_acc = 0, post_len = 0;
  for (std::size_t t = 0; t < cfg.T; ++t) {
    const bool acc = theta_mh_step(theta, a1 + a2 + prior.a[2], prior.b[2], upper, sd, rng);
    const double lt = std::log(theta);
    a1 = gamma_draw(n + prior.a[0], prior.b[0] + r.log_last() - lt, rng);
    a2 = gamma_draw(m + prior.a[1], prior.b[1] + s.log_last() - lt, rng);
    if (!(theta > 0.0 && theta < upper)) throw NumericalError("theta draw left its support");

    if (t < cfg.burn_in) {
      window_acc += acc;
      if (++window_len == 100) {
        if (cfg.adapt) {
          const double rate = static_cast<double>(window_acc) / 100.0;
          if (rate < 0.30) sd *= 0.8;
          else if (rate > 0.45) sd *= 1.2;
        }
        window_acc = window_len = 0;
      }
    } else {
      post_acc += acc;
      ++post_len;
    }
    if (keep(t, cfg)) chain.draws.push_back({a1, a2, theta, r_sk(a1, a2, spec)});
  }
  chain.acceptance_rate = static_cast<double>(post_acc) / static_cast<double>(post_len);
  chain.final_proposal_sd = sd;
  if (chain.acceptance_rate < 0.05 || chain.acceptance_rate > 0.95) {
    std::ostringstream os;
    os << "theta acceptance rate " << chain.acceptance_rate << " outside [0.05, 0.95]";
    chain.warning = os.str();
  }
  return chain;
}

PosteriorChain rescore(const PosteriorChain& chain, const SystemSpec& spec) {
  PosteriorChain out = chain;
  for (auto& d : out.draws) d.r = r_sk(d.alpha1, d.alpha2, spec);
  return out;
}

double point_sel(const PosteriorChain& chain) {
  if (chain.draws.empty()) throw DomainError("empty chain");
  double sum = 0.0;
  for (const auto& d : chain.draws) sum += d.r;
  return sum / static_cast<double>(chain.draws.size());
}

double point_linex(const PosteriorChain& chain, double c) {
  if (chain.draws.empty()) throw DomainError("empty chain");
  if (c == 0.0 || !std::isfinite(c)) throw DomainError("LINEX parameter c must be nonzero");
  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& d : chain.draws) mx = std::max(mx, -c * d.r);
  double sum = 0.0;
  for (const auto& d : chain.draws) sum += std::exp(-c * d.r - mx);
  const double log_mean = mx + std::log(sum / static_cast<double>(chain.draws.size()));
  return -log_mean / c;
}

IntervalEstimate hpd_interval(std::span<const double> draws, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("credible level must lie in (0,1)");
  if (draws.size() < 100) throw DomainError("HPD interval needs at least 100 draws");
  std::vector<double> x(draws.begin(), draws.end());
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  std::size_t w = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n) - 1e-9));
  w = std::clamp<std::size_t>(w, 1, n);
  std::size_t best = 0;
  double best_width = x[w - 1] - x[0];
  for (std::size_t j = 1; j + w <= n; ++j) {
    const double width = x[j + w - 1] - x[j];
    if (width < best_width) {
      best_width = width;
      best = j;
    }
  }
  return make_interval(x[best], x[best + w - 1], level, IntervalMethod::hpd);
}

IntervalEstimate hpd_interval(const PosteriorChain& chain, double level) {
  const auto r = chain.r_values();
  return hpd_interval(std::span<const double>(r), level);
}

void write_chain_csv(std::ostream& os, const PosteriorChain& chain) {
  os << "alpha1,alpha2,theta,r\n" << std::setprecision(17);
  for (const auto& d : chain.draws)
    os << d.alpha1 << ',' << d.alpha2 << ',' << d.theta << ',' << d.r << '\n';
}

}  // namespace mssr

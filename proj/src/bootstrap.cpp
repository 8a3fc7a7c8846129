#include "mssr/bootstrap.hpp"

#include <algorithm>
#include <cmath>

#include "mssr/errors.hpp"

namespace mssr {

std::vector<ShapePair> boot_shape_pairs(const MleFit& fit, double theta, std::size_t B,
                                        std::uint64_t seed) {
  if (B < 2) throw DomainError("bootstrap needs B >= 2");
  const ParetoParams p1(fit.alpha1, theta);
  const ParetoParams p2(fit.alpha2, theta);
  std::vector<ShapePair> out(B);
  for (std::size_t b = 0; b < B; ++b) {
    Rng rng = make_stream(seed, b);
    const RecordSample r = gen_records(p1, fit.n, rng);
    const RecordSample s = gen_records(p2, fit.m, rng);
    const MleFit f = mle_known_theta(r, s, theta);
    out[b] = {f.alpha1, f.alpha2};
  }
  return out;
}

BootstrapSample boot_from_pairs(std::span<const ShapePair> pairs, const MleFit& fit,
                                const SystemSpec& spec) {
  if (pairs.size() < 2) throw DomainError("bootstrap needs B >= 2");
  BootstrapSample bs;
  bs.point = mle_r_sk(fit, spec);
  bs.estimates.reserve(pairs.size());
  double sum = 0.0;
  for (const auto& p : pairs) {
    bs.estimates.push_back(r_sk(p.alpha1, p.alpha2, spec));
    sum += bs.estimates.back();
  }
  const double B = static_cast<double>(pairs.size());
  const double mean = sum / B;
  double ss = 0.0;
  for (double e : bs.estimates) ss += (e - mean) * (e - mean);
  const auto [lo, hi] = std::minmax_element(bs.estimates.begin(), bs.estimates.end());
  // identical resamples: keep the rounding residue of the mean out of se
  bs.se_hat = *lo == *hi ? 0.0 : std::sqrt(ss / (B - 1.0));
  return bs;
}

BootstrapSample boot_samples(const MleFit& fit, double theta, const SystemSpec& spec,
                             std::size_t B, std::uint64_t seed) {
  const auto pairs = boot_shape_pairs(fit, theta, B, seed);
  return boot_from_pairs(pairs, fit, spec);
}

double empirical_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw DomainError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level must lie in [0,1]");
  const double h = static_cast<double>(sorted.size() - 1) * q;  // 0-based
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

namespace {

void check_sample(const BootstrapSample& bs) {
  if (bs.estimates.size() < 2) throw DomainError("bootstrap needs B >= 2");
  if (!(bs.se_hat >= 0.0)) throw DomainError("bootstrap standard error must be nonnegative");
}

}  // namespace

IntervalEstimate boot_normal_ci(const BootstrapSample& bs, double beta) {
  check_beta(beta);
  check_sample(bs);
  const double half = normal_quantile(1.0 - beta / 2.0) * bs.se_hat;
  return make_interval(bs.point - half, bs.point + half, 1.0 - beta, IntervalMethod::boot_normal);
}

IntervalEstimate boot_percentile_ci(const BootstrapSample& bs, double beta) {
  check_beta(beta);
  check_sample(bs);
  std::vector<double> x = bs.estimates;
  std::sort(x.begin(), x.end());
  return make_interval(empirical_quantile(x, beta / 2.0), empirical_quantile(x, 1.0 - beta / 2.0),
                       1.0 - beta, IntervalMethod::boot_p);
}

IntervalEstimate boot_t_ci(const BootstrapSample& bs, double beta) {
  check_beta(beta);
  check_sample(bs);
  if (bs.estimates.size() < 50) throw DomainError("boot-t interval needs B >= 50");
  const auto [mn, mx] = std::minmax_element(bs.estimates.begin(), bs.estimates.end());
  if (!(bs.se_hat > 0.0) || *mn == *mx)
    throw NumericalError("boot-t interval undefined: bootstrap estimates are all equal");
  std::vector<double> t;
  t.reserve(bs.estimates.size());
  for (double e : bs.estimates) t.push_back((e - bs.point) / bs.se_hat);
  std::sort(t.begin(), t.end());
  const double lo = bs.point - empirical_quantile(t, 1.0 - beta / 2.0) * bs.se_hat;
  const double hi = bs.point - empirical_quantile(t, beta / 2.0) * bs.se_hat;
  return make_interval(lo, hi, 1.0 - beta, IntervalMethod::boot_t);
}

}  // namespace mssr

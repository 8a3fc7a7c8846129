#include "mssr/classical.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "mssr/errors.hpp"

namespace mssr {

std::string_view to_string(IntervalMethod m) {
  switch (m) {
    case IntervalMethod::asymptotic: return "asymptotic";
    case IntervalMethod::boot_normal: return "boot-normal";
    case IntervalMethod::boot_p: return "boot-p";
    case IntervalMethod::boot_t: return "boot-t";
    case IntervalMethod::hpd: return "hpd";
  }
  return "unknown";
}

IntervalEstimate make_interval(double lo, double hi, double level, IntervalMethod method) {
  if (!(lo <= hi)) throw NumericalError("interval endpoints out of order");
  return {std::clamp(lo, 0.0, 1.0), std::clamp(hi, 0.0, 1.0), lo, hi, level, method};
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal quantile level must lie in (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0,1)");
}

namespace {

MleFit fit_at(const RecordSample& r, const RecordSample& s, double theta, ThetaMode mode) {
  const double lt = std::log(theta);
  const double n = static_cast<double>(r.size());
  const double m = static_cast<double>(s.size());
  return {n / (r.log_last() - lt), m / (s.log_last() - lt), theta, r.size(), s.size(), mode};
}

}  // namespace

MleFit mle_unknown_theta(const RecordSample& r, const RecordSample& s) {
  return fit_at(r, s, std::min(r.first(), s.first()), ThetaMode::unknown);
}

MleFit mle_known_theta(const RecordSample& r, const RecordSample& s, double theta) {
  if (!(std::isfinite(theta) && theta > 0.0)) throw DomainError("theta must be positive");
  if (theta > std::min(r.first(), s.first()))
    throw SupportError("theta exceeds the smallest first record");
  return fit_at(r, s, theta, ThetaMode::known);
}

double mle_r_sk(const MleFit& fit, const SystemSpec& spec) {
  return r_sk(fit.alpha1, fit.alpha2, spec);
}

namespace {

void check_varphi_args(double u1, double u2, int d, std::size_t n, std::size_t m) {
  if (!(std::isfinite(u1) && u1 > 0.0) || !(std::isfinite(u2) && u2 > 0.0))
    throw DomainError("UMVUE needs positive log-record spans");
  if (d < 1) throw DomainError("UMVUE index d must be >= 1");
  if (n < 2 || m < 2) throw DomainError("UMVUE needs at least 2 records per sample");
}

}  // namespace

double umvue_varphi(double u1, double u2, int d, std::size_t n, std::size_t m) {
  check_varphi_args(u1, u2, d, n, m);
  // phi = P(X > cY), X ~ Beta(1, n-1), Y ~ Beta(1, m-1), c = d u2/u1.
  // Splitting 1 - cy (or 1 - t/c) into (1 - y) + y(1 - c) gives a binomial
  // expansion with positive terms only.
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  const double lc = std::log(d * u2 / u1);
  auto lbeta = [](double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); };
  auto lchoose = [](double a, double b) {
    return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
  };
  double sum = 0.0;
  if (lc < 0.0) {
    const double lq = std::log(-std::expm1(lc));  // ln(1 - c)
    for (std::size_t j = 0; j < n; ++j) {
      const double dj = static_cast<double>(j);
      const double pw = j == 0 ? 0.0 : dj * lq;
      sum += std::exp(lchoose(dn - 1.0, dj) + pw + lbeta(dj + 1.0, dn + dm - 2.0 - dj));
    }
    return (dm - 1.0) * sum;
  }
  const double lq = std::log(-std::expm1(-lc));  // ln(1 - 1/c)
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const double dj = static_cast<double>(j);
    const double pw = j == 0 ? 0.0 : dj * lq;
    sum += std::exp(lchoose(dm - 2.0, dj) + pw + lbeta(dj + 1.0, dn + dm - 2.0 - dj));
  }
  return (dm - 1.0) * std::exp(-lc) * sum;
}

double umvue_varphi_alternating(double u1, double u2, int d, std::size_t n, std::size_t m) {
  check_varphi_args(u1, u2, d, n, m);
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  const double base = std::lgamma(dm) + std::lgamma(dn);
  double sum = 0.0;
  if (u2 < u1 / d) {
    const double lc = std::log(d * u2 / u1);
    for (std::size_t z = 0; z < n; ++z) {
      const double dz = static_cast<double>(z);
      const double t = std::exp(base - std::lgamma(dm + dz) - std::lgamma(dn - dz) + dz * lc);
      sum += (z % 2 == 0) ? t : -t;
    }
  } else {
    const double lc = std::log(u1 / (d * u2));
    for (std::size_t z = 0; z + 1 < m; ++z) {
      const double dz = static_cast<double>(z);
      const double t =
          std::exp(base - std::lgamma(dn + dz + 1.0) - std::lgamma(dm - dz - 1.0) + (dz + 1.0) * lc);
      sum += (z % 2 == 0) ? t : -t;
    }
  }
  return sum;
}

double umvue_r_sk(const RecordSample& r, const RecordSample& s, double theta,
                  const SystemSpec& spec) {
  if (!(std::isfinite(theta) && theta > 0.0)) throw DomainError("theta must be positive");
  if (theta > std::min(r.first(), s.first()))
    throw SupportError("theta exceeds the smallest first record");
  const double lt = std::log(theta);
  const double u1 = r.log_last() - lt;
  const double u2 = s.log_last() - lt;
  const int k = spec.k();
  double sum = 0.0;
  for (int p = spec.s(); p <= k; ++p)
    for (int u = 0; u <= k - p; ++u) {
      const double c = static_cast<double>(binomial(k, p) * binomial(k - p, u));
      const double t = c * umvue_varphi(u1, u2, p + u, r.size(), s.size());
      sum += (u % 2 == 0) ? t : -t;
    }
  return sum;
}

double asymptotic_variance(const MleFit& fit, const SystemSpec& spec) {
  const Gradient g = grad_r(fit.alpha1, fit.alpha2, spec);
  const double a = g.w1 * fit.alpha1;
  const double b = g.w2 * fit.alpha2;
  return a * a / static_cast<double>(fit.n) + b * b / static_cast<double>(fit.m);
}

IntervalEstimate asymptotic_ci(const MleFit& fit, const SystemSpec& spec, double beta) {
  check_beta(beta);
  const double r = mle_r_sk(fit, spec);
  const double half = normal_quantile(1.0 - beta / 2.0) * std::sqrt(asymptotic_variance(fit, spec));
  return make_interval(r - half, r + half, 1.0 - beta, IntervalMethod::asymptotic);
}

}  // namespace mssr

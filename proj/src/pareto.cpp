#include "mssr/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mssr/errors.hpp"

namespace mssr {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

ParetoParams::ParetoParams(double alpha, double theta) : alpha_(alpha), theta_(theta) {
  if (!positive_finite(alpha)) throw DomainError("Pareto shape must be positive and finite");
  if (!positive_finite(theta)) throw DomainError("Pareto scale must be positive and finite");
}

RecordSample::RecordSample(std::vector<double> values, std::optional<ParetoParams> source)
    : values_(std::move(values)), source_(source) {
  if (values_.size() < 2) throw DomainError("a record sample needs at least 2 values");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!positive_finite(values_[i]))
      throw DomainError("record values must be positive and finite");
    if (i > 0 && !(values_[i] > values_[i - 1]))
      throw DomainError("record values must be strictly increasing (position " +
                        std::to_string(i) + ")");
  }
  if (source_ && values_.front() < source_->theta())
    throw SupportError("record below the support of its source distribution");
  logs_.reserve(values_.size());
  for (double v : values_) {
    logs_.push_back(std::log(v));
    sum_log_ += logs_.back();
  }
}

RecordSample RecordSample::scaled(double c) const {
  if (!positive_finite(c)) throw DomainError("scale factor must be positive");
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  std::optional<ParetoParams> src;
  if (source_) src.emplace(source_->alpha(), source_->theta() * c);
  return RecordSample(std::move(v), src);
}

double pdf(double x, const ParetoParams& p) {
  if (x < p.theta()) return 0.0;
  const double a = p.alpha();
  return a * std::exp(a * std::log(p.theta()) - (a + 1.0) * std::log(x));
}

double cdf(double x, const ParetoParams& p) {
  if (x <= p.theta()) return 0.0;
  // -expm1 keeps digits when x is just above theta
  return -std::expm1(-p.alpha() * std::log(x / p.theta()));
}

double quantile(double u, const ParetoParams& p) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile level must lie in (0,1)");
  return p.theta() * std::exp(-std::log1p(-u) / p.alpha());
}

double lomax_cdf(double x, const ParetoParams& p) {
  if (x <= 0.0) return 0.0;
  return -std::expm1(-p.alpha() * std::log1p(x / p.theta()));
}

RecordSample gen_records(const ParetoParams& p, std::size_t n, Rng& rng) {
  if (n < 2) throw DomainError("need at least 2 records");
  std::exponential_distribution<double> inc(p.alpha());
  std::vector<double> v(n);
  double g = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double gi, x;
    // an increment tiny enough to round away would break strict monotonicity
    do {
      gi = g + inc(rng);
      x = p.theta() * std::exp(gi);
    } while (i > 0 && !(x > prev));
    g = gi;
    v[i] = prev = x;
  }
  return RecordSample(std::move(v), p);
}

double log_likelihood(double a1, double a2, double theta, const RecordSample& r,
                      const RecordSample& s) {
  if (!positive_finite(a1) || !positive_finite(a2))
    throw DomainError("shape parameters must be positive");
  if (!positive_finite(theta)) throw DomainError("scale must be positive");
  if (theta > std::min(r.first(), s.first()))
    throw SupportError("theta exceeds the smallest first record");
  const double n = static_cast<double>(r.size());
  const double m = static_cast<double>(s.size());
  const double lt = std::log(theta);
  return n * std::log(a1) + m * std::log(a2) + (a1 + a2) * lt - a1 * r.log_last() -
         a2 * s.log_last() - r.sum_log() - s.sum_log();
}

double ks_statistic(std::span<const double> data,
                    const std::function<double(double)>& model_cdf) {
  if (data.empty()) throw DomainError("KS statistic of an empty sample");
  std::vector<double> x(data.begin(), data.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = model_cdf(x[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_statistic(std::span<const double> data, const ParetoParams& p) {
  return ks_statistic(data, [&p](double x) { return cdf(x, p); });
}

}  // namespace mssr

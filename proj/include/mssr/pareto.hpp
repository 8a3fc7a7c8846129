#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mssr/random.hpp"

namespace mssr {

class ParetoParams {
 public:
  /// Throws DomainError unless both arguments are finite and positive.
  ParetoParams(double alpha, double theta);

  double alpha() const noexcept { return alpha_; }
  double theta() const noexcept { return theta_; }

 private:
  double alpha_;
  double theta_;
};

/// Strictly increasing sequence of upper records (length >= 2) with the
/// logarithms cached, since every estimator reads them.
class RecordSample {
 public:
  explicit RecordSample(std::vector<double> values,
                        std::optional<ParetoParams> source = std::nullopt);

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& log_values() const noexcept { return logs_; }
  double first() const noexcept { return values_.front(); }
  double last() const noexcept { return values_.back(); }
  double log_first() const noexcept { return logs_.front(); }
  double log_last() const noexcept { return logs_.back(); }
  double sum_log() const noexcept { return sum_log_; }
  const std::optional<ParetoParams>& source() const noexcept { return source_; }

  /// Every value multiplied by c > 0 (source scale follows).
  RecordSample scaled(double c) const;

 private:
  std::vector<double> values_;
  std::vector<double> logs_;
  double sum_log_ = 0.0;
  std::optional<ParetoParams> source_;
};

double pdf(double x, const ParetoParams& p);
double cdf(double x, const ParetoParams& p);
/// Throws DomainError unless 0 < u < 1.
double quantile(double u, const ParetoParams& p);

/// Lomax (Pareto type II) cdf 1 - (1 + x/theta)^(-alpha), x >= 0.
double lomax_cdf(double x, const ParetoParams& p);

/// n upper records of Pareto(alpha, theta). ln(R_i/theta) are cumulative sums
/// of i.i.d. Exp(rate alpha) increments.
RecordSample gen_records(const ParetoParams& p, std::size_t n, Rng& rng);

/// Joint log density of two independent record samples with shapes a1, a2 and
/// common scale theta. Throws SupportError when theta > min(r_1, s_1).
double log_likelihood(double a1, double a2, double theta, const RecordSample& r,
                      const RecordSample& s);

/// Two-sided one-sample Kolmogorov-Smirnov distance max(D+, D-).
double ks_statistic(std::span<const double> data, const ParetoParams& p);
double ks_statistic(std::span<const double> data,
                    const std::function<double(double)>& model_cdf);

}  // namespace mssr

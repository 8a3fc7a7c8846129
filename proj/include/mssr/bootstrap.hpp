#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mssr/classical.hpp"

namespace mssr {

struct BootstrapSample {
  std::vector<double> estimates;  // R*_b
  double point = 0.0;             // R_hat from the original data
  double se_hat = 0.0;            // sample standard deviation of estimates
};

struct ShapePair {
  double alpha1;
  double alpha2;
};

/// Refitted known-theta MLE shapes from B parametric resamples at the fit.
/// Replicate b draws from make_stream(seed, b). The shapes do not depend on
/// the system, so one set serves any number of (s, k).
std::vector<ShapePair> boot_shape_pairs(const MleFit& fit, double theta, std::size_t B,
                                        std::uint64_t seed);

BootstrapSample boot_from_pairs(std::span<const ShapePair> pairs, const MleFit& fit,
                                const SystemSpec& spec);

/// Parametric bootstrap of R_hat with theta known. B defaults to 2000.
BootstrapSample boot_samples(const MleFit& fit, double theta, const SystemSpec& spec,
                             std::size_t B = 2000, std::uint64_t seed = 0);

/// Linear interpolation between order statistics at h = (N-1)q + 1 (1-based).
/// `sorted` must be ascending.
double empirical_quantile(std::span<const double> sorted, double q);

IntervalEstimate boot_normal_ci(const BootstrapSample& bs, double beta);
IntervalEstimate boot_percentile_ci(const BootstrapSample& bs, double beta);
/// Needs B >= 50 and se_hat > 0.
IntervalEstimate boot_t_ci(const BootstrapSample& bs, double beta);

}  // namespace mssr

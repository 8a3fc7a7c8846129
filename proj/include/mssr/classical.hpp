#pragma once

#include <optional>
#include <string_view>

#include "mssr/pareto.hpp"
#include "mssr/reliability.hpp"

namespace mssr {

enum class ThetaMode { known, unknown };

struct MleFit {
  double alpha1;
  double alpha2;
  /// Estimated min(r_1, s_1) in unknown mode, the supplied value otherwise.
  double theta;
  std::size_t n;
  std::size_t m;
  ThetaMode mode;
};

enum class IntervalMethod { asymptotic, boot_normal, boot_p, boot_t, hpd };

std::string_view to_string(IntervalMethod m);

/// Reliability interval. lower/upper are clamped to [0,1]; raw_* keep the
/// unclamped construction.
struct IntervalEstimate {
  double lower;
  double upper;
  double raw_lower;
  double raw_upper;
  double level;
  IntervalMethod method;

  double width() const noexcept { return upper - lower; }
  double raw_width() const noexcept { return raw_upper - raw_lower; }
  bool contains(double r) const noexcept { return lower <= r && r <= upper; }
};

IntervalEstimate make_interval(double lo, double hi, double level, IntervalMethod method);

/// z such that P(Z <= z) = p for a standard normal Z.
double normal_quantile(double p);

MleFit mle_unknown_theta(const RecordSample& r, const RecordSample& s);
/// Throws SupportError unless 0 < theta <= min(r_1, s_1).
MleFit mle_known_theta(const RecordSample& r, const RecordSample& s, double theta);
double mle_r_sk(const MleFit& fit, const SystemSpec& spec);

/// Rao-Blackwellised estimate of alpha2/(d*alpha1 + alpha2) given
/// u1 = ln(r_n/theta), u2 = ln(s_m/theta). Evaluated as a positive-term
/// Beta-function series.
double umvue_varphi(double u1, double u2, int d, std::size_t n, std::size_t m);
/// The same quantity as the two-branch alternating Gamma-ratio series
/// (branch chosen by u2 < u1/d). Loses about 1e-9 for m near 25.
double umvue_varphi_alternating(double u1, double u2, int d, std::size_t n, std::size_t m);
/// Not clamped to [0,1].
double umvue_r_sk(const RecordSample& r, const RecordSample& s, double theta,
                  const SystemSpec& spec);

/// Delta-method variance w1^2 a1^2/n + w2^2 a2^2/m.
double asymptotic_variance(const MleFit& fit, const SystemSpec& spec);
/// R_hat -/+ z_{1-beta/2} sqrt(AV).
IntervalEstimate asymptotic_ci(const MleFit& fit, const SystemSpec& spec, double beta);

void check_beta(double beta);

}  // namespace mssr

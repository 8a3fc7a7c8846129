#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mssr/classical.hpp"
#include "mssr/lindley.hpp"

namespace mssr {

struct McmcConfig {
  std::size_t T = 11000;        // total sweeps, burn-in included
  std::size_t burn_in = 1000;
  double proposal_sd = 0.0;     // <= 0 means 0.1 * min(r_1, s_1)
  std::uint64_t seed = 0;
  std::size_t thinning = 1;
  bool adapt = true;            // scale the proposal during burn-in only

  /// Throws DomainError if burn_in >= T or thinning == 0.
  void validate() const;
};

struct Draw {
  double alpha1;
  double alpha2;
  double theta;
  double r;
};

struct PosteriorChain {
  std::vector<Draw> draws;
  double acceptance_rate = 1.0;  // theta moves after burn-in
  double final_proposal_sd = 0.0;
  std::string warning;           // empty when the sampler looked healthy

  std::vector<double> r_values() const;
};

/// Unnormalised log density of the theta full conditional,
/// theta^{shape-1} exp(-rate theta) on (0, upper); -inf outside.
double theta_log_kernel(double theta, double shape, double rate, double upper);

/// One random-walk Metropolis update of theta against theta_log_kernel.
/// Returns true if the proposal was accepted.
bool theta_mh_step(double& theta, double shape, double rate, double upper, double sd, Rng& rng);

PosteriorChain gibbs_known_theta(const RecordSample& r, const RecordSample& s, double theta,
                                 const PriorConfig& prior, const SystemSpec& spec,
                                 const McmcConfig& cfg);

PosteriorChain mh_within_gibbs(const RecordSample& r, const RecordSample& s,
                               const PriorConfig& prior, const SystemSpec& spec,
                               const McmcConfig& cfg);

/// Copy of the chain with r recomputed for another system.
PosteriorChain rescore(const PosteriorChain& chain, const SystemSpec& spec);

double point_sel(const PosteriorChain& chain);
double point_linex(const PosteriorChain& chain, double c);

/// Narrowest window holding ceil(level*N) sorted draws; ties go to the lowest
/// start. Needs at least 100 draws.
IntervalEstimate hpd_interval(const PosteriorChain& chain, double level);
IntervalEstimate hpd_interval(std::span<const double> draws, double level);

/// Header "alpha1,alpha2,theta,r" then one draw per line.
void write_chain_csv(std::ostream& os, const PosteriorChain& chain);

}  // namespace mssr

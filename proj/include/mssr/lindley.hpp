#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "mssr/classical.hpp"

namespace mssr {

/// Independent gamma(shape a_i, rate b_i) priors on alpha1, alpha2, theta.
/// The third pair is ignored when theta is known.
struct PriorConfig {
  std::array<double, 3> a{1.0, 1.0, 1.0};
  std::array<double, 3> b{1.0, 1.0, 1.0};

  PriorConfig() = default;
  /// Throws DomainError unless every entry is finite and positive.
  PriorConfig(std::array<double, 3> shapes, std::array<double, 3> rates);
};

struct Loss {
  enum class Kind { sel, linex };
  Kind kind = Kind::sel;
  double c = 0.0;

  static Loss sel() { return {}; }
  /// Throws DomainError for c == 0.
  static Loss linex(double c);
};

/// Log-likelihood curvature at the MLE. Parameter order is
/// (alpha1, alpha2[, theta]); dim() is 2 for known theta, 3 otherwise.
struct LindleyTerms {
  Eigen::MatrixXd L2;     // second derivatives L_ij
  Eigen::MatrixXd sigma;  // inverse of -L2
  std::vector<double> L3; // third derivatives, index (i*dim + j)*dim + k
  Eigen::VectorXd rho;    // prior log-gradient

  int dim() const { return static_cast<int>(L2.rows()); }
  double l3(int i, int j, int k) const { return L3[(i * dim() + j) * dim() + k]; }
};

/// L_ij, L_ijk at the fit plus sigma. rho is left empty.
LindleyTerms loglik_derivatives(const MleFit& fit);

/// rho_j = (a_j - 1)/lambda_j - b_j for lambda = (alpha1, alpha2[, theta]).
Eigen::VectorXd prior_log_gradient(const MleFit& fit, const PriorConfig& prior);

/// Terms named as in the unknown-theta expansion.
struct Lindley3Pieces {
  std::array<double, 3> d{};  // d_1..d_3
  double d4 = 0.0;
  double d5 = 0.0;
  double A = 0.0, B = 0.0, C = 0.0;
};

/// Terms named as in the known-theta expansion.
struct Lindley2Pieces {
  std::array<double, 3> tau{};  // tau_1..tau_3
  double Q1 = 0.0;
  double Q2 = 0.0;
};

Lindley3Pieces lindley_pieces_3param(const LindleyTerms& t, const LossBundle& w);
Lindley2Pieces lindley_pieces_2param(const LindleyTerms& t, const LossBundle& w);

/// Approximate posterior expectation of w from its value and derivatives
/// (w_3 = w_i3 = 0: R does not depend on theta). Dispatches on dim().
double lindley_expectation(const LindleyTerms& t, const LossBundle& w);

/// Full index-sum form of the expansion, for cross-checking the named pieces.
double lindley_expectation_general(const LindleyTerms& t, const LossBundle& w);

/// Bayes estimate of R_{s;k} with theta unknown. Throws ApproximationBreakdown
/// if the LINEX expectation approximation is not positive.
double lindley_estimate_3param(const RecordSample& r, const RecordSample& s,
                               const PriorConfig& prior, const SystemSpec& spec, Loss loss);
double lindley_estimate_2param(const RecordSample& r, const RecordSample& s, double theta,
                               const PriorConfig& prior, const SystemSpec& spec, Loss loss);

/// Same as above from an existing fit (its mode selects the expansion).
double lindley_estimate(const MleFit& fit, const PriorConfig& prior, const SystemSpec& spec,
                        Loss loss);

}  // namespace mssr

#pragma once

#include <cstdint>

namespace mssr {

/// s-out-of-k system: works while at least s of the k strengths exceed the stress.
class SystemSpec {
 public:
  static constexpr int kMaxComponents = 30;

  /// Throws DomainError unless 1 <= s <= k; CapacityError when k > kMaxComponents.
  SystemSpec(int s, int k);

  int s() const noexcept { return s_; }
  int k() const noexcept { return k_; }

  friend bool operator==(const SystemSpec&, const SystemSpec&) = default;

 private:
  int s_;
  int k_;
};

/// Exact binomial coefficient; n <= 62.
std::uint64_t binomial(int n, int r);

struct Gradient {
  double w1;
  double w2;
};

struct Hessian {
  double w11;
  double w12;
  double w22;
};

/// Value plus first and second partials with respect to (alpha1, alpha2).
struct LossBundle {
  double w;
  double w1;
  double w2;
  double w11;
  double w12;
  double w22;
};

/// R_{s;k} for strength shape a1 and stress shape a2.
///
/// Uses the equivalent product form
///   sum_{p=s}^{k} (k!/p!) * b / prod_{j=p}^{k} (j + b),   b = a2/a1,
/// which has only positive terms. The alternating double sum is available as
/// r_sk_expanded for cross-checking.
double r_sk(double a1, double a2, const SystemSpec& spec);
Gradient grad_r(double a1, double a2, const SystemSpec& spec);
Hessian hess_r(double a1, double a2, const SystemSpec& spec);

/// Alternating binomial double sum with Kahan accumulation. Loses accuracy for
/// large k (about 1e-4 at k = 30).
double r_sk_expanded(double a1, double a2, const SystemSpec& spec);
Gradient grad_r_expanded(double a1, double a2, const SystemSpec& spec);
Hessian hess_r_expanded(double a1, double a2, const SystemSpec& spec);

/// Direct quadrature of the defining integral after mapping the stress to
/// t = (theta/y)^{a2} on (0,1). Throws NumericalError (carrying the error
/// estimate) when the requested accuracy is not reached.
double r_sk_oracle(double a1, double a2, const SystemSpec& spec, double tol = 1e-12);

/// w = R_{s;k} with its derivatives.
LossBundle sel_bundle(double a1, double a2, const SystemSpec& spec);
/// w = exp(-c R_{s;k}) with its derivatives; throws DomainError for c == 0.
LossBundle linex_bundle(double a1, double a2, const SystemSpec& spec, double c);

}  // namespace mssr

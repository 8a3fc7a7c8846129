#include "mssr/reliability.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <string>
#include <vector>

#include "mssr/errors.hpp"

namespace mssr {

SystemSpec::SystemSpec(int s, int k) : s_(s), k_(k) {
  if (s < 1 || k < s)
    throw DomainError("system spec needs 1 <= s <= k (got s=" + std::to_string(s) +
                      ", k=" + std::to_string(k) + ")");
  if (k > kMaxComponents)
    throw CapacityError("k=" + std::to_string(k) + " exceeds the supported maximum of " +
                        std::to_string(kMaxComponents));
}

std::uint64_t binomial(int n, int r) {
  if (r < 0 || r > n) return 0;
  if (r > n - r) r = n - r;
  std::uint64_t c = 1;
  for (int i = 1; i <= r; ++i) c = c * static_cast<std::uint64_t>(n - r + i) / static_cast<std::uint64_t>(i);
  return c;
}

namespace {

void check_shapes(double a1, double a2) {
  if (!(std::isfinite(a1) && a1 > 0.0) || !(std::isfinite(a2) && a2 > 0.0))
    throw DomainError("shape parameters must be positive and finite");
}

// f(b) = R as a function of b = a2/a1, with f'(b), f''(b).
struct RatioDerivs {
  double f, f1, f2;
};

RatioDerivs ratio_derivs(double b, int s, int k) {
  // q = prod_{j=p+1}^{k} j/(j+b); tail sums run over j = p+1..k
  double q = 1.0, tail1 = 0.0, tail2 = 0.0;
  double f = 0.0, f1 = 0.0, f2 = 0.0;
  for (int p = k; p >= s; --p) {
    const double pb = p + b;
    const double t = b / pb * q;
    const double g = p / (b * pb) - tail1;
    const double h = -p * (2.0 * b + p) / (b * b * pb * pb) + tail2;
    f += t;
    f1 += t * g;
    f2 += t * (g * g + h);
    q *= p / pb;
    tail1 += 1.0 / pb;
    tail2 += 1.0 / (pb * pb);
  }
  return {f, f1, f2};
}

struct Kahan {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

template <class F>
void for_each_term(const SystemSpec& spec, F&& f) {
  const int k = spec.k();
  for (int p = spec.s(); p <= k; ++p)
    for (int u = 0; u <= k - p; ++u) {
      const double c = static_cast<double>(binomial(k, p) * binomial(k - p, u));
      f((u % 2 == 0) ? c : -c, p + u);
    }
}

}  // namespace

double r_sk(double a1, double a2, const SystemSpec& spec) {
  check_shapes(a1, a2);
  return ratio_derivs(a2 / a1, spec.s(), spec.k()).f;
}

Gradient grad_r(double a1, double a2, const SystemSpec& spec) {
  check_shapes(a1, a2);
  const double b = a2 / a1;
  const auto d = ratio_derivs(b, spec.s(), spec.k());
  return {-d.f1 * b / a1, d.f1 / a1};
}

Hessian hess_r(double a1, double a2, const SystemSpec& spec) {
  check_shapes(a1, a2);
  const double b = a2 / a1;
  const auto d = ratio_derivs(b, spec.s(), spec.k());
  const double a1sq = a1 * a1;
  return {(d.f2 * b * b + 2.0 * d.f1 * b) / a1sq, -(d.f2 * b + d.f1) / a1sq, d.f2 / a1sq};
}

double r_sk_expanded(double a1, double a2, const SystemSpec& spec) {
  check_shapes(a1, a2);
  Kahan acc;
  for_each_term(spec, [&](double c, int d) { acc.add(c * a2 / (a1 * d + a2)); });
  return acc.sum;
}

Gradient grad_r_expanded(double a1, double a2, const SystemSpec& spec) {
  check_shapes(a1, a2);
  Kahan g1, g2;
  for_each_term(spec, [&](double c, int d) {
    const double den = a1 * d + a2;
    const double den2 = den * den;
    g1.add(-c * a2 * d / den2);
    g2.add(c * a1 * d / den2);
  });
  return {g1.sum, g2.sum};
}

Hessian hess_r_expanded(double a1, double a2, const SystemSpec& spec) {
  check_shapes(a1, a2);
  Kahan h11, h12, h22;
  for_each_term(spec, [&](double c, int d) {
    const double den = a1 * d + a2;
    const double den3 = den * den * den;
    h11.add(c * 2.0 * a2 * d * d / den3);
    h12.add(c * d * (a2 - a1 * d) / den3);
    h22.add(-c * 2.0 * a1 * d / den3);
  });
  return {h11.sum, h12.sum, h22.sum};
}

double r_sk_oracle(double a1, double a2, const SystemSpec& spec, double tol) {
  check_shapes(a1, a2);
  const double rho = a1 / a2;
  const int k = spec.k();
  std::vector<double> binom(static_cast<std::size_t>(k) + 1);
  for (int p = 0; p <= k; ++p) binom[p] = static_cast<double>(binomial(k, p));
  auto integrand = [&](double t) {
    // surv = P(X > y) = t^rho for a strength X; failure prob is 1 - surv
    const double surv = std::pow(t, rho);
    const double fail = -std::expm1(rho * std::log(t));
    double sum = 0.0;
    for (int p = spec.s(); p <= k; ++p) sum += binom[p] * std::pow(surv, p) * std::pow(fail, k - p);
    return sum;
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  double err = 0.0, l1 = 0.0;
  const double v = integrator.integrate(integrand, 0.0, 1.0, tol, &err, &l1);
  if (!std::isfinite(v) || err > 1e-9)
    throw NumericalError("reliability quadrature did not converge", err);
  return v;
}

LossBundle sel_bundle(double a1, double a2, const SystemSpec& spec) {
  check_shapes(a1, a2);
  const double b = a2 / a1;
  const auto d = ratio_derivs(b, spec.s(), spec.k());
  const double a1sq = a1 * a1;
  return {d.f,
          -d.f1 * b / a1,
          d.f1 / a1,
          (d.f2 * b * b + 2.0 * d.f1 * b) / a1sq,
          -(d.f2 * b + d.f1) / a1sq,
          d.f2 / a1sq};
}

LossBundle linex_bundle(double a1, double a2, const SystemSpec& spec, double c) {
  if (c == 0.0 || !std::isfinite(c)) throw DomainError("LINEX parameter c must be nonzero");
  const LossBundle r = sel_bundle(a1, a2, spec);
  const double w = std::exp(-c * r.w);
  return {w,
          -c * w * r.w1,
          -c * w * r.w2,
          w * (c * c * r.w1 * r.w1 - c * r.w11),
          w * (c * c * r.w1 * r.w2 - c * r.w12),
          w * (c * c * r.w2 * r.w2 - c * r.w22)};
}

}  // namespace mssr

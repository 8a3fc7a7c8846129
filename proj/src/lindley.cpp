#include "mssr/lindley.hpp"

#include <cmath>

#include "mssr/errors.hpp"

namespace mssr {

PriorConfig::PriorConfig(std::array<double, 3> shapes, std::array<double, 3> rates)
    : a(shapes), b(rates) {
  for (int i = 0; i < 3; ++i)
    if (!(std::isfinite(a[i]) && a[i] > 0.0 && std::isfinite(b[i]) && b[i] > 0.0))
      throw DomainError("prior hyperparameters must be positive");
}

Loss Loss::linex(double c) {
  if (c == 0.0 || !std::isfinite(c)) throw DomainError("LINEX parameter c must be nonzero");
  return {Kind::linex, c};
}

LindleyTerms loglik_derivatives(const MleFit& fit) {
  const int dim = fit.mode == ThetaMode::known ? 2 : 3;
  const double a1 = fit.alpha1, a2 = fit.alpha2, th = fit.theta;
  const double n = static_cast<double>(fit.n), m = static_cast<double>(fit.m);
  LindleyTerms t;
  t.L2 = Eigen::MatrixXd::Zero(dim, dim);
  t.L3.assign(static_cast<std::size_t>(dim * dim * dim), 0.0);
  auto set3 = [&](int i, int j, int k, double v) { t.L3[(i * dim + j) * dim + k] = v; };

  t.L2(0, 0) = -n / (a1 * a1);
  t.L2(1, 1) = -m / (a2 * a2);
  set3(0, 0, 0, 2.0 * n / (a1 * a1 * a1));
  set3(1, 1, 1, 2.0 * m / (a2 * a2 * a2));
  if (dim == 3) {
    t.L2(0, 2) = t.L2(2, 0) = 1.0 / th;
    t.L2(1, 2) = t.L2(2, 1) = 1.0 / th;
    t.L2(2, 2) = -(a1 + a2) / (th * th);
    const double c = -1.0 / (th * th);
    for (int i : {0, 1}) {
      set3(i, 2, 2, c);
      set3(2, i, 2, c);
      set3(2, 2, i, c);
    }
    set3(2, 2, 2, 2.0 * (a1 + a2) / (th * th * th));
  }
  const Eigen::MatrixXd neg = -t.L2;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(neg);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= 0.0)
    throw NumericalError("observed information is not positive definite");
  t.sigma = ldlt.solve(Eigen::MatrixXd::Identity(dim, dim));
  return t;
}

Eigen::VectorXd prior_log_gradient(const MleFit& fit, const PriorConfig& prior) {
  const int dim = fit.mode == ThetaMode::known ? 2 : 3;
  const double lam[3] = {fit.alpha1, fit.alpha2, fit.theta};
  Eigen::VectorXd rho(dim);
  for (int j = 0; j < dim; ++j) {
    if (!(lam[j] > 0.0)) throw DomainError("parameters must be positive");
    rho(j) = (prior.a[j] - 1.0) / lam[j] - prior.b[j];
  }
  return rho;
}

namespace {

Eigen::VectorXd grad_vec(const LossBundle& w, int dim) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
  g(0) = w.w1;
  g(1) = w.w2;
  return g;
}

Eigen::MatrixXd hess_mat(const LossBundle& w, int dim) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  h(0, 0) = w.w11;
  h(0, 1) = h(1, 0) = w.w12;
  h(1, 1) = w.w22;
  return h;
}

void require_rho(const LindleyTerms& t) {
  if (t.rho.size() != t.dim()) throw DomainError("Lindley terms are missing the prior gradient");
}

}  // namespace

Lindley3Pieces lindley_pieces_3param(const LindleyTerms& t, const LossBundle& w) {
  if (t.dim() != 3) throw DomainError("three-parameter expansion needs unknown-theta terms");
  require_rho(t);
  const Eigen::MatrixXd& s = t.sigma;
  const Eigen::MatrixXd W = hess_mat(w, 3);
  Lindley3Pieces p;
  for (int i = 0; i < 3; ++i) p.d[i] = t.rho(0) * s(i, 0) + t.rho(1) * s(i, 1) + t.rho(2) * s(i, 2);
  p.d4 = W(0, 1) * s(0, 1) + W(0, 2) * s(0, 2) + W(1, 2) * s(1, 2);
  p.d5 = 0.5 * (W(0, 0) * s(0, 0) + W(1, 1) * s(1, 1) + W(2, 2) * s(2, 2));
  auto contract = [&](int k) {
    return t.l3(0, 0, k) * s(0, 0) + 2.0 * t.l3(0, 1, k) * s(0, 1) + 2.0 * t.l3(0, 2, k) * s(0, 2) +
           2.0 * t.l3(1, 2, k) * s(1, 2) + t.l3(1, 1, k) * s(1, 1) + t.l3(2, 2, k) * s(2, 2);
  };
  p.A = contract(0);
  p.B = contract(1);
  p.C = contract(2);
  return p;
}

Lindley2Pieces lindley_pieces_2param(const LindleyTerms& t, const LossBundle& w) {
  if (t.dim() != 2) throw DomainError("two-parameter expansion needs known-theta terms");
  require_rho(t);
  const Eigen::MatrixXd& s = t.sigma;
  Lindley2Pieces p;
  for (int i = 0; i < 2; ++i) p.tau[i] = t.rho(0) * s(i, 0) + t.rho(1) * s(i, 1);
  p.tau[2] = 0.5 * (w.w11 * s(0, 0) + w.w12 * s(0, 1) + w.w12 * s(1, 0) + w.w22 * s(1, 1));
  p.Q1 = t.l3(0, 0, 0) * s(0, 0) + t.l3(0, 1, 0) * s(0, 1) + t.l3(1, 0, 0) * s(1, 0) +
         t.l3(1, 1, 0) * s(1, 1);
  p.Q2 = t.l3(0, 0, 1) * s(0, 0) + t.l3(0, 1, 1) * s(0, 1) + t.l3(1, 0, 1) * s(1, 0) +
         t.l3(1, 1, 1) * s(1, 1);
  return p;
}

double lindley_expectation(const LindleyTerms& t, const LossBundle& w) {
  const Eigen::MatrixXd& s = t.sigma;
  if (t.dim() == 3) {
    const Lindley3Pieces p = lindley_pieces_3param(t, w);
    // w_3 = 0
    const double sw1 = w.w1 * s(0, 0) + w.w2 * s(0, 1);
    const double sw2 = w.w1 * s(1, 0) + w.w2 * s(1, 1);
    const double sw3 = w.w1 * s(2, 0) + w.w2 * s(2, 1);
    return w.w + (w.w1 * p.d[0] + w.w2 * p.d[1] + p.d4 + p.d5) +
           0.5 * (p.A * sw1 + p.B * sw2 + p.C * sw3);
  }
  const Lindley2Pieces p = lindley_pieces_2param(t, w);
  return w.w + (w.w1 * p.tau[0] + w.w2 * p.tau[1] + p.tau[2]) +
         0.5 * (p.Q1 * (w.w1 * s(0, 0) + w.w2 * s(0, 1)) + p.Q2 * (w.w1 * s(1, 0) + w.w2 * s(1, 1)));
}

double lindley_expectation_general(const LindleyTerms& t, const LossBundle& w) {
  require_rho(t);
  const int dim = t.dim();
  const Eigen::VectorXd g = grad_vec(w, dim);
  const Eigen::MatrixXd W = hess_mat(w, dim);
  double val = w.w;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) val += 0.5 * (W(i, j) + 2.0 * g(i) * t.rho(j)) * t.sigma(i, j);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        for (int p = 0; p < dim; ++p)
          val += 0.5 * t.l3(i, j, k) * t.sigma(i, j) * t.sigma(k, p) * g(p);
  return val;
}

double lindley_estimate(const MleFit& fit, const PriorConfig& prior, const SystemSpec& spec,
                        Loss loss) {
  LindleyTerms t = loglik_derivatives(fit);
  t.rho = prior_log_gradient(fit, prior);
  if (loss.kind == Loss::Kind::sel) return lindley_expectation(t, sel_bundle(fit.alpha1, fit.alpha2, spec));
  const double e = lindley_expectation(t, linex_bundle(fit.alpha1, fit.alpha2, spec, loss.c));
  if (!(e > 0.0) || !std::isfinite(e))
    throw ApproximationBreakdown("Lindley approximation of E[exp(-cR)] is not positive", e);
  return -std::log(e) / loss.c;
}

double lindley_estimate_3param(const RecordSample& r, const RecordSample& s,
                               const PriorConfig& prior, const SystemSpec& spec, Loss loss) {
  return lindley_estimate(mle_unknown_theta(r, s), prior, spec, loss);
}

double lindley_estimate_2param(const RecordSample& r, const RecordSample& s, double theta,
                               const PriorConfig& prior, const SystemSpec& spec, Loss loss) {
  return lindley_estimate(mle_known_theta(r, s, theta), prior, spec, loss);
}

}  // namespace mssr

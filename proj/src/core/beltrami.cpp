#include "core/beltrami.hpp"

#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace ellgrow {

BeltramiSetup beltrami_setup(const GreenKernel& kernel, const AreaRule& rule,
                             const UField& u, double eps) {
  BeltramiSetup s;
  s.kernel = &kernel;
  s.rule = &rule;
  s.u = u;
  s.eps = eps;
  const int m = rule.size();
  s.lambda.resize(m);
  s.V.resize(m);
  s.du_lap.resize(m);

  const double eps0 = [&] {
    double mu = 0.0;
    for (const Complex& z : rule.nodes) mu = std::max(mu, std::abs(u.value(z)));
    return mu == 0.0 ? std::numeric_limits<double>::infinity() : 0.5 / mu;
  }();
  if (eps < 0.0 || eps >= eps0)
    throw EpsilonRangeError("eps outside [0, 0.5/max|u|) for the conductivity");

  auto lam = [u, eps](Complex z) { return 1.0 + eps * u.value(z); };
  auto pot = [u, eps, lam](Complex z) {
    const double l = lam(z);
    const double g2 = std::norm(u.grad(z));
    return eps * u.lap(z) / (2.0 * l) - eps * eps * g2 / (4.0 * l * l);
  };
  for (int i = 0; i < m; ++i) {
    const Complex z = rule.nodes[i];
    s.lambda[i] = lam(z);
    if (s.lambda[i] <= 0.0) throw InputError("conductivity 1 + eps*u is not positive");
    s.V[i] = pot(z);
    s.du_lap[i] = u.lap(z);
  }
  s.lambda_eval = lam;
  s.V_eval = pot;
  return s;
}

BeltramiGreen beltrami_green_star(const BeltramiSetup& setup, Complex w) {
  const GreenKernel& kernel = *setup.kernel;
  const AreaRule& rule = *setup.rule;
  const int m = rule.size();
  BeltramiGreen bg;
  bg.w = w;
  const std::vector<double> gw = kernel.green_on(rule, w);
  if (setup.eps == 0.0) {
    bg.hV.assign(m, 0.0);
    bg.correction.assign(m, 0.0);
    bg.g_star = gw;
    return bg;
  }
  PotentialSeries ps =
      potential_series(kernel, rule, setup.V, setup.V_eval(w), w, 1.0);
  bg.hV = std::move(ps.correction);
  bg.terms = ps.terms;
  bg.tail = ps.tail;
  const double sw = std::sqrt(setup.lambda_eval(w));
  bg.g_star.resize(m);
  bg.correction.resize(m);
  for (int i = 0; i < m; ++i) {
    const double sz = std::sqrt(setup.lambda[i]);
    bg.g_star[i] = (gw[i] + bg.hV[i]) / (sz * sw);
    bg.correction[i] = bg.g_star[i] - gw[i];
  }
  return bg;
}

double beltrami_normal_derivative(const BeltramiSetup& setup, const BeltramiGreen& bg,
                                  const BoundarySample& zeta) {
  const GreenKernel& kernel = *setup.kernel;
  const AreaRule& rule = *setup.rule;
  const double base = kernel.poisson(bg.w, zeta);
  const double sw = std::sqrt(setup.lambda_eval(bg.w));
  const double sz = std::sqrt(setup.lambda_eval(zeta.position));
  if (setup.eps == 0.0) return base;
  const double sing =
      kernel.integrate_green_poisson(rule, setup.V, setup.V_eval, bg.w, zeta);
  std::vector<double> vh(rule.size());
  for (int i = 0; i < rule.size(); ++i) vh[i] = setup.V[i] * bg.hV[i];
  const double smooth = kernel.integrate_poisson(rule, vh, zeta);
  return (base + sing + smooth) / (sz * sw);
}

double beltrami_flux(const GreenKernel& kernel, const AreaRule& rule, const UField& u,
                     double eps, Complex w, const BoundarySample& zeta) {
  const BeltramiSetup setup = beltrami_setup(kernel, rule, u, eps);
  const BeltramiGreen bg = beltrami_green_star(setup, w);
  return beltrami_normal_derivative(setup, bg, zeta);
}

double beltrami_first_variation(const GreenKernel& kernel, const AreaRule& rule,
                                const UField& u, Complex w, const BoundarySample& zeta) {
  const std::vector<double> du = u.sample_lap(rule);
  const double integral = kernel.integrate_green_poisson(rule, du, u.lap, w, zeta);
  const double base = kernel.poisson(w, zeta);
  return 0.5 * (integral - base * (u.value(zeta.position) + u.value(w)));
}

MonotonicityCheck beltrami_boundary_monotonicity(const GreenKernel& kernel,
                                                 const AreaRule& rule, const UField& u,
                                                 Complex w) {
  MonotonicityCheck mc;
  for (const BoundarySample& zeta : kernel.boundary()) {
    mc.lhs += beltrami_first_variation(kernel, rule, u, w, zeta) * zeta.ds;
    mc.rhs += -2.0 * u.value(zeta.position) * kernel.poisson(w, zeta) * zeta.ds;
  }
  return mc;
}

}  // namespace ellgrow

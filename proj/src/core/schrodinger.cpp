#include "core/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace ellgrow {
namespace {

constexpr int kMaxTerms = 60;
constexpr double kTailTol = 1e-12;

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void check_source_clearance(const AreaRule& rule, Complex w) {
  for (const Complex& z : rule.nodes)
    if (std::norm(z - w) < 1e-24)
      throw QuadratureError("a quadrature node sits on the source; rebuild the rule with the singularity hint");
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  if (den == 0.0) throw FitError("epsilon values do not span a range");
  return num / den;
}

}  // namespace

double epsilon_limit(std::span<const double> rho) {
  const double m = max_abs(rho);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 / m;
}

FieldSample apply_T(const GreenKernel& kernel, const FieldSample& phi) {
  if (!phi.rule) throw ShapeError("field sample carries no quadrature rule");
  if (static_cast<int>(phi.values.size()) != phi.rule->size())
    throw ShapeError("field length does not match its quadrature rule");
  FieldSample out;
  out.rule = phi.rule;
  out.values = kernel.apply_T_values(*phi.rule, phi.values);
  return out;
}

PotentialSeries potential_series(const GreenKernel& kernel, const AreaRule& rule,
                                 std::span<const double> rho, double rho_at_w,
                                 Complex w, double scale) {
  const int m = rule.size();
  if (static_cast<int>(rho.size()) != m)
    throw ShapeError("coefficient length does not match the quadrature rule");
  check_source_clearance(rule, w);

  const std::vector<double> gw = kernel.green_on(rule, w);
  const std::vector<double>& g1v = kernel.g1_on(rule);
  const double g1w = kernel.g1(w);
  double gw_mass = 0.0;
  for (int i = 0; i < m; ++i) gw_mass += rule.weights[i] * gw[i];

  // First term: T(rho g_w) with the logarithms at both the target node and
  // at w subtracted and restored through G1.
  std::vector<double> c(m);
  for (int i = 0; i < m; ++i) c[i] = rho[i] * gw[i];
  std::vector<double> S, colg;
  kernel.green_matvec(rule, c, S, colg);
  std::vector<double> term(m);
  for (int i = 0; i < m; ++i) {
    term[i] = scale * (S[i] - c[i] * colg[i] - rho_at_w * gw[i] * gw_mass +
                       c[i] * g1v[i] + rho_at_w * gw[i] * g1w);
  }

  PotentialSeries ps;
  ps.correction = term;
  ps.terms = 1;
  ps.tail = max_abs(term);
  std::vector<double> psi(m);
  while (ps.tail >= kTailTol) {
    if (ps.terms >= kMaxTerms) throw KernelError("potential series did not reach the tail tolerance");
    for (int i = 0; i < m; ++i) psi[i] = rho[i] * term[i];
    kernel.green_matvec(rule, psi, S, colg);
    for (int i = 0; i < m; ++i) {
      term[i] = scale * (S[i] + psi[i] * (g1v[i] - colg[i]));
      ps.correction[i] += term[i];
    }
    ++ps.terms;
    ps.tail = max_abs(term);
  }
  return ps;
}

SchrodingerGreen solve_series(const GreenKernel& kernel, const AreaRule& rule,
                              const UField& u, double eps, Complex w) {
  SchrodingerGreen sg;
  sg.kernel = &kernel;
  sg.rule = &rule;
  sg.u = u.sample(rule);
  sg.u_eval = u.value;
  sg.eps = eps;
  sg.w = w;
  for (double v : sg.u)
    if (v <= 0.0) throw InputError("coefficient u must be positive on the closed domain");
  const double eps0 = epsilon_limit(sg.u);
  if (eps < 0.0 || eps >= eps0) throw EpsilonRangeError("eps outside [0, 0.5/max|u|)");

  const std::vector<double> gw = kernel.green_on(rule, w);
  if (eps == 0.0) {
    check_source_clearance(rule, w);
    sg.correction.assign(rule.size(), 0.0);
    sg.g_star = gw;
    sg.terms = 0;
    sg.tail = 0.0;
    return sg;
  }
  PotentialSeries ps = potential_series(kernel, rule, sg.u, u.value(w), w, eps);
  sg.correction = std::move(ps.correction);
  sg.terms = ps.terms;
  sg.tail = ps.tail;
  sg.g_star.resize(rule.size());
  for (int i = 0; i < rule.size(); ++i) sg.g_star[i] = gw[i] + sg.correction[i];
  return sg;
}

double normal_derivative_exact(const SchrodingerGreen& sg, const BoundarySample& zeta) {
  const GreenKernel& kernel = *sg.kernel;
  const AreaRule& rule = *sg.rule;
  const double base = kernel.poisson(sg.w, zeta);
  if (sg.eps == 0.0) return base;
  const double sing = kernel.integrate_green_poisson(rule, sg.u, sg.u_eval, sg.w, zeta);
  std::vector<double> uh(rule.size());
  for (int i = 0; i < rule.size(); ++i) uh[i] = sg.u[i] * sg.correction[i];
  const double smooth = kernel.integrate_poisson(rule, uh, zeta);
  return base + sg.eps * (sing + smooth);
}

double first_variation(const GreenKernel& kernel, const AreaRule& rule, const UField& u,
                       Complex w, const BoundarySample& zeta) {
  const std::vector<double> us = u.sample(rule);
  return kernel.integrate_green_poisson(rule, us, u.value, w, zeta);
}

double first_variation_sampled(const GreenKernel& kernel, const AreaRule& rule,
                               std::span<const double> u, Complex w,
                               const BoundarySample& zeta) {
  return kernel.integrate_green_poisson(rule, u, nullptr, w, zeta);
}

double second_variation(const GreenKernel& kernel, const AreaRule& rule, const UField& u,
                        Complex w, const BoundarySample& zeta) {
  const int m = rule.size();
  check_source_clearance(rule, w);
  const std::vector<double> us = u.sample(rule);
  const std::vector<double> gw = kernel.green_on(rule, w);
  const std::vector<double>& g1v = kernel.g1_on(rule);
  const double g1w = kernel.g1(w);
  const double uw = u.value(w);
  double gw_mass = 0.0;
  for (int i = 0; i < m; ++i) gw_mass += rule.weights[i] * gw[i];

  std::vector<double> c(m);
  for (int i = 0; i < m; ++i) c[i] = us[i] * gw[i];
  std::vector<double> S, colg;
  kernel.green_matvec(rule, c, S, colg);
  // Inner potential W(z) = int u g_w g_z, then one corrected Poisson pass.
  std::vector<double> uW(m);
  for (int i = 0; i < m; ++i) {
    const double W = S[i] - c[i] * colg[i] - uw * gw[i] * gw_mass + c[i] * g1v[i] +
                     uw * gw[i] * g1w;
    uW[i] = us[i] * W;
  }
  return kernel.integrate_poisson(rule, uW, zeta);
}

VariationReport epsilon_sweep(const GreenKernel& kernel, const AreaRule& rule,
                              const UField& u, Complex w, const BoundarySample& zeta,
                              std::span<const double> eps_list) {
  if (eps_list.size() < 4) throw FitError("epsilon sweep needs at least 4 values");
  VariationReport rep;
  rep.base = kernel.poisson(w, zeta);
  rep.delta1 = first_variation(kernel, rule, u, w, zeta);
  rep.delta2 = second_variation(kernel, rule, u, w, zeta);
  for (double e : eps_list) {
    rep.eps.push_back(e);
    if (e == 0.0) {
      rep.flux.push_back(rep.base);
      continue;
    }
    const SchrodingerGreen sg = solve_series(kernel, rule, u, e, w);
    rep.flux.push_back(normal_derivative_exact(sg, zeta));
  }
  std::vector<double> lx1, ly1, lx2, ly2;
  for (size_t k = 0; k < rep.eps.size(); ++k) {
    const double e = rep.eps[k];
    if (e <= 0.0) continue;
    const double r1 = rep.flux[k] - rep.base - e * rep.delta1;
    const double r2 = r1 - e * e * rep.delta2;
    if (r1 != 0.0) {
      lx1.push_back(std::log(e));
      ly1.push_back(std::log(std::abs(r1)));
    }
    if (r2 != 0.0) {
      lx2.push_back(std::log(e));
      ly2.push_back(std::log(std::abs(r2)));
    }
  }
  if (lx1.size() < 2 || lx2.size() < 2)
    throw FitError("epsilon sweep has too few usable remainders to fit");
  rep.slope_after_linear = fit_slope(lx1, ly1);
  rep.slope_after_quadratic = fit_slope(lx2, ly2);
  return rep;
}

}  // namespace ellgrow

#include "core/dirichlet.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace ellgrow {

DirichletProbe solve_perturbed(const GreenKernel& kernel, const AreaRule& rule,
                               std::span<const double> f, const UField& u, double eps,
                               Complex z) {
  DirichletProbe out;
  out.phi0 = kernel.harmonic_extension(f, z);
  const std::vector<double> phi0 = kernel.harmonic_extension_on(rule, f);
  const std::vector<double> us = u.sample(rule);
  std::vector<double> uphi(rule.size());
  for (int i = 0; i < rule.size(); ++i) uphi[i] = us[i] * phi0[i];
  out.dphi = integrate_with_log_singularity(rule, kernel, uphi,
                                            u.value(z) * out.phi0, z);
  if (eps == 0.0) {
    out.phi_eps = out.phi0;
    return out;
  }
  const SchrodingerGreen sg = solve_series(kernel, rule, u, eps, z);
  double smooth = 0.0;
  for (int i = 0; i < rule.size(); ++i)
    smooth += rule.weights[i] * uphi[i] * sg.correction[i];
  out.phi_eps = out.phi0 + eps * (out.dphi + smooth);
  return out;
}

double linearization_bound(const GreenKernel& kernel, const AreaRule& rule,
                           std::span<const double> f, const UField& u, Complex z) {
  const std::vector<double> us = u.sample(rule);
  const std::vector<double> gz = kernel.green_on(rule, z);
  double nu = 0.0, ng = 0.0, nf = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    nu += rule.weights[i] * us[i] * us[i];
    ng += rule.weights[i] * gz[i] * gz[i];
  }
  for (double v : f) nf = std::max(nf, std::abs(v));
  return std::sqrt(nu) * std::sqrt(ng) * nf;
}

}  // namespace ellgrow

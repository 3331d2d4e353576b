#pragma once

#include "core/schrodinger.hpp"

namespace ellgrow {

/// Perturbed Dirichlet problem (Delta - eps*u) phi = 0, phi = f on the
/// boundary, at a probe point: the harmonic solution, its first variation
/// in eps, and the exact perturbed value.
struct DirichletProbe {
  double phi0 = 0.0;
  double dphi = 0.0;   // per unit eps
  double phi_eps = 0.0;
};

/// f is sampled on the kernel's boundary nodes.
/// phi0 = harmonic extension; dphi = int u phi0 g_z dA (singularity
/// subtracted); phi_eps = phi0 + eps int u phi0 g*_z dA with g*_z the
/// perturbed Green function sourced at the probe.
DirichletProbe solve_perturbed(const GreenKernel& kernel, const AreaRule& rule,
                               std::span<const double> f, const UField& u, double eps,
                               Complex z);

/// Right side of |dphi(z)| <= ||u||_2 ||g_z||_2 ||f||_inf, all three factors
/// by quadrature.
double linearization_bound(const GreenKernel& kernel, const AreaRule& rule,
                           std::span<const double> f, const UField& u, Complex z);

}  // namespace ellgrow

#pragma once

#include "core/schrodinger.hpp"

namespace ellgrow {

/// Divergence-form conductivity lambda = 1 + eps*u and the potential
/// V = Delta(sqrt(lambda))/sqrt(lambda) of the substituted operator, all
/// from the closed-form derivatives of u.
struct BeltramiSetup {
  const GreenKernel* kernel = nullptr;
  const AreaRule* rule = nullptr;
  UField u;
  double eps = 0.0;
  std::vector<double> lambda;
  std::vector<double> V;
  std::vector<double> du_lap;
  std::function<double(Complex)> lambda_eval;
  std::function<double(Complex)> V_eval;
};

BeltramiSetup beltrami_setup(const GreenKernel& kernel, const AreaRule& rule,
                             const UField& u, double eps);

/// Green function of div(lambda grad .) via sqrt(lambda) * g* being the
/// Green function of Delta - V: g*(z, w) = G_V(z, w)/sqrt(lambda(z)lambda(w)).
struct BeltramiGreen {
  Complex w;
  std::vector<double> g_star;      // on area nodes
  std::vector<double> correction;  // g_star - g_w
  std::vector<double> hV;          // G_V - g_w
  int terms = 0;
  double tail = 0.0;
};

BeltramiGreen beltrami_green_star(const BeltramiSetup& setup, Complex w);

/// d_n g*(zeta) through the substituted flux identity, divided by
/// sqrt(lambda(zeta) lambda(w)) (the boundary trace of G_V vanishes).
double beltrami_normal_derivative(const BeltramiSetup& setup, const BeltramiGreen& bg,
                                  const BoundarySample& zeta);

/// One-shot flux for sweeps.
double beltrami_flux(const GreenKernel& kernel, const AreaRule& rule, const UField& u,
                     double eps, Complex w, const BoundarySample& zeta);

/// First variation in eps at 0:
/// (1/2)[ int_D (Delta u) g_w P_zeta dA - d_n g_w(zeta) (u(zeta) + u(w)) ].
double beltrami_first_variation(const GreenKernel& kernel, const AreaRule& rule,
                                const UField& u, Complex w, const BoundarySample& zeta);

/// Both sides of the boundary-integrated monotonicity identity: lhs is the
/// integral of beltrami_first_variation over the boundary, rhs is
/// -2 int u d_n g_w ds. Returned separately so callers can compare them.
struct MonotonicityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
};

MonotonicityCheck beltrami_boundary_monotonicity(const GreenKernel& kernel,
                                                 const AreaRule& rule, const UField& u,
                                                 Complex w);

}  // namespace ellgrow

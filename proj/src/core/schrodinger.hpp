#pragma once

#include "core/green.hpp"
#include "core/ufield.hpp"

namespace ellgrow {

/// Perturbed Green function of Delta - eps*u as a Neumann series in the
/// integral operator phi -> T(u*phi). The stored values are g* on the area
/// nodes together with the smooth correction g* - g_w.
struct SchrodingerGreen {
  const GreenKernel* kernel = nullptr;
  const AreaRule* rule = nullptr;
  std::vector<double> u;
  std::function<double(Complex)> u_eval;
  double eps = 0.0;
  Complex w;
  std::vector<double> g_star;
  std::vector<double> correction;
  int terms = 0;
  double tail = 0.0;
};

struct PotentialSeries {
  std::vector<double> correction;  // sum of all order >= 1 terms on nodes
  int terms = 0;
  double tail = 0.0;
};

/// Largest admissible eps for a sampled coefficient: 0.5 / max|rho|.
double epsilon_limit(std::span<const double> rho);

/// (T phi)(z) = int_D g(z, xi) phi(xi) dA(xi) on the sample's own rule.
FieldSample apply_T(const GreenKernel& kernel, const FieldSample& phi);

/// Correction series sum_{n>=1} (scale * T_rho)^n g_w where T_rho f = T(rho f).
/// The first term integrates the product of two Green logarithms and is
/// evaluated with both singularities subtracted; later terms are smooth.
/// Truncation: last term max-abs < 1e-12, hard cap 60 terms (KernelError).
PotentialSeries potential_series(const GreenKernel& kernel, const AreaRule& rule,
                                 std::span<const double> rho, double rho_at_w,
                                 Complex w, double scale);

SchrodingerGreen solve_series(const GreenKernel& kernel, const AreaRule& rule,
                              const UField& u, double eps, Complex w);

/// d_n g*(zeta) = d_n g_w(zeta) + eps * int_D u g* P_zeta dA, the exact
/// boundary-flux identity (no differentiation of the series).
double normal_derivative_exact(const SchrodingerGreen& sg, const BoundarySample& zeta);

/// First variation d/d eps at 0: int_D u(z) g_w(z) P(z, zeta) dA(z).
double first_variation(const GreenKernel& kernel, const AreaRule& rule, const UField& u,
                       Complex w, const BoundarySample& zeta);
/// Same, from node samples only (off-node values interpolated).
double first_variation_sampled(const GreenKernel& kernel, const AreaRule& rule,
                               std::span<const double> u, Complex w,
                               const BoundarySample& zeta);

/// Coefficient of eps^2: int int u(z)u(xi) g(xi,w) g(xi,z) P(z,zeta) dA dA.
double second_variation(const GreenKernel& kernel, const AreaRule& rule, const UField& u,
                        Complex w, const BoundarySample& zeta);

struct VariationReport {
  double base = 0.0;    // d_n g_w(zeta)
  double delta1 = 0.0;  // per unit eps
  double delta2 = 0.0;  // coefficient of eps^2
  std::vector<double> eps;
  std::vector<double> flux;
  double slope_after_linear = 0.0;
  double slope_after_quadratic = 0.0;
};

/// Exact fluxes across an eps list plus log-log remainder orders after
/// removing the linear and the linear+quadratic models.
VariationReport epsilon_sweep(const GreenKernel& kernel, const AreaRule& rule,
                              const UField& u, Complex w, const BoundarySample& zeta,
                              std::span<const double> eps_list);

}  // namespace ellgrow

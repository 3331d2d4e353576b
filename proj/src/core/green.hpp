#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <span>

#include "core/quadrature.hpp"

namespace ellgrow {

/// Dirichlet Green function of the Laplacian on a domain, with the sign
/// convention Delta g_w = delta_w, g_w = 0 on the boundary, so g <= 0 in D
/// and the flux density P(z, zeta) = d_n g_z(zeta) is nonnegative with unit
/// boundary integral.
///
/// Backend by domain kind: closed forms on the unit disk, conformal
/// transport of the disk kernels (g is invariant, P picks up 1/|phi'|),
/// and a method-of-fundamental-solutions fit for marker curves with one
/// exterior charge per boundary node at 1.15x the local spacing.
class GreenKernel {
 public:
  GreenKernel(const Domain& domain, int n_boundary);
  GreenKernel(const GreenKernel&) = delete;
  GreenKernel& operator=(const GreenKernel&) = delete;
  GreenKernel(GreenKernel&&) = default;

  const Domain& domain() const { return domain_; }
  const std::vector<BoundarySample>& boundary() const { return boundary_; }
  int boundary_count() const { return static_cast<int>(boundary_.size()); }

  /// g_w(z). DomainError outside the closed domain, SingularityError at z == w.
  double green(Complex z, Complex w) const;

  /// g_w at every node of the rule; nodes within 1e-13 of w carry 0.
  std::vector<double> green_on(const AreaRule& rule, Complex w) const;

  /// Poisson kernel P(z, zeta) = d_n g_z at the boundary point zeta.
  double poisson(Complex z, const BoundarySample& zeta) const;
  double poisson_node(Complex z, int j) const { return poisson(z, boundary_[j]); }
  std::vector<double> poisson_on(const AreaRule& rule, const BoundarySample& zeta) const;

  /// G1(w) = int_D g_w dA. Closed form on the disk; elsewhere via the
  /// manufactured solution s with Delta s = 1, s = |z - z0|^2/4 minus the
  /// harmonic extension of its boundary trace.
  double g1(Complex w) const;
  const std::vector<double>& g1_on(const AreaRule& rule) const;

  /// Harmonic extension of boundary data sampled on this kernel's boundary.
  double harmonic_extension(std::span<const double> f, Complex z) const;
  std::vector<double> harmonic_extension_on(const AreaRule& rule,
                                            std::span<const double> f) const;

  /// T phi (z_i) = int g(z_i, xi) phi(xi) dA(xi) at every node, with the
  /// log singularity at the target subtracted through G1.
  std::vector<double> apply_T_values(const AreaRule& rule, std::span<const double> phi) const;

  /// S_i = sum_{j != i} wt_j c_j g(z_i, xi_j) and the plain column sums
  /// colg_i = sum_{j != i} wt_j g(z_i, xi_j), in one pairwise pass.
  void green_matvec(const AreaRule& rule, std::span<const double> c,
                    std::vector<double>& Sc, std::vector<double>& colg) const;

  /// int_D h(z) P(z, zeta) dA(z). On tensor rules the angular trapezoid mass
  /// of the Poisson factor is corrected ring by ring against its exact value,
  /// which removes the boundary-layer error near zeta.
  double integrate_poisson(const AreaRule& rule, std::span<const double> h,
                           const BoundarySample& zeta) const;

  /// int_D u(z) g_w(z) P(z, zeta) dA(z), singularity-subtracted at w and
  /// ring-corrected at zeta. u_eval supplies off-node values of u; if null
  /// they are interpolated from the samples.
  double integrate_green_poisson(const AreaRule& rule, std::span<const double> u,
                                 const std::function<double(Complex)>& u_eval,
                                 Complex w, const BoundarySample& zeta) const;

  /// int_D u(xi) g(xi, z) g(xi, w) dA(xi) with both logarithms subtracted.
  double integrate_green_green(const AreaRule& rule, std::span<const double> u,
                               double u_at_z, double u_at_w, Complex z, Complex w,
                               std::span<const double> gz,
                               std::span<const double> gw) const;

  // MFS internals, exposed for the boundary-residual diagnostics.
  const std::vector<Complex>& charge_points() const { return charges_; }
  double mfs_boundary_residual() const;

 private:
  Eigen::VectorXd solve_charges(const Eigen::VectorXd& rhs) const;
  Eigen::VectorXd charges_for_source(Complex w) const;
  const Eigen::MatrixXd& charges_on(const AreaRule& rule) const;
  const Eigen::MatrixXd& psi_on(const AreaRule& rule) const;
  double poisson_disk_pre(Complex a, Complex eta) const;  // preimage-side kernel
  Complex boundary_preimage(const BoundarySample& zeta) const;
  double boundary_map_deriv(const BoundarySample& zeta) const;

  Domain domain_;
  std::vector<BoundarySample> boundary_;
  // MFS data (marker curves)
  std::vector<Complex> charges_;
  Eigen::MatrixXd mfs_U_, mfs_V_;
  Eigen::VectorXd mfs_sv_;
  mutable bool g1_fit_ready_ = false;
  mutable Eigen::VectorXd g1_charges_;
  mutable std::map<const void*, std::vector<double>> g1_cache_;
  mutable std::map<const void*, Eigen::MatrixXd> charge_cache_;
  mutable std::map<const void*, Eigen::MatrixXd> psi_cache_;
};

/// Boundary normal derivative of a field with known Laplacian via the
/// reproducing identity d_n f(zeta) = int_D (Delta f)(z) P(z, zeta) dA(z),
/// valid for f vanishing on the boundary.
double normal_derivative_via_lemma(const GreenKernel& kernel, const FieldSample& lap_f,
                                   const BoundarySample& zeta);

}  // namespace ellgrow

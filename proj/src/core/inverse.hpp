#pragma once

#include <Eigen/Core>
#include <Eigen/SVD>
#include <memory>
#include <span>
#include <vector>

#include "core/geometry.hpp"
#include "core/green.hpp"
#include "core/quadrature.hpp"

namespace ellgrow {

/// Dense discretization of A u(zeta) = int_D u(z) g(z,w) P(z,zeta) dA(z),
/// mapping area-node coefficients to boundary-node values.
///
/// `base` holds the raw kernel entries wt_j * g_w(z_j) * P(z_j, zeta_i),
/// every one of them <= 0.  `correction` carries the singular-mass and
/// angular ring-mass repair terms of the corrected quadrature; with it,
/// (base + correction) * u reproduces the corrected integral of u g_w P
/// row by row.  Rows are weighted by ds for boundary inner products and
/// columns by wt for area inner products.
struct OperatorA {
  Complex w;
  Eigen::MatrixXd base;
  Eigen::MatrixXd correction;
  Eigen::VectorXd ds;
  Eigen::VectorXd wt;

  int rows() const { return static_cast<int>(base.rows()); }
  int cols() const { return static_cast<int>(base.cols()); }
  Eigen::MatrixXd matrix() const { return base + correction; }

  // SVD of Db^{1/2} (base+correction) Da^{-1/2}, computed once on demand.
  const Eigen::BDCSVD<Eigen::MatrixXd>& weighted_svd() const;
  mutable std::shared_ptr<Eigen::BDCSVD<Eigen::MatrixXd>> svd_cache;
};

struct SpectrumReport {
  std::vector<double> singular_values;  // descending
  double condition = 0.0;
  int rank = 0;           // count above 1e-12 * sigma_max
  bool degenerate = false;  // largest singular value is exactly zero
};

struct TikhonovSolution {
  std::vector<double> u;  // area-node coefficients
  double residual_l2 = 0.0;  // |Au - v|_L2(ds) / |v|_L2(ds)
  double residual_l1 = 0.0;  // |Au - v|_L1(ds) / |v|_L1(ds)
  std::vector<double> u_nonneg;  // max(u, 0)
  double residual_l2_nonneg = 0.0;
  double residual_l1_nonneg = 0.0;
};

/// Assemble the operator on the kernel's boundary samples (rows) and the
/// nodes of a polar area rule (columns).  The rule must be built with
/// singularity w so the corrected row sums match the integral family.
OperatorA assemble(const GreenKernel& kernel, const AreaRule& rule, Complex w);

std::vector<double> apply(const OperatorA& op, std::span<const double> u);

/// A* v = Da^{-1} K^T Db v, the adjoint under the weighted inner products.
std::vector<double> apply_adjoint(const OperatorA& op, std::span<const double> v);

SpectrumReport spectrum(const OperatorA& op);

/// Minimize |Au - v|^2_L2(ds) + alpha |u|^2_L2(wt) by SVD filtering with
/// factors sigma/(sigma^2 + alpha), then re-report after clipping u at 0.
TikhonovSolution solve_tikhonov(const OperatorA& op, std::span<const double> target,
                                double alpha);

}  // namespace ellgrow

#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "core/geometry.hpp"

namespace ellgrow {

class GreenKernel;

/// Area quadrature rule over a domain. Disk and conformal domains use a
/// tensor rule, Gauss-Legendre in radius times trapezoid in angle, with the
/// conformal Jacobian |phi'|^2 folded into the weights; marker curves use a
/// refined triangulation of the polygon with the one-point centroid rule.
struct AreaRule {
  std::vector<Complex> nodes;    // physical positions
  std::vector<double> weights;   // positive area weights
  std::optional<Complex> singularity;

  /// Tensor metadata, present for disk/conformal rules. Node (i, j) sits at
  /// index i * n_angular + j with unit-disk preimage r[i] * e^{i theta_j}.
  struct PolarMesh {
    int n_radial = 0;
    int n_angular = 0;
    std::vector<double> r;   // Gauss-Legendre nodes on (0, 1)
    std::vector<double> wr;  // matching weights
    double theta0 = 0.0;
    std::vector<Complex> preimage;
  };
  std::optional<PolarMesh> polar;

  size_t size() const { return nodes.size(); }
  double total_weight() const;
};

/// Scalar field sampled on the nodes of a shared area rule.
struct FieldSample {
  std::shared_ptr<const AreaRule> rule;
  std::vector<double> values;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

/// Build an area rule. For disk/conformal domains n_radial x n_angular is the
/// tensor resolution; for marker curves the product steers the triangle
/// subdivision depth. If a singular point w is supplied, the construction
/// guarantees no node coincides with it.
AreaRule area_rule(const Domain& domain, int n_radial, int n_angular,
                   std::optional<Complex> singularity = std::nullopt);

/// Plain weighted sum of node values.
double integrate(const AreaRule& rule, std::span<const double> f);

/// Integral of f(z) * g_w(z) over the domain with the logarithmic
/// singularity at w subtracted:
///   sum_j wt_j (f_j - f(w)) g_w(z_j) + f(w) * G1(w),   G1(w) = int g_w dA.
double integrate_with_log_singularity(const AreaRule& rule, const GreenKernel& kernel,
                                      std::span<const double> f, double f_at_w,
                                      Complex w);

}  // namespace ellgrow

#pragma once

#include <functional>

#include "core/geometry.hpp"

namespace ellgrow {

/// Modified Bessel I0 by power series, for 0 <= x <= 5 (OracleError outside).
double bessel_I0(double x);
/// Independent I0 via (1/pi) int_0^pi exp(x cos t) dt, Simpson rule.
double bessel_I0_integral(double x);
/// Radial boundary flux of the perturbed disk Green function at eps, source 0.
double bessel_flux(double eps);

/// Node-centered polar grid field on the unit disk: one axis value plus
/// rings at r_i = i/n_r, i = 1..n_r-1, each with n_t equispaced angles,
/// and an optional boundary row (zero when empty).
struct PolarGridField {
  int n_r = 0;
  int n_t = 0;
  double center = 0.0;
  std::vector<double> ring;  // (n_r-1) rows of n_t values
  std::vector<double> bnd;   // boundary row; empty means homogeneous zero

  double value(int i, int j) const;  // i = 0 is the axis; i up to n_r-1
  double eval(Complex z) const;      // bilinear in (r, theta)
  /// One-sided second-order d_r at r=1 for each boundary angle.
  std::vector<double> radial_derivative_at_boundary() const;
  std::vector<double> boundary_angles() const;
};

/// Regular part h of g* = g_w + h for Delta - q on the unit disk:
/// Delta h - q h = q g_w, h = 0 on the boundary. Five-point polar stencil,
/// axis closed by a center unknown, sparse direct solve.
PolarGridField fd_green(int n_r, int n_t, const std::function<double(Complex)>& q,
                        Complex w);

/// Boundary flux d_n g* per angle: analytic d_n g_w plus the one-sided
/// difference of h.
std::vector<double> fd_green_flux(const PolarGridField& h, Complex w);

/// Divergence-form oracle for div(lambda grad G) = delta_w:
/// G = g_w / lambda(w) + h with div(lambda grad h) =
/// -(grad lambda . grad g_w)/lambda(w), h = 0 on the boundary.
/// Flux-conservative stencil with edge-midpoint lambda.
PolarGridField fd_beltrami_green(int n_r, int n_t,
                                 const std::function<double(Complex)>& lambda,
                                 const std::function<Complex(Complex)>& grad_lambda,
                                 Complex w);
/// Full G at a point (adds the analytic part to the stored correction).
double fd_beltrami_eval(const PolarGridField& h,
                        const std::function<double(Complex)>& lambda, Complex w,
                        Complex z);

/// Harmonic part of the disk Green function by a Laplace solve with boundary
/// data -(1/2pi) ln|zeta - w|; fd_harmonic_eval adds the free-space log back.
PolarGridField fd_harmonic_green(int n_r, int n_t, Complex w);
double fd_harmonic_eval(const PolarGridField& h, Complex w, Complex z);

/// Gradient of the disk Green function (used for divergence-form sources).
Complex grad_green_disk(Complex z, Complex w);

}  // namespace ellgrow

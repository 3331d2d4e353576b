#include "core/growth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/errors.hpp"

namespace ellgrow {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double polygon_perimeter(const std::vector<Complex>& pts) {
  double p = 0.0;
  for (size_t i = 0; i < pts.size(); ++i)
    p += std::abs(pts[(i + 1) % pts.size()] - pts[i]);
  return p;
}

GrowthState state_from_points(std::vector<Complex> pts, double t, int step_count,
                              double spacing) {
  const double area = polygon_signed_area(pts);
  const double perim = polygon_perimeter(pts);
  return GrowthState{t, step_count, Domain::curve(std::move(pts)), area, perim, spacing};
}

}  // namespace

std::vector<Complex> resample_closed(const std::vector<Complex>& pts, int n_new) {
  const CubicPeriodicSpline spline(pts);
  const int over = 8 * static_cast<int>(pts.size());
  std::vector<double> cum(over + 1, 0.0);
  std::vector<Complex> dense(over + 1);
  for (int k = 0; k <= over; ++k) dense[k] = spline.eval(kTwoPi * k / over);
  for (int k = 1; k <= over; ++k) cum[k] = cum[k - 1] + std::abs(dense[k] - dense[k - 1]);
  const double total = cum[over];
  std::vector<Complex> out(n_new);
  int seg = 0;
  for (int i = 0; i < n_new; ++i) {
    const double target = total * i / n_new;
    while (seg < over - 1 && cum[seg + 1] < target) ++seg;
    const double span = cum[seg + 1] - cum[seg];
    const double frac = span > 0 ? (target - cum[seg]) / span : 0.0;
    out[i] = spline.eval(kTwoPi * (seg + frac) / over);
  }
  return out;
}

std::vector<double> velocity_field(const GrowthState& state, const GrowthParams& params) {
  const Domain& dom = state.domain;
  const int n = static_cast<int>(dom.points().size());
  const GreenKernel kernel(dom, n);
  const auto& bnd = kernel.boundary();
  std::vector<double> v(n);

  switch (params.op) {
    case GrowthOperator::Laplace: {
      for (int j = 0; j < n; ++j) v[j] = kernel.poisson(params.w, bnd[j]);
      break;
    }
    case GrowthOperator::Schrodinger: {
      const AreaRule rule =
          area_rule(dom, params.quad_radial, params.quad_angular, params.w);
      const SchrodingerGreen sg =
          solve_series(kernel, rule, params.u, params.eps, params.w);
      for (int j = 0; j < n; ++j) v[j] = normal_derivative_exact(sg, bnd[j]);
      break;
    }
    case GrowthOperator::Beltrami: {
      const AreaRule rule =
          area_rule(dom, params.quad_radial, params.quad_angular, params.w);
      const BeltramiSetup setup = beltrami_setup(kernel, rule, params.u, params.eps);
      const BeltramiGreen bg = beltrami_green_star(setup, params.w);
      for (int j = 0; j < n; ++j) v[j] = beltrami_normal_derivative(setup, bg, bnd[j]);
      break;
    }
  }
  for (double x : v)
    if (x < -1e-8) throw GrowthSignError("inward boundary velocity computed");
  return v;
}

GrowthState growth_init(const Domain& initial, const GrowthParams& params) {
  if (initial.kind() != Domain::Kind::Curve)
    throw InputError("growth needs a marker-curve domain");
  if (!initial.contains(params.w)) throw InputError("source lies outside the initial domain");
  const std::vector<Complex>& pts = initial.points();
  const double spacing = polygon_perimeter(pts) / static_cast<double>(pts.size());
  return state_from_points(pts, 0.0, 0, spacing);
}

GrowthState growth_step(const GrowthState& state, const GrowthParams& params, double dt) {
  if (dt < 0.0) throw InputError("growth step needs dt >= 0");
  if (dt == 0.0) return state;
  const std::vector<double> v = velocity_field(state, params);
  const std::vector<BoundarySample> bnd =
      state.domain.boundary_samples(static_cast<int>(state.domain.points().size()));
  std::vector<Complex> moved(bnd.size());
  for (size_t j = 0; j < bnd.size(); ++j)
    moved[j] = bnd[j].position + dt * v[j] * bnd[j].normal;

  int n_new = static_cast<int>(std::lround(polygon_perimeter(moved) / state.spacing));
  n_new = std::max(n_new, 32);
  if (n_new % 2) ++n_new;
  std::vector<Complex> pts = resample_closed(moved, n_new);

  if (!polyline_is_simple(pts)) throw TopologyError("boundary self-intersects after a step");
  for (const Complex& p : state.domain.points())
    if (winding_number(pts, p) != 1)
      throw TopologyError("step broke the nesting of the domains");
  GrowthState next = state_from_points(std::move(pts), state.t + dt,
                                       state.step_count + 1, state.spacing);
  if (!next.domain.contains(params.w))
    throw TopologyError("source left the domain during growth");
  return next;
}

std::vector<Snapshot> growth_run(const Domain& initial, const GrowthParams& params) {
  if (params.dt <= 0.0) throw InputError("growth run needs dt > 0");
  if (params.t_end < 0.0) throw InputError("growth run needs t_end >= 0");
  GrowthState state = growth_init(initial, params);
  const int steps = static_cast<int>(std::lround(params.t_end / params.dt));
  std::vector<Snapshot> out;
  auto record = [&](const GrowthState& s) {
    out.push_back({s.t, s.area, s.perimeter, s.domain.points()});
  };
  record(state);
  for (int k = 1; k <= steps; ++k) {
    state = growth_step(state, params, params.dt);
    const int stride = std::max(params.snapshot_stride, 1);
    if (k % stride == 0 || k == steps) record(state);
  }
  return out;
}

}  // namespace ellgrow

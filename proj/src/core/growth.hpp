#pragma once

#include "core/beltrami.hpp"

namespace ellgrow {

enum class GrowthOperator { Laplace, Schrodinger, Beltrami };

struct GrowthParams {
  GrowthOperator op = GrowthOperator::Laplace;
  UField u;  // ignored for Laplace
  double eps = 0.0;
  Complex w{0, 0};
  double dt = 1e-3;
  double t_end = 1.0;
  int snapshot_stride = 10;
  // marker-domain quadrature density for the perturbed operators
  int quad_radial = 24;
  int quad_angular = 48;
};

struct GrowthState {
  double t = 0.0;
  int step_count = 0;
  Domain domain;  // marker curve
  double area = 0.0;
  double perimeter = 0.0;
  double spacing = 0.0;  // target arclength spacing kept from the start
};

struct Snapshot {
  double t = 0.0;
  double area = 0.0;
  double perimeter = 0.0;
  std::vector<Complex> points;
};

/// Outward normal speed d_n g*_w at every marker of the current curve.
/// Any value below -1e-8 raises GrowthSignError.
std::vector<double> velocity_field(const GrowthState& state, const GrowthParams& params);

GrowthState growth_init(const Domain& initial, const GrowthParams& params);

/// One explicit Euler step followed by equal-arclength resampling at the
/// state's target spacing. Self-intersection or loss of nesting raises
/// TopologyError.
GrowthState growth_step(const GrowthState& state, const GrowthParams& params, double dt);

std::vector<Snapshot> growth_run(const Domain& initial, const GrowthParams& params);

/// Equal-arclength resampling of a closed marker polygon through a periodic
/// cubic spline.
std::vector<Complex> resample_closed(const std::vector<Complex>& pts, int n_new);

}  // namespace ellgrow

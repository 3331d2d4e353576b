#pragma once

// Shared fixtures and small reference integrators for the test suites.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "core/geometry.hpp"

namespace testutil {

using ellgrow::Complex;
using ellgrow::Domain;

inline constexpr double kPi = std::numbers::pi;

// Conformal benchmark domain, image of the disk under w + 0.1 w^2.
inline Domain pear() {
  return Domain::conformal({Complex(1.0, 0.0), Complex(0.1, 0.0)});
}

// Smooth star-shaped marker curve r(t) = 1 + a3 cos 3t + a5 sin 5t.
inline std::vector<Complex> blob_points(int n, double a3 = 0.12, double a5 = 0.0) {
  std::vector<Complex> pts(n);
  for (int j = 0; j < n; ++j) {
    const double t = 2.0 * kPi * j / n;
    pts[j] = std::polar(1.0 + a3 * std::cos(3 * t) + a5 * std::sin(5 * t), t);
  }
  return pts;
}

inline std::vector<Complex> circle_points(int n, double radius = 1.0,
                                          Complex center = {0, 0}) {
  std::vector<Complex> pts(n);
  for (int j = 0; j < n; ++j)
    pts[j] = center + std::polar(radius, 2.0 * kPi * j / n);
  return pts;
}

// Composite Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int panels) {
  const double h = (b - a) / (2 * panels);
  double s = f(a) + f(b);
  for (int i = 1; i < 2 * panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Modified Bessel I0 by its power series; reference-grade for x <= 6.
inline double i0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= q / (k * k);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

}  // namespace testutil

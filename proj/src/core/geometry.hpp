#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace ellgrow {

using Complex = std::complex<double>;

inline double dot(Complex a, Complex b) { return a.real() * b.real() + a.imag() * b.imag(); }
inline double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

/// One node of a boundary discretization: parameter, position, outward unit
/// normal and the arclength weight it carries in boundary quadrature.
struct BoundarySample {
  double t = 0.0;
  Complex position;
  Complex normal;
  double ds = 0.0;
};

/// Periodic cubic interpolant through n points at parameters 2*pi*i/n.
/// Used for marker-curve sampling and for arclength resampling during growth.
class CubicPeriodicSpline {
 public:
  explicit CubicPeriodicSpline(std::vector<Complex> points);
  Complex eval(double t) const;
  Complex deriv(double t) const;
  int size() const { return static_cast<int>(pts_.size()); }

 private:
  std::vector<Complex> pts_;
  std::vector<Complex> m_;  // second derivatives at the knots
  double h_ = 0.0;
};

/// A bounded planar domain with smooth boundary. Three representations:
/// the open unit disk, the image of the unit disk under a polynomial
/// conformal map z = c_1 w + ... + c_m w^m with c_1 real positive, or the
/// region enclosed by a simple closed positively oriented marker curve.
class Domain {
 public:
  enum class Kind { Disk, Conformal, Curve };

  static Domain disk();
  static Domain conformal(std::vector<Complex> coeffs);
  static Domain curve(std::vector<Complex> points);

  Kind kind() const { return kind_; }
  const std::vector<Complex>& coeffs() const { return coeffs_; }
  const std::vector<Complex>& points() const { return points_; }

  /// True iff z lies in the open domain.
  bool contains(Complex z) const;

  /// n boundary nodes equispaced in the curve parameter.
  std::vector<BoundarySample> boundary_samples(int n) const;

  // Conformal map, its derivative, and its Newton inverse. The map is the
  // identity for the disk; calling these on a marker curve is an error.
  Complex map(Complex w) const;
  Complex map_deriv(Complex w) const;
  Complex map_inverse(Complex z) const;

  /// Reference interior point: 0 for disk and conformal images, the vertex
  /// centroid for marker curves.
  Complex reference_point() const;

  /// Shoelace area of the marker polygon (Kind::Curve only).
  double polygon_area() const;

  std::string to_json() const;
  static Domain from_json(const std::string& text);

 private:
  Domain() = default;
  Kind kind_ = Kind::Disk;
  std::vector<Complex> coeffs_;
  std::vector<Complex> points_;
};

/// True if the closed polyline has no self-intersections.
bool polyline_is_simple(const std::vector<Complex>& pts);

/// Winding number of the closed polyline around z.
int winding_number(const std::vector<Complex>& pts, Complex z);

double polygon_signed_area(const std::vector<Complex>& pts);

}  // namespace ellgrow

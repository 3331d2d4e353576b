#include "core/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/green.hpp"

namespace ellgrow {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Tri {
  Complex a, b, c;
  double area() const { return 0.5 * cross(b - a, c - a); }
  Complex centroid() const { return (a + b + c) / 3.0; }
};

// Ear clipping of a simple positively oriented polygon.
std::vector<Tri> triangulate(const std::vector<Complex>& poly) {
  std::vector<int> idx(poly.size());
  for (size_t i = 0; i < poly.size(); ++i) idx[i] = static_cast<int>(i);
  std::vector<Tri> tris;
  auto inside_tri = [](Complex a, Complex b, Complex c, Complex p) {
    const double d1 = cross(b - a, p - a);
    const double d2 = cross(c - b, p - b);
    const double d3 = cross(a - c, p - c);
    return d1 >= 0 && d2 >= 0 && d3 >= 0;
  };
  int guard = 0;
  while (idx.size() > 3) {
    if (++guard > 4 * static_cast<int>(poly.size()) * static_cast<int>(poly.size()))
      throw QuadratureError("triangulation failed (polygon may be degenerate)");
    bool clipped = false;
    const int m = static_cast<int>(idx.size());
    for (int i = 0; i < m; ++i) {
      const Complex a = poly[idx[(i + m - 1) % m]];
      const Complex b = poly[idx[i]];
      const Complex c = poly[idx[(i + 1) % m]];
      if (cross(b - a, c - b) <= 1e-16) continue;  // reflex or flat corner
      bool ear = true;
      for (int k = 0; k < m; ++k) {
        if (k == i || k == (i + m - 1) % m || k == (i + 1) % m) continue;
        if (inside_tri(a, b, c, poly[idx[k]])) {
          ear = false;
          break;
        }
      }
      if (!ear) continue;
      tris.push_back({a, b, c});
      idx.erase(idx.begin() + i);
      clipped = true;
      break;
    }
    if (!clipped) throw QuadratureError("triangulation found no ear");
  }
  tris.push_back({poly[idx[0]], poly[idx[1]], poly[idx[2]]});
  return tris;
}

void subdivide(const Tri& t, int level, std::vector<Tri>& out) {
  if (level == 0) {
    out.push_back(t);
    return;
  }
  const Complex ab = 0.5 * (t.a + t.b), bc = 0.5 * (t.b + t.c), ca = 0.5 * (t.c + t.a);
  subdivide({t.a, ab, ca}, level - 1, out);
  subdivide({ab, t.b, bc}, level - 1, out);
  subdivide({ca, bc, t.c}, level - 1, out);
  subdivide({ab, bc, ca}, level - 1, out);
}

AreaRule polar_rule(const Domain& domain, int n_radial, int n_angular,
                    std::optional<Complex> singularity, double theta0) {
  AreaRule rule;
  AreaRule::PolarMesh mesh;
  mesh.n_radial = n_radial;
  mesh.n_angular = n_angular;
  mesh.theta0 = theta0;
  std::vector<double> x, w;
  gauss_legendre(n_radial, x, w);
  mesh.r.resize(n_radial);
  mesh.wr.resize(n_radial);
  for (int i = 0; i < n_radial; ++i) {
    mesh.r[i] = 0.5 * (x[i] + 1.0);
    mesh.wr[i] = 0.5 * w[i];
  }
  const double dth = kTwoPi / n_angular;
  const bool conformal = domain.kind() == Domain::Kind::Conformal;
  rule.nodes.reserve(static_cast<size_t>(n_radial) * n_angular);
  rule.weights.reserve(rule.nodes.capacity());
  mesh.preimage.reserve(rule.nodes.capacity());
  for (int i = 0; i < n_radial; ++i) {
    for (int j = 0; j < n_angular; ++j) {
      const Complex a = std::polar(mesh.r[i], theta0 + j * dth);
      double wt = mesh.wr[i] * mesh.r[i] * dth;
      if (conformal) {
        const Complex dphi = domain.map_deriv(a);
        wt *= std::norm(dphi);
        rule.nodes.push_back(domain.map(a));
      } else {
        rule.nodes.push_back(a);
      }
      mesh.preimage.push_back(a);
      rule.weights.push_back(wt);
    }
  }
  rule.polar = std::move(mesh);
  rule.singularity = singularity;
  return rule;
}

}  // namespace

double AreaRule::total_weight() const {
  double s = 0.0;
  for (const double w : weights) s += w;
  return s;
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

AreaRule area_rule(const Domain& domain, int n_radial, int n_angular,
                   std::optional<Complex> singularity) {
  if (n_radial < 8 || n_angular < 8)
    throw QuadratureError("area_rule: resolution must be at least 8 x 8");
  if (singularity && !domain.contains(*singularity))
    throw QuadratureError("area_rule: singular point lies outside the domain");

  if (domain.kind() != Domain::Kind::Curve) {
    AreaRule rule = polar_rule(domain, n_radial, n_angular, singularity, 0.0);
    if (singularity) {
      double dmin = std::numeric_limits<double>::max();
      for (const Complex z : rule.nodes) dmin = std::min(dmin, std::abs(z - *singularity));
      if (dmin < 1e-10) {
        // Rotate the angular grid half a cell so w falls between nodes.
        rule = polar_rule(domain, n_radial, n_angular, singularity,
                          M_PI / n_angular);
      }
    }
    return rule;
  }

  const auto& poly = domain.points();
  std::vector<Tri> base = triangulate(poly);
  const double target = std::max(static_cast<double>(base.size()),
                                 0.5 * n_radial * n_angular);
  int level = 0;
  while (level < 5 && base.size() * std::pow(4.0, level) < target) ++level;
  std::vector<Tri> tris;
  tris.reserve(base.size() * static_cast<size_t>(std::pow(4.0, level)));
  for (const Tri& t : base) subdivide(t, level, tris);

  AreaRule rule;
  rule.singularity = singularity;
  rule.nodes.reserve(tris.size());
  rule.weights.reserve(tris.size());
  for (const Tri& t : tris) {
    const double a = t.area();
    if (a <= 0.0) continue;  // degenerate sliver
    Complex c = t.centroid();
    if (singularity && std::abs(c - *singularity) < 1e-10)
      c = 0.5 * (c + t.a);  // nudge off the singular point, stays inside
    rule.nodes.push_back(c);
    rule.weights.push_back(a);
  }
  return rule;
}

double integrate(const AreaRule& rule, std::span<const double> f) {
  if (f.size() != rule.size())
    throw ShapeError("integrate: field and rule sizes differ");
  double s = 0.0;
  for (size_t j = 0; j < f.size(); ++j) s += rule.weights[j] * f[j];
  return s;
}

double integrate_with_log_singularity(const AreaRule& rule, const GreenKernel& kernel,
                                      std::span<const double> f, double f_at_w,
                                      Complex w) {
  if (f.size() != rule.size())
    throw ShapeError("integrate_with_log_singularity: field and rule sizes differ");
  if (!kernel.domain().contains(w))
    throw QuadratureError("integrate_with_log_singularity: w outside the domain");
  const std::vector<double> gw = kernel.green_on(rule, w);
  double s = 0.0;
  for (size_t j = 0; j < f.size(); ++j) {
    if (std::abs(rule.nodes[j] - w) < 1e-13) continue;  // limit of (f - f(w)) log is 0
    s += rule.weights[j] * (f[j] - f_at_w) * gw[j];
  }
  return s + f_at_w * kernel.g1(w);
}

}  // namespace ellgrow

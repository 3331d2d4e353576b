#include "core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "json.hpp"

namespace ellgrow {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Tridiagonal solve with constant bands (sub=1, sup=1), diag given per row.
std::vector<Complex> solve_tridiag(const std::vector<double>& diag,
                                   std::vector<Complex> rhs) {
  const int n = static_cast<int>(rhs.size());
  std::vector<double> c(n, 0.0);
  c[0] = 1.0 / diag[0];
  rhs[0] /= diag[0];
  for (int i = 1; i < n; ++i) {
    const double m = diag[i] - c[i - 1];
    c[i] = 1.0 / m;
    rhs[i] = (rhs[i] - rhs[i - 1]) / m;
  }
  for (int i = n - 2; i >= 0; --i) rhs[i] -= c[i] * rhs[i + 1];
  return rhs;
}

// Cyclic tridiagonal system (1, 4, 1) with wrap-around corners, via
// Sherman-Morrison on top of the plain tridiagonal solve.
std::vector<Complex> solve_cyclic_141(const std::vector<Complex>& d) {
  const int n = static_cast<int>(d.size());
  const double b = 4.0, gamma = -b;
  std::vector<double> diag(n, b);
  diag[0] = b - gamma;
  diag[n - 1] = b - 1.0 / gamma;
  std::vector<Complex> x = solve_tridiag(diag, d);
  std::vector<Complex> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = 1.0;
  std::vector<Complex> z = solve_tridiag(diag, u);
  const Complex fact =
      (x[0] + x[n - 1] / gamma) / (1.0 + z[0].real() + z[n - 1].real() / gamma);
  for (int i = 0; i < n; ++i) x[i] -= fact * z[i];
  return x;
}

bool segments_intersect(Complex p1, Complex p2, Complex q1, Complex q2) {
  const double d1 = cross(p2 - p1, q1 - p1);
  const double d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1);
  const double d4 = cross(q2 - q1, p2 - q1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  auto on_segment = [](Complex a, Complex b, Complex p) {
    return std::min(a.real(), b.real()) - 1e-15 <= p.real() &&
           p.real() <= std::max(a.real(), b.real()) + 1e-15 &&
           std::min(a.imag(), b.imag()) - 1e-15 <= p.imag() &&
           p.imag() <= std::max(a.imag(), b.imag()) + 1e-15;
  };
  if (d1 == 0 && on_segment(p1, p2, q1)) return true;
  if (d2 == 0 && on_segment(p1, p2, q2)) return true;
  if (d3 == 0 && on_segment(q1, q2, p1)) return true;
  if (d4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

}  // namespace

CubicPeriodicSpline::CubicPeriodicSpline(std::vector<Complex> points)
    : pts_(std::move(points)) {
  const int n = size();
  if (n < 3) throw GeometryError("spline needs at least 3 points");
  h_ = kTwoPi / n;
  std::vector<Complex> d(n);
  for (int i = 0; i < n; ++i) {
    const Complex ym = pts_[(i + n - 1) % n], y0 = pts_[i], yp = pts_[(i + 1) % n];
    d[i] = 6.0 * (ym - 2.0 * y0 + yp) / (h_ * h_);
  }
  m_ = solve_cyclic_141(d);
}

Complex CubicPeriodicSpline::eval(double t) const {
  const int n = size();
  double s = std::fmod(t, kTwoPi);
  if (s < 0) s += kTwoPi;
  int i = static_cast<int>(std::floor(s / h_));
  if (i >= n) i = n - 1;
  const double a = s - i * h_, b = h_ - a;
  const Complex y0 = pts_[i], y1 = pts_[(i + 1) % n];
  const Complex m0 = m_[i], m1 = m_[(i + 1) % n];
  return m0 * (b * b * b) / (6.0 * h_) + m1 * (a * a * a) / (6.0 * h_) +
         (y0 / h_ - m0 * h_ / 6.0) * b + (y1 / h_ - m1 * h_ / 6.0) * a;
}

Complex CubicPeriodicSpline::deriv(double t) const {
  const int n = size();
  double s = std::fmod(t, kTwoPi);
  if (s < 0) s += kTwoPi;
  int i = static_cast<int>(std::floor(s / h_));
  if (i >= n) i = n - 1;
  const double a = s - i * h_, b = h_ - a;
  const Complex y0 = pts_[i], y1 = pts_[(i + 1) % n];
  const Complex m0 = m_[i], m1 = m_[(i + 1) % n];
  return -m0 * (b * b) / (2.0 * h_) + m1 * (a * a) / (2.0 * h_) +
         (y1 - y0) / h_ - (m1 - m0) * h_ / 6.0;
}

bool polyline_is_simple(const std::vector<Complex>& pts) {
  const int n = static_cast<int>(pts.size());
  for (int i = 0; i < n; ++i) {
    const Complex a1 = pts[i], a2 = pts[(i + 1) % n];
    for (int j = i + 1; j < n; ++j) {
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_intersect(a1, a2, pts[j], pts[(j + 1) % n])) return false;
    }
  }
  return true;
}

int winding_number(const std::vector<Complex>& pts, Complex z) {
  const int n = static_cast<int>(pts.size());
  int wn = 0;
  for (int i = 0; i < n; ++i) {
    const Complex a = pts[i], b = pts[(i + 1) % n];
    if (a.imag() <= z.imag()) {
      if (b.imag() > z.imag() && cross(b - a, z - a) > 0) ++wn;
    } else {
      if (b.imag() <= z.imag() && cross(b - a, z - a) < 0) --wn;
    }
  }
  return wn;
}

double polygon_signed_area(const std::vector<Complex>& pts) {
  const int n = static_cast<int>(pts.size());
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += cross(pts[i], pts[(i + 1) % n]);
  return 0.5 * s;
}

Domain Domain::disk() {
  Domain d;
  d.kind_ = Kind::Disk;
  return d;
}

Domain Domain::conformal(std::vector<Complex> coeffs) {
  if (coeffs.empty()) throw GeometryError("conformal map needs coefficients");
  const Complex c1 = coeffs.front();
  if (std::abs(c1.imag()) > 1e-12 * std::max(1.0, std::abs(c1)) || c1.real() <= 0.0)
    throw GeometryError("leading conformal coefficient must be real positive");
  Domain d;
  d.kind_ = Kind::Conformal;
  d.coeffs_ = std::move(coeffs);
  // The map must be locally invertible on the closed disk.
  double min_deriv = std::numeric_limits<double>::max();
  for (int ir = 0; ir <= 10; ++ir) {
    const double r = ir / 10.0;
    const int na = (ir == 10) ? 2048 : 256;
    for (int j = 0; j < na; ++j) {
      const Complex a = std::polar(r, kTwoPi * j / na);
      min_deriv = std::min(min_deriv, std::abs(d.map_deriv(a)));
    }
    if (ir == 0) continue;
  }
  if (min_deriv <= 1e-8)
    throw GeometryError("conformal map derivative vanishes on the closed disk");
  return d;
}

Domain Domain::curve(std::vector<Complex> points) {
  const int n = static_cast<int>(points.size());
  if (n < 8) throw GeometryError("marker curve needs at least 8 points");
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += std::abs(points[(i + 1) % n] - points[i]);
  mean /= n;
  if (mean < 1e-14) throw GeometryError("marker curve is degenerate");
  for (int i = 0; i < n; ++i) {
    const double d = std::abs(points[(i + 1) % n] - points[i]);
    if (d > 3.0 * mean || d < mean / 3.0)
      throw GeometryError("marker spacing departs from the mean by more than 3x");
  }
  if (polygon_signed_area(points) <= 0.0)
    throw GeometryError("marker curve must be positively oriented");
  if (!polyline_is_simple(points))
    throw GeometryError("marker curve self-intersects");
  Domain d;
  d.kind_ = Kind::Curve;
  d.points_ = std::move(points);
  return d;
}

Complex Domain::map(Complex w) const {
  if (kind_ == Kind::Disk) return w;
  if (kind_ != Kind::Conformal) throw GeometryError("map: not a conformal domain");
  Complex acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = (acc + *it) * w;
  return acc;
}

Complex Domain::map_deriv(Complex w) const {
  if (kind_ == Kind::Disk) return 1.0;
  if (kind_ != Kind::Conformal) throw GeometryError("map_deriv: not a conformal domain");
  Complex acc = 0.0;
  const int m = static_cast<int>(coeffs_.size());
  for (int k = m; k >= 1; --k) acc = acc * w + static_cast<double>(k) * coeffs_[k - 1];
  return acc;
}

Complex Domain::map_inverse(Complex z) const {
  if (kind_ == Kind::Disk) return z;
  if (kind_ != Kind::Conformal)
    throw GeometryError("map_inverse: not a conformal domain");
  const double scale = 1.0 + std::abs(z);
  auto newton = [&](Complex a) -> std::optional<Complex> {
    for (int it = 0; it < 80; ++it) {
      const Complex f = map(a) - z;
      if (std::abs(f) <= 1e-13 * scale) return a;
      const Complex df = map_deriv(a);
      if (std::abs(df) < 1e-14) return std::nullopt;
      a -= f / df;
      if (std::abs(a) > 1.3) a *= 1.1 / std::abs(a);
    }
    return std::nullopt;
  };
  std::vector<Complex> starts;
  starts.push_back(z / coeffs_.front());
  if (std::abs(starts.back()) > 0.98) starts.back() *= 0.98 / std::abs(starts.back());
  starts.push_back(0.0);
  for (int k = 0; k < 16; ++k)
    starts.push_back(std::polar(k < 8 ? 0.4 : 0.85, kTwoPi * (k % 8) / 8.0));
  for (const Complex s : starts) {
    const auto a = newton(s);
    if (a && std::abs(*a) <= 1.0 + 1e-6) return *a;
  }
  throw GeometryError("map_inverse: Newton iteration found no preimage in the closed disk");
}

bool Domain::contains(Complex z) const {
  switch (kind_) {
    case Kind::Disk:
      return std::abs(z) < 1.0;
    case Kind::Conformal: {
      // Winding of the image of the unit circle decides membership; the
      // Newton preimage confirms it for interior points.
      static thread_local std::vector<Complex> cache;
      static thread_local const Domain* cached_for = nullptr;
      if (cached_for != this || cache.empty()) {
        cache.resize(2048);
        for (int j = 0; j < 2048; ++j) cache[j] = map(std::polar(1.0, kTwoPi * j / 2048));
        cached_for = this;
      }
      if (winding_number(cache, z) != 1) return false;
      const Complex a = map_inverse(z);
      return std::abs(a) < 1.0;
    }
    case Kind::Curve:
      return winding_number(points_, z) == 1;
  }
  return false;
}

std::vector<BoundarySample> Domain::boundary_samples(int n) const {
  if (n < 4) throw GeometryError("boundary_samples: need at least 4 nodes");
  std::vector<BoundarySample> out(n);
  const double dt = kTwoPi / n;
  switch (kind_) {
    case Kind::Disk:
      for (int j = 0; j < n; ++j) {
        const Complex e = std::polar(1.0, j * dt);
        out[j] = {j * dt, e, e, dt};
      }
      break;
    case Kind::Conformal:
      for (int j = 0; j < n; ++j) {
        const double t = j * dt;
        const Complex e = std::polar(1.0, t);
        const Complex tangent = Complex(0, 1) * e * map_deriv(e);
        const double speed = std::abs(tangent);
        out[j] = {t, map(e), -Complex(0, 1) * tangent / speed, speed * dt};
      }
      break;
    case Kind::Curve: {
      const CubicPeriodicSpline s(points_);
      for (int j = 0; j < n; ++j) {
        const double t = j * dt;
        const Complex tangent = s.deriv(t);
        const double speed = std::abs(tangent);
        if (speed < 1e-14) throw GeometryError("marker curve tangent vanishes");
        out[j] = {t, s.eval(t), -Complex(0, 1) * tangent / speed, speed * dt};
      }
      break;
    }
  }
  return out;
}

Complex Domain::reference_point() const {
  if (kind_ != Kind::Curve) return 0.0;
  Complex c = 0.0;
  for (const Complex p : points_) c += p;
  return c / static_cast<double>(points_.size());
}

double Domain::polygon_area() const {
  if (kind_ != Kind::Curve) throw GeometryError("polygon_area: not a marker curve");
  return polygon_signed_area(points_);
}

std::string Domain::to_json() const {
  nlohmann::json j;
  switch (kind_) {
    case Kind::Disk:
      j["type"] = "disk";
      break;
    case Kind::Conformal: {
      j["type"] = "conformal";
      auto arr = nlohmann::json::array();
      for (const Complex c : coeffs_) arr.push_back({c.real(), c.imag()});
      j["coeffs"] = arr;
      break;
    }
    case Kind::Curve: {
      j["type"] = "curve";
      auto arr = nlohmann::json::array();
      for (const Complex p : points_) arr.push_back({p.real(), p.imag()});
      j["points"] = arr;
      break;
    }
  }
  return j.dump();
}

Domain Domain::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("domain: malformed JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw InputError("domain.type: missing or not a string");
  const std::string type = j["type"];
  auto read_pairs = [&](const char* field) {
    if (!j.contains(field) || !j[field].is_array())
      throw InputError(std::string("domain.") + field + ": missing or not an array");
    std::vector<Complex> out;
    for (const auto& e : j[field]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw InputError(std::string("domain.") + field +
                         ": entries must be [x, y] number pairs");
      out.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return out;
  };
  if (type == "disk") return disk();
  if (type == "conformal") return conformal(read_pairs("coeffs"));
  if (type == "curve") return curve(read_pairs("points"));
  throw InputError("domain.type: expected \"disk\", \"conformal\" or \"curve\"");
}

}  // namespace ellgrow

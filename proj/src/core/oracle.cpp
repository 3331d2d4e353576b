#include "core/oracle.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <numbers>

#include "core/errors.hpp"

namespace ellgrow {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInv2Pi = 1.0 / (2.0 * kPi);

double green_disk_closed(Complex z, Complex w) {
  return kInv2Pi * (std::log(std::abs(z - w)) - std::log(std::abs(1.0 - std::conj(w) * z)));
}

double poisson_disk_closed(Complex w, Complex zeta) {
  return kInv2Pi * (1.0 - std::norm(w)) / std::norm(zeta - w);
}

struct GridShape {
  int n_r, n_t;
  double h, dth;
  int unknowns() const { return 1 + (n_r - 1) * n_t; }
  int idx(int i, int j) const { return 1 + (i - 1) * n_t + j; }
  Complex node(int i, int j) const { return std::polar(i * h, j * dth); }
};

GridShape make_shape(int n_r, int n_t) {
  if (n_r < 32 || n_t < 32) throw OracleError("polar grid needs n_r, n_t >= 32");
  return {n_r, n_t, 1.0 / n_r, 2.0 * kPi / n_t};
}

PolarGridField solve_sparse(const GridShape& gs,
                            const std::vector<Eigen::Triplet<double>>& trips,
                            const Eigen::VectorXd& rhs, std::vector<double> bnd) {
  Eigen::SparseMatrix<double> A(gs.unknowns(), gs.unknowns());
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw OracleError("sparse factorization failed");
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw OracleError("sparse solve failed");
  PolarGridField f;
  f.n_r = gs.n_r;
  f.n_t = gs.n_t;
  f.center = x(0);
  f.ring.resize((gs.n_r - 1) * gs.n_t);
  for (int i = 1; i < gs.n_r; ++i)
    for (int j = 0; j < gs.n_t; ++j) f.ring[(i - 1) * gs.n_t + j] = x(gs.idx(i, j));
  f.bnd = std::move(bnd);
  return f;
}

}  // namespace

double PolarGridField::value(int i, int j) const {
  if (i == 0) return center;
  return ring[(i - 1) * n_t + j];
}

double PolarGridField::eval(Complex z) const {
  const double h = 1.0 / n_r;
  const double dth = 2.0 * kPi / n_t;
  const double r = std::abs(z);
  double s = std::arg(z) / dth;
  s -= std::floor(s / n_t) * n_t;
  const int j0 = std::min(static_cast<int>(std::floor(s)), n_t - 1);
  const int j1 = (j0 + 1) % n_t;
  const double fj = s - j0;
  auto ring_at = [&](int i) {
    if (i == 0) return center;
    if (i >= n_r) return bnd.empty() ? 0.0 : (1.0 - fj) * bnd[j0] + fj * bnd[j1];
    return (1.0 - fj) * value(i, j0) + fj * value(i, j1);
  };
  double rho = r / h;
  if (rho >= n_r) rho = n_r;
  const int i0 = std::min(static_cast<int>(std::floor(rho)), n_r - 1);
  const double fr = rho - i0;
  return (1.0 - fr) * ring_at(i0) + fr * ring_at(i0 + 1);
}

std::vector<double> PolarGridField::radial_derivative_at_boundary() const {
  const double h = 1.0 / n_r;
  std::vector<double> out(n_t);
  for (int j = 0; j < n_t; ++j) {
    const double f0 = bnd.empty() ? 0.0 : bnd[j];
    out[j] = (3.0 * f0 - 4.0 * value(n_r - 1, j) + value(n_r - 2, j)) / (2.0 * h);
  }
  return out;
}

std::vector<double> PolarGridField::boundary_angles() const {
  std::vector<double> out(n_t);
  for (int j = 0; j < n_t; ++j) out[j] = j * 2.0 * kPi / n_t;
  return out;
}

double bessel_I0(double x) {
  if (x < 0.0 || x > 5.0) throw OracleError("bessel_I0 series valid for 0 <= x <= 5");
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return sum;
}

double bessel_I0_integral(double x) {
  const int n = 400;  // Simpson panels over [0, pi]
  const double h = kPi / n;
  double s = std::exp(x) + std::exp(-x);
  for (int k = 1; k < n; ++k)
    s += (k % 2 ? 4.0 : 2.0) * std::exp(x * std::cos(k * h));
  return s * h / (3.0 * kPi);
}

double bessel_flux(double eps) {
  if (eps < 0.0) throw OracleError("bessel_flux needs eps >= 0");
  return 1.0 / (2.0 * kPi * bessel_I0(std::sqrt(eps)));
}

Complex grad_green_disk(Complex z, Complex w) {
  const Complex d = z - w;
  return kInv2Pi * (d / std::norm(d) + w / (1.0 - w * std::conj(z)));
}

PolarGridField fd_green(int n_r, int n_t, const std::function<double(Complex)>& q,
                        Complex w) {
  const GridShape gs = make_shape(n_r, n_t);
  const double h = gs.h, dth = gs.dth;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(5 * gs.unknowns());
  Eigen::VectorXd rhs(gs.unknowns());

  const double q0 = q(Complex{0, 0});
  trips.emplace_back(0, 0, -4.0 / (h * h) - q0);
  for (int j = 0; j < n_t; ++j)
    trips.emplace_back(0, gs.idx(1, j), 4.0 / (h * h) / n_t);
  double g_at_center;
  if (std::abs(w) < 1e-14) {
    // cell average of (1/2pi) ln r over the axis cell of radius h/2
    g_at_center = kInv2Pi * (std::log(0.5 * h) - 0.5);
  } else {
    g_at_center = green_disk_closed(Complex{0, 0}, w);
  }
  rhs(0) = q0 * g_at_center;

  for (int i = 1; i < n_r; ++i) {
    const double r = i * h;
    const double crp = 1.0 / (h * h) + 1.0 / (2.0 * h * r);
    const double crm = 1.0 / (h * h) - 1.0 / (2.0 * h * r);
    const double ct = 1.0 / (r * r * dth * dth);
    for (int j = 0; j < n_t; ++j) {
      const int row = gs.idx(i, j);
      const Complex z = gs.node(i, j);
      if (std::abs(z - w) < 1e-9) throw OracleError("source collides with a grid node");
      const double qv = q(z);
      trips.emplace_back(row, row, -2.0 / (h * h) - 2.0 * ct - qv);
      trips.emplace_back(row, gs.idx(i, (j + 1) % n_t), ct);
      trips.emplace_back(row, gs.idx(i, (j + n_t - 1) % n_t), ct);
      if (i > 1) trips.emplace_back(row, gs.idx(i - 1, j), crm);
      else trips.emplace_back(row, 0, crm);
      if (i < n_r - 1) trips.emplace_back(row, gs.idx(i + 1, j), crp);
      // i = n_r-1: the outer neighbor is the boundary, value 0
      rhs(row) = qv * green_disk_closed(z, w);
    }
  }
  return solve_sparse(gs, trips, rhs, {});
}

std::vector<double> fd_green_flux(const PolarGridField& h, Complex w) {
  std::vector<double> out = h.radial_derivative_at_boundary();
  const std::vector<double> ang = h.boundary_angles();
  for (int j = 0; j < h.n_t; ++j)
    out[j] += poisson_disk_closed(w, std::polar(1.0, ang[j]));
  return out;
}

PolarGridField fd_beltrami_green(int n_r, int n_t,
                                 const std::function<double(Complex)>& lambda,
                                 const std::function<Complex(Complex)>& grad_lambda,
                                 Complex w) {
  const GridShape gs = make_shape(n_r, n_t);
  const double h = gs.h, dth = gs.dth;
  const double lw = lambda(w);
  if (lw <= 0.0) throw OracleError("conductivity not positive at the source");
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(5 * gs.unknowns());
  Eigen::VectorXd rhs(gs.unknowns());

  auto source = [&](Complex z) {
    const Complex gl = grad_lambda(z);
    if (std::norm(gl) == 0.0) return 0.0;
    return -dot(gl, grad_green_disk(z, w)) / lw;
  };

  {
    // flux balance over the axis cell of radius h/2
    const double scale = 2.0 * dth / (kPi * h * h);
    double diag = 0.0;
    for (int j = 0; j < n_t; ++j) {
      const double le = lambda(std::polar(0.5 * h, j * dth));
      trips.emplace_back(0, gs.idx(1, j), scale * le);
      diag -= scale * le;
    }
    trips.emplace_back(0, 0, diag);
    const Complex gl0 = grad_lambda(Complex{0, 0});
    if (std::norm(gl0) != 0.0 && std::abs(w) < 1e-12)
      throw OracleError("divergence-form oracle needs w away from the axis");
    rhs(0) = source(Complex{0, 0});
  }

  for (int i = 1; i < n_r; ++i) {
    const double r = i * h;
    const double rp = r + 0.5 * h, rm = r - 0.5 * h;
    for (int j = 0; j < n_t; ++j) {
      const int row = gs.idx(i, j);
      const Complex z = gs.node(i, j);
      if (std::abs(z - w) < 1e-9) throw OracleError("source collides with a grid node");
      const double lrp = lambda(std::polar(rp, j * dth));
      const double lrm = lambda(std::polar(rm, j * dth));
      const double ltp = lambda(std::polar(r, (j + 0.5) * dth));
      const double ltm = lambda(std::polar(r, (j - 0.5) * dth));
      const double crp = rp * lrp / (r * h * h);
      const double crm = rm * lrm / (r * h * h);
      const double ctp = ltp / (r * r * dth * dth);
      const double ctm = ltm / (r * r * dth * dth);
      trips.emplace_back(row, row, -(crp + crm + ctp + ctm));
      trips.emplace_back(row, gs.idx(i, (j + 1) % n_t), ctp);
      trips.emplace_back(row, gs.idx(i, (j + n_t - 1) % n_t), ctm);
      if (i > 1) trips.emplace_back(row, gs.idx(i - 1, j), crm);
      else trips.emplace_back(row, 0, crm);
      if (i < n_r - 1) trips.emplace_back(row, gs.idx(i + 1, j), crp);
      rhs(row) = source(z);
    }
  }
  return solve_sparse(gs, trips, rhs, {});
}

double fd_beltrami_eval(const PolarGridField& h,
                        const std::function<double(Complex)>& lambda, Complex w,
                        Complex z) {
  return green_disk_closed(z, w) / lambda(w) + h.eval(z);
}

PolarGridField fd_harmonic_green(int n_r, int n_t, Complex w) {
  const GridShape gs = make_shape(n_r, n_t);
  const double h = gs.h, dth = gs.dth;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(5 * gs.unknowns());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(gs.unknowns());
  std::vector<double> bnd(n_t);
  for (int j = 0; j < n_t; ++j)
    bnd[j] = -kInv2Pi * std::log(std::abs(std::polar(1.0, j * dth) - w));

  trips.emplace_back(0, 0, -4.0 / (h * h));
  for (int j = 0; j < n_t; ++j)
    trips.emplace_back(0, gs.idx(1, j), 4.0 / (h * h) / n_t);

  for (int i = 1; i < n_r; ++i) {
    const double r = i * h;
    const double crp = 1.0 / (h * h) + 1.0 / (2.0 * h * r);
    const double crm = 1.0 / (h * h) - 1.0 / (2.0 * h * r);
    const double ct = 1.0 / (r * r * dth * dth);
    for (int j = 0; j < n_t; ++j) {
      const int row = gs.idx(i, j);
      trips.emplace_back(row, row, -2.0 / (h * h) - 2.0 * ct);
      trips.emplace_back(row, gs.idx(i, (j + 1) % n_t), ct);
      trips.emplace_back(row, gs.idx(i, (j + n_t - 1) % n_t), ct);
      if (i > 1) trips.emplace_back(row, gs.idx(i - 1, j), crm);
      else trips.emplace_back(row, 0, crm);
      if (i < n_r - 1) trips.emplace_back(row, gs.idx(i + 1, j), crp);
      else rhs(row) -= crp * bnd[j];
    }
  }
  return solve_sparse(gs, trips, rhs, std::move(bnd));
}

double fd_harmonic_eval(const PolarGridField& h, Complex w, Complex z) {
  return kInv2Pi * std::log(std::abs(z - w)) + h.eval(z);
}

}  // namespace ellgrow

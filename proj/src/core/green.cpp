#include "core/green.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/errors.hpp"

namespace ellgrow {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInv2Pi = 1.0 / (2.0 * kPi);
constexpr double kInv4Pi = 1.0 / (4.0 * kPi);
constexpr double kCoincident2 = 1e-26;  // squared distance treated as identical

double green_disk(Complex z, Complex w) {
  const double n1 = std::norm(z - w);
  const double n2 = std::norm(1.0 - std::conj(w) * z);
  return kInv4Pi * std::log(n1 / n2);
}

// Bilinear interpolation of node samples on a tensor rule, in preimage polar
// coordinates. Radius is clamped to the node range, the angle wraps.
double interp_polar(const AreaRule& rule, std::span<const double> v, Complex a) {
  const auto& pm = *rule.polar;
  const int nr = pm.n_radial, na = pm.n_angular;
  const double r = std::abs(a);
  double th = std::arg(a) - pm.theta0;
  const double dth = 2.0 * kPi / na;
  double s = th / dth;
  s -= std::floor(s / na) * na;
  const int j0 = std::min(static_cast<int>(std::floor(s)), na - 1);
  const int j1 = (j0 + 1) % na;
  const double fj = s - j0;
  int i1 = static_cast<int>(std::lower_bound(pm.r.begin(), pm.r.end(), r) - pm.r.begin());
  i1 = std::clamp(i1, 1, nr - 1);
  const int i0 = i1 - 1;
  const double fr = std::clamp((r - pm.r[i0]) / (pm.r[i1] - pm.r[i0]), 0.0, 1.0);
  const double v00 = v[i0 * na + j0], v01 = v[i0 * na + j1];
  const double v10 = v[i1 * na + j0], v11 = v[i1 * na + j1];
  return (1.0 - fr) * ((1.0 - fj) * v00 + fj * v01) + fr * ((1.0 - fj) * v10 + fj * v11);
}

}  // namespace

GreenKernel::GreenKernel(const Domain& domain, int n_boundary) : domain_(domain) {
  boundary_ = domain_.boundary_samples(n_boundary);
  if (domain_.kind() != Domain::Kind::Curve) return;

  const int n = static_cast<int>(boundary_.size());
  charges_.resize(n);
  for (int c = 0; c < n; ++c) {
    const Complex prev = boundary_[(c + n - 1) % n].position;
    const Complex next = boundary_[(c + 1) % n].position;
    const Complex here = boundary_[c].position;
    const double spacing = 0.5 * (std::abs(next - here) + std::abs(here - prev));
    charges_[c] = here + 1.15 * spacing * boundary_[c].normal;
  }
  Eigen::MatrixXd B(n, n);
  for (int j = 0; j < n; ++j)
    for (int c = 0; c < n; ++c)
      B(j, c) = kInv2Pi * std::log(std::abs(boundary_[j].position - charges_[c]));
  Eigen::BDCSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  mfs_U_ = svd.matrixU();
  mfs_V_ = svd.matrixV();
  mfs_sv_ = svd.singularValues();
}

Eigen::VectorXd GreenKernel::solve_charges(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd y = mfs_U_.transpose() * rhs;
  const double cutoff = 1e-12 * mfs_sv_(0);
  for (int k = 0; k < y.size(); ++k) y(k) = mfs_sv_(k) >= cutoff ? y(k) / mfs_sv_(k) : 0.0;
  return mfs_V_ * y;
}

Eigen::VectorXd GreenKernel::charges_for_source(Complex w) const {
  const int n = static_cast<int>(boundary_.size());
  Eigen::VectorXd rhs(n);
  for (int j = 0; j < n; ++j)
    rhs(j) = -kInv2Pi * std::log(std::abs(boundary_[j].position - w));
  return solve_charges(rhs);
}

const Eigen::MatrixXd& GreenKernel::charges_on(const AreaRule& rule) const {
  const void* key = rule.nodes.data();
  auto it = charge_cache_.find(key);
  if (it != charge_cache_.end()) return it->second;
  const int n = static_cast<int>(boundary_.size());
  const int m = rule.size();
  Eigen::MatrixXd rhs(n, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      rhs(j, i) = -kInv2Pi * std::log(std::abs(boundary_[j].position - rule.nodes[i]));
  Eigen::MatrixXd y = mfs_U_.transpose() * rhs;
  const double cutoff = 1e-12 * mfs_sv_(0);
  for (int k = 0; k < y.rows(); ++k) {
    const double f = mfs_sv_(k) >= cutoff ? 1.0 / mfs_sv_(k) : 0.0;
    y.row(k) *= f;
  }
  return charge_cache_.emplace(key, mfs_V_ * y).first->second;
}

const Eigen::MatrixXd& GreenKernel::psi_on(const AreaRule& rule) const {
  const void* key = rule.nodes.data();
  auto it = psi_cache_.find(key);
  if (it != psi_cache_.end()) return it->second;
  const int n = static_cast<int>(charges_.size());
  const int m = rule.size();
  Eigen::MatrixXd psi(m, n);
  for (int i = 0; i < m; ++i)
    for (int c = 0; c < n; ++c)
      psi(i, c) = kInv2Pi * std::log(std::abs(rule.nodes[i] - charges_[c]));
  return psi_cache_.emplace(key, std::move(psi)).first->second;
}

double GreenKernel::mfs_boundary_residual() const {
  if (domain_.kind() != Domain::Kind::Curve) return 0.0;
  const int n = static_cast<int>(boundary_.size());
  const Complex w = domain_.reference_point();
  Eigen::VectorXd rhs(n);
  for (int j = 0; j < n; ++j)
    rhs(j) = -kInv2Pi * std::log(std::abs(boundary_[j].position - w));
  const Eigen::VectorXd q = solve_charges(rhs);
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    double v = 0.0;
    for (int c = 0; c < n; ++c)
      v += q(c) * kInv2Pi * std::log(std::abs(boundary_[j].position - charges_[c]));
    worst = std::max(worst, std::abs(v - rhs(j)));
  }
  return worst;
}

double GreenKernel::green(Complex z, Complex w) const {
  if (std::norm(z - w) < kCoincident2)
    throw SingularityError("green evaluated at coincident points");
  switch (domain_.kind()) {
    case Domain::Kind::Disk: {
      if (std::abs(z) > 1.0 + 1e-10 || std::abs(w) > 1.0 + 1e-10)
        throw DomainError("green argument outside the closed disk");
      return green_disk(z, w);
    }
    case Domain::Kind::Conformal: {
      Complex az, aw;
      try {
        az = domain_.map_inverse(z);
        aw = domain_.map_inverse(w);
      } catch (const GeometryError&) {
        throw DomainError("green argument outside the domain");
      }
      return green_disk(az, aw);
    }
    default: {
      if (!domain_.contains(z) && !domain_.contains(0.999 * z + 0.001 * domain_.reference_point()))
        throw DomainError("green argument outside the domain");
      const Eigen::VectorXd q = charges_for_source(w);
      double v = kInv2Pi * std::log(std::abs(z - w));
      for (int c = 0; c < q.size(); ++c)
        v += q(c) * kInv2Pi * std::log(std::abs(z - charges_[c]));
      return v;
    }
  }
}

std::vector<double> GreenKernel::green_on(const AreaRule& rule, Complex w) const {
  const int m = rule.size();
  std::vector<double> out(m);
  switch (domain_.kind()) {
    case Domain::Kind::Disk: {
      for (int i = 0; i < m; ++i) {
        const Complex z = rule.nodes[i];
        out[i] = std::norm(z - w) < kCoincident2 ? 0.0 : green_disk(z, w);
      }
      break;
    }
    case Domain::Kind::Conformal: {
      const Complex aw = domain_.map_inverse(w);
      if (rule.polar) {
        const auto& pre = rule.polar->preimage;
        for (int i = 0; i < m; ++i)
          out[i] = std::norm(pre[i] - aw) < kCoincident2 ? 0.0 : green_disk(pre[i], aw);
      } else {
        for (int i = 0; i < m; ++i) {
          const Complex az = domain_.map_inverse(rule.nodes[i]);
          out[i] = std::norm(az - aw) < kCoincident2 ? 0.0 : green_disk(az, aw);
        }
      }
      break;
    }
    default: {
      const Eigen::VectorXd q = charges_for_source(w);
      const int nc = static_cast<int>(charges_.size());
      for (int i = 0; i < m; ++i) {
        const Complex z = rule.nodes[i];
        if (std::norm(z - w) < kCoincident2) {
          out[i] = 0.0;
          continue;
        }
        double v = kInv2Pi * std::log(std::abs(z - w));
        for (int c = 0; c < nc; ++c)
          v += q(c) * kInv2Pi * std::log(std::abs(z - charges_[c]));
        out[i] = v;
      }
    }
  }
  return out;
}

double GreenKernel::poisson_disk_pre(Complex a, Complex eta) const {
  const double d2 = std::norm(eta - a);
  if (d2 < 1e-24) throw SingularityError("poisson evaluated at its boundary point");
  return kInv2Pi * (1.0 - std::norm(a)) / d2;
}

Complex GreenKernel::boundary_preimage(const BoundarySample& zeta) const {
  if (domain_.kind() == Domain::Kind::Conformal) return std::polar(1.0, zeta.t);
  return zeta.position;
}

double GreenKernel::boundary_map_deriv(const BoundarySample& zeta) const {
  if (domain_.kind() == Domain::Kind::Conformal)
    return std::abs(domain_.map_deriv(std::polar(1.0, zeta.t)));
  return 1.0;
}

double GreenKernel::poisson(Complex z, const BoundarySample& zeta) const {
  switch (domain_.kind()) {
    case Domain::Kind::Disk:
      if (std::abs(z) > 1.0 + 1e-12) throw DomainError("poisson argument outside the disk");
      return poisson_disk_pre(z, zeta.position);
    case Domain::Kind::Conformal: {
      Complex az;
      try {
        az = domain_.map_inverse(z);
      } catch (const GeometryError&) {
        throw DomainError("poisson argument outside the domain");
      }
      return poisson_disk_pre(az, boundary_preimage(zeta)) / boundary_map_deriv(zeta);
    }
    default: {
      const double d2 = std::norm(zeta.position - z);
      if (d2 < 1e-24) throw SingularityError("poisson evaluated at its boundary point");
      const Eigen::VectorXd q = charges_for_source(z);
      double v = dot(zeta.normal, zeta.position - z) / d2;
      for (int c = 0; c < q.size(); ++c) {
        const Complex d = zeta.position - charges_[c];
        v += q(c) * dot(zeta.normal, d) / std::norm(d);
      }
      return kInv2Pi * v;
    }
  }
}

std::vector<double> GreenKernel::poisson_on(const AreaRule& rule, const BoundarySample& zeta) const {
  const int m = rule.size();
  std::vector<double> out(m);
  switch (domain_.kind()) {
    case Domain::Kind::Disk: {
      for (int i = 0; i < m; ++i) out[i] = poisson_disk_pre(rule.nodes[i], zeta.position);
      break;
    }
    case Domain::Kind::Conformal: {
      const Complex eta = boundary_preimage(zeta);
      const double dp = boundary_map_deriv(zeta);
      if (rule.polar) {
        const auto& pre = rule.polar->preimage;
        for (int i = 0; i < m; ++i) out[i] = poisson_disk_pre(pre[i], eta) / dp;
      } else {
        for (int i = 0; i < m; ++i)
          out[i] = poisson_disk_pre(domain_.map_inverse(rule.nodes[i]), eta) / dp;
      }
      break;
    }
    default: {
      const Eigen::MatrixXd& Q = charges_on(rule);
      const int nc = static_cast<int>(charges_.size());
      Eigen::VectorXd k(nc);
      for (int c = 0; c < nc; ++c) {
        const Complex d = zeta.position - charges_[c];
        k(c) = dot(zeta.normal, d) / std::norm(d);
      }
      Eigen::VectorXd corr = Q.transpose() * k;
      for (int i = 0; i < m; ++i) {
        const Complex d = zeta.position - rule.nodes[i];
        out[i] = kInv2Pi * (dot(zeta.normal, d) / std::norm(d) + corr(i));
      }
    }
  }
  return out;
}

double GreenKernel::g1(Complex w) const {
  switch (domain_.kind()) {
    case Domain::Kind::Disk:
      if (std::abs(w) > 1.0 + 1e-12) throw DomainError("g1 argument outside the disk");
      return 0.25 * (std::norm(w) - 1.0);
    case Domain::Kind::Conformal: {
      Complex aw;
      try {
        aw = domain_.map_inverse(w);
      } catch (const GeometryError&) {
        throw DomainError("g1 argument outside the domain");
      }
      const Complex z0 = domain_.reference_point();
      const int n = static_cast<int>(boundary_.size());
      const double dt = 2.0 * kPi / n;
      double ext = 0.0;
      for (int j = 0; j < n; ++j) {
        const double bv = 0.25 * std::norm(boundary_[j].position - z0);
        ext += bv * poisson_disk_pre(aw, std::polar(1.0, boundary_[j].t)) * dt;
      }
      return 0.25 * std::norm(w - z0) - ext;
    }
    default: {
      const Complex z0 = domain_.reference_point();
      if (!g1_fit_ready_) {
        const int n = static_cast<int>(boundary_.size());
        Eigen::VectorXd rhs(n);
        for (int j = 0; j < n; ++j) rhs(j) = -0.25 * std::norm(boundary_[j].position - z0);
        g1_charges_ = solve_charges(rhs);
        g1_fit_ready_ = true;
      }
      double v = 0.25 * std::norm(w - z0);
      for (int c = 0; c < g1_charges_.size(); ++c)
        v += g1_charges_(c) * kInv2Pi * std::log(std::abs(w - charges_[c]));
      return v;
    }
  }
}

const std::vector<double>& GreenKernel::g1_on(const AreaRule& rule) const {
  const void* key = rule.nodes.data();
  auto it = g1_cache_.find(key);
  if (it != g1_cache_.end()) return it->second;

  const int m = rule.size();
  std::vector<double> out(m);
  switch (domain_.kind()) {
    case Domain::Kind::Disk: {
      for (int i = 0; i < m; ++i) out[i] = 0.25 * (std::norm(rule.nodes[i]) - 1.0);
      break;
    }
    case Domain::Kind::Conformal: {
      const Complex z0 = domain_.reference_point();
      const int n = static_cast<int>(boundary_.size());
      const double dt = 2.0 * kPi / n;
      std::vector<double> bv(n);
      std::vector<Complex> eta(n);
      for (int j = 0; j < n; ++j) {
        bv[j] = 0.25 * std::norm(boundary_[j].position - z0);
        eta[j] = std::polar(1.0, boundary_[j].t);
      }
      for (int i = 0; i < m; ++i) {
        const Complex a = rule.polar ? rule.polar->preimage[i] : domain_.map_inverse(rule.nodes[i]);
        double ext = 0.0;
        for (int j = 0; j < n; ++j) ext += bv[j] * poisson_disk_pre(a, eta[j]) * dt;
        out[i] = 0.25 * std::norm(rule.nodes[i] - z0) - ext;
      }
      break;
    }
    default: {
      g1(domain_.reference_point());  // force the charge fit
      const Eigen::MatrixXd& psi = psi_on(rule);
      const Complex z0 = domain_.reference_point();
      Eigen::VectorXd corr = psi * g1_charges_;
      for (int i = 0; i < m; ++i) out[i] = 0.25 * std::norm(rule.nodes[i] - z0) + corr(i);
    }
  }
  return g1_cache_.emplace(key, std::move(out)).first->second;
}

double GreenKernel::harmonic_extension(std::span<const double> f, Complex z) const {
  const int n = static_cast<int>(boundary_.size());
  if (static_cast<int>(f.size()) != n)
    throw ShapeError("boundary data length does not match the boundary sampling");
  switch (domain_.kind()) {
    case Domain::Kind::Disk:
    case Domain::Kind::Conformal: {
      Complex a = z;
      if (domain_.kind() == Domain::Kind::Conformal) {
        try {
          a = domain_.map_inverse(z);
        } catch (const GeometryError&) {
          throw DomainError("harmonic extension argument outside the domain");
        }
      } else if (std::abs(z) > 1.0 + 1e-12) {
        throw DomainError("harmonic extension argument outside the disk");
      }
      const double dt = 2.0 * kPi / n;
      double v = 0.0;
      for (int j = 0; j < n; ++j) {
        const Complex eta = std::polar(1.0, boundary_[j].t);
        if (std::norm(eta - a) < 1e-20) return f[j];
        v += f[j] * poisson_disk_pre(a, eta) * dt;
      }
      return v;
    }
    default: {
      Eigen::VectorXd rhs(n);
      for (int j = 0; j < n; ++j) rhs(j) = f[j];
      const Eigen::VectorXd q = solve_charges(rhs);
      double v = 0.0;
      for (int c = 0; c < n; ++c)
        v += q(c) * kInv2Pi * std::log(std::abs(z - charges_[c]));
      return v;
    }
  }
}

std::vector<double> GreenKernel::harmonic_extension_on(const AreaRule& rule,
                                                       std::span<const double> f) const {
  const int n = static_cast<int>(boundary_.size());
  if (static_cast<int>(f.size()) != n)
    throw ShapeError("boundary data length does not match the boundary sampling");
  const int m = rule.size();
  std::vector<double> out(m);
  if (domain_.kind() != Domain::Kind::Curve) {
    const double dt = 2.0 * kPi / n;
    std::vector<Complex> eta(n);
    for (int j = 0; j < n; ++j) eta[j] = std::polar(1.0, boundary_[j].t);
    for (int i = 0; i < m; ++i) {
      Complex a = rule.nodes[i];
      if (domain_.kind() == Domain::Kind::Conformal)
        a = rule.polar ? rule.polar->preimage[i] : domain_.map_inverse(rule.nodes[i]);
      double v = 0.0;
      for (int j = 0; j < n; ++j) v += f[j] * poisson_disk_pre(a, eta[j]) * dt;
      out[i] = v;
    }
    return out;
  }
  Eigen::VectorXd rhs(n);
  for (int j = 0; j < n; ++j) rhs(j) = f[j];
  const Eigen::VectorXd q = solve_charges(rhs);
  const Eigen::MatrixXd& psi = psi_on(rule);
  Eigen::VectorXd vals = psi * q;
  for (int i = 0; i < m; ++i) out[i] = vals(i);
  return out;
}

void GreenKernel::green_matvec(const AreaRule& rule, std::span<const double> c,
                               std::vector<double>& Sc, std::vector<double>& colg) const {
  const int m = rule.size();
  if (static_cast<int>(c.size()) != m)
    throw ShapeError("coefficient length does not match the quadrature rule");
  Sc.assign(m, 0.0);
  colg.assign(m, 0.0);
  const auto& wt = rule.weights;

  if (domain_.kind() != Domain::Kind::Curve) {
    const std::vector<Complex>* pts = &rule.nodes;
    std::vector<Complex> inv;
    if (domain_.kind() == Domain::Kind::Conformal) {
      if (rule.polar) {
        pts = &rule.polar->preimage;
      } else {
        inv.resize(m);
        for (int i = 0; i < m; ++i) inv[i] = domain_.map_inverse(rule.nodes[i]);
        pts = &inv;
      }
    }
    const auto& a = *pts;
    for (int i = 0; i < m; ++i) {
      const Complex ai = a[i];
      const Complex ci = std::conj(ai);
      for (int j = i + 1; j < m; ++j) {
        const double n1 = std::norm(ai - a[j]);
        if (n1 < kCoincident2) continue;
        const double n2 = std::norm(1.0 - ci * a[j]);
        const double g = kInv4Pi * std::log(n1 / n2);
        Sc[i] += wt[j] * c[j] * g;
        Sc[j] += wt[i] * c[i] * g;
        colg[i] += wt[j] * g;
        colg[j] += wt[i] * g;
      }
    }
    return;
  }

  // Marker curves: pairwise free-space log plus the smooth charge correction.
  const auto& z = rule.nodes;
  for (int i = 0; i < m; ++i) {
    const Complex zi = z[i];
    for (int j = i + 1; j < m; ++j) {
      const double n1 = std::norm(zi - z[j]);
      if (n1 < kCoincident2) continue;
      const double g = kInv4Pi * std::log(n1);
      Sc[i] += wt[j] * c[j] * g;
      Sc[j] += wt[i] * c[i] * g;
      colg[i] += wt[j] * g;
      colg[j] += wt[i] * g;
    }
  }
  const Eigen::MatrixXd& Q = charges_on(rule);
  const Eigen::MatrixXd& psi = psi_on(rule);
  Eigen::VectorXd wv(m), wc(m);
  for (int i = 0; i < m; ++i) {
    wv(i) = wt[i];
    wc(i) = wt[i] * c[i];
  }
  Eigen::VectorXd corrS = psi * (Q * wc);
  Eigen::VectorXd corrG = psi * (Q * wv);
  for (int i = 0; i < m; ++i) {
    const double diag = psi.row(i).dot(Q.col(i));
    Sc[i] += corrS(i) - wt[i] * c[i] * diag;
    colg[i] += corrG(i) - wt[i] * diag;
  }
}

std::vector<double> GreenKernel::apply_T_values(const AreaRule& rule,
                                                std::span<const double> phi) const {
  std::vector<double> Sc, colg;
  green_matvec(rule, phi, Sc, colg);
  const auto& g1v = g1_on(rule);
  const int m = rule.size();
  std::vector<double> out(m);
  for (int i = 0; i < m; ++i) out[i] = Sc[i] + phi[i] * (g1v[i] - colg[i]);
  return out;
}

double GreenKernel::integrate_poisson(const AreaRule& rule, std::span<const double> h,
                                      const BoundarySample& zeta) const {
  const int m = rule.size();
  if (static_cast<int>(h.size()) != m)
    throw ShapeError("field length does not match the quadrature rule");

  if (!rule.polar) {
    const std::vector<double> P = poisson_on(rule, zeta);
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += rule.weights[i] * h[i] * P[i];
    return s;
  }

  const auto& pm = *rule.polar;
  const int nr = pm.n_radial, na = pm.n_angular;
  const double dth = 2.0 * kPi / na;
  const Complex eta = boundary_preimage(zeta);
  const double dp = boundary_map_deriv(zeta);
  const double alpha = std::arg(eta);
  double s_angle = (alpha - pm.theta0) / dth;
  s_angle -= std::floor(s_angle / na) * na;
  const int j0 = std::min(static_cast<int>(std::floor(s_angle)), na - 1);
  const int j1 = (j0 + 1) % na;
  const double fj = s_angle - j0;
  const bool conf = domain_.kind() == Domain::Kind::Conformal;
  const auto& pre = pm.preimage;

  double total = 0.0;
  for (int i = 0; i < nr; ++i) {
    const int base = i * na;
    double ring_mass = 0.0, ring_sum = 0.0;
    for (int j = 0; j < na; ++j) {
      const double pd = poisson_disk_pre(pre[base + j], eta);
      ring_mass += pd;
      ring_sum += rule.weights[base + j] * h[base + j] * pd;
    }
    double comp = (1.0 - fj) * h[base + j0] + fj * h[base + j1];
    if (conf) {
      const Complex ray = std::polar(pm.r[i], alpha);
      comp *= std::norm(domain_.map_deriv(ray));
    }
    total += ring_sum + pm.wr[i] * pm.r[i] * comp * (1.0 - dth * ring_mass);
  }
  return total / dp;
}

double GreenKernel::integrate_green_poisson(const AreaRule& rule, std::span<const double> u,
                                            const std::function<double(Complex)>& u_eval,
                                            Complex w, const BoundarySample& zeta) const {
  const int m = rule.size();
  if (static_cast<int>(u.size()) != m)
    throw ShapeError("field length does not match the quadrature rule");
  const std::vector<double> gw = green_on(rule, w);
  const double Pw = poisson(w, zeta);
  double u_w;
  if (u_eval) {
    u_w = u_eval(w);
  } else if (rule.polar) {
    const Complex aw =
        domain_.kind() == Domain::Kind::Conformal ? domain_.map_inverse(w) : w;
    u_w = interp_polar(rule, u, aw);
  } else {
    throw InputError("off-node evaluation needs u_eval on marker rules");
  }
  const double cw = u_w * Pw;

  if (!rule.polar) {
    const std::vector<double> P = poisson_on(rule, zeta);
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += rule.weights[i] * (u[i] * P[i] - cw) * gw[i];
    return s + cw * g1(w);
  }

  const auto& pm = *rule.polar;
  const int nr = pm.n_radial, na = pm.n_angular;
  const double dth = 2.0 * kPi / na;
  const Complex eta = boundary_preimage(zeta);
  const double dp = boundary_map_deriv(zeta);
  const double alpha = std::arg(eta);
  double s_angle = (alpha - pm.theta0) / dth;
  s_angle -= std::floor(s_angle / na) * na;
  const int j0 = std::min(static_cast<int>(std::floor(s_angle)), na - 1);
  const int j1 = (j0 + 1) % na;
  const double fj = s_angle - j0;
  const bool conf = domain_.kind() == Domain::Kind::Conformal;
  const auto& pre = pm.preimage;

  double total = 0.0;
  for (int i = 0; i < nr; ++i) {
    const int base = i * na;
    double ring_mass = 0.0, ring_sum = 0.0;
    for (int j = 0; j < na; ++j) {
      const int k = base + j;
      const double pd = poisson_disk_pre(pre[k], eta);
      ring_mass += pd;
      ring_sum += rule.weights[k] * (u[k] * pd / dp - cw) * gw[k];
    }
    // Ring correction of the Poisson angular mass, with the companion value
    // u * g_w * |phi'|^2 taken exactly on the ray through zeta.
    const Complex ray_pre = std::polar(pm.r[i], alpha);
    const Complex ray = conf ? domain_.map(ray_pre) : ray_pre;
    double corr = 0.0;
    if (std::norm(ray - w) > 1e-20) {
      double uv = u_eval ? u_eval(ray)
                         : (1.0 - fj) * u[base + j0] + fj * u[base + j1];
      double comp = uv * green(ray, w);
      if (conf) comp *= std::norm(domain_.map_deriv(ray_pre));
      corr = pm.wr[i] * pm.r[i] * comp * (1.0 - dth * ring_mass) / dp;
    }
    total += ring_sum + corr;
  }
  return total + cw * g1(w);
}

double GreenKernel::integrate_green_green(const AreaRule& rule, std::span<const double> u,
                                          double u_at_z, double u_at_w, Complex z, Complex w,
                                          std::span<const double> gz,
                                          std::span<const double> gw) const {
  const int m = rule.size();
  if (static_cast<int>(u.size()) != m || static_cast<int>(gz.size()) != m ||
      static_cast<int>(gw.size()) != m)
    throw ShapeError("field length does not match the quadrature rule");
  const double gzw = green(z, w);
  const double cz = u_at_z * gzw;
  const double cw = u_at_w * gzw;
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    const Complex xi = rule.nodes[i];
    if (std::norm(xi - z) < kCoincident2) {
      s += rule.weights[i] * (-cw * gw[i]);
    } else if (std::norm(xi - w) < kCoincident2) {
      s += rule.weights[i] * (-cz * gz[i]);
    } else {
      s += rule.weights[i] * (u[i] * gz[i] * gw[i] - cz * gz[i] - cw * gw[i]);
    }
  }
  return s + cz * g1(z) + cw * g1(w);
}

double normal_derivative_via_lemma(const GreenKernel& kernel, const FieldSample& lap_f,
                                   const BoundarySample& zeta) {
  if (!lap_f.rule) throw ShapeError("field sample carries no quadrature rule");
  return kernel.integrate_poisson(*lap_f.rule, lap_f.values, zeta);
}

}  // namespace ellgrow

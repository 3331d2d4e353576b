#include "core/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "core/errors.hpp"

namespace ellgrow {
namespace {

double weighted_l2(const Eigen::VectorXd& d, const Eigen::VectorXd& v) {
  return std::sqrt((d.array() * v.array().square()).sum());
}

double weighted_l1(const Eigen::VectorXd& d, const Eigen::VectorXd& v) {
  return (d.array() * v.array().abs()).sum();
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : num; }

}  // namespace

const Eigen::BDCSVD<Eigen::MatrixXd>& OperatorA::weighted_svd() const {
  if (!svd_cache) {
    const Eigen::MatrixXd scaled = ds.array().sqrt().matrix().asDiagonal() *
                                   (base + correction) *
                                   wt.array().rsqrt().matrix().asDiagonal();
    svd_cache = std::make_shared<Eigen::BDCSVD<Eigen::MatrixXd>>(
        scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
  }
  return *svd_cache;
}

OperatorA assemble(const GreenKernel& kernel, const AreaRule& rule, Complex w) {
  if (!rule.polar) throw InputError("operator assembly needs a polar area rule");
  const Domain& dom = kernel.domain();
  const bool conf = dom.kind() == Domain::Kind::Conformal;
  const auto& bnd = kernel.boundary();
  const auto& pm = *rule.polar;
  const int n = static_cast<int>(bnd.size());
  const int m = rule.size();
  const int nr = pm.n_radial, na = pm.n_angular;
  const double dth = 2.0 * std::numbers::pi / na;

  const std::vector<double> gw = kernel.green_on(rule, w);
  const double g1w = kernel.g1(w);
  double gw_mass = 0.0;
  for (int k = 0; k < m; ++k) gw_mass += rule.weights[k] * gw[k];

  // Bilinear footprint of the source in the polar mesh; the same stencil
  // the corrected integral uses to read u at w.
  const Complex aw = conf ? dom.map_inverse(w) : w;
  const double rw = std::abs(aw);
  double sw = (std::arg(aw) - pm.theta0) / dth;
  sw -= std::floor(sw / na) * na;
  const int wj0 = std::min(static_cast<int>(std::floor(sw)), na - 1);
  const int wj1 = (wj0 + 1) % na;
  const double wfj = sw - wj0;
  int wi1 = static_cast<int>(std::lower_bound(pm.r.begin(), pm.r.end(), rw) - pm.r.begin());
  wi1 = std::clamp(wi1, 1, nr - 1);
  const int wi0 = wi1 - 1;
  const double wfr = std::clamp((rw - pm.r[wi0]) / (pm.r[wi1] - pm.r[wi0]), 0.0, 1.0);
  const int widx[4] = {wi0 * na + wj0, wi0 * na + wj1, wi1 * na + wj0, wi1 * na + wj1};
  const double wwgt[4] = {(1.0 - wfr) * (1.0 - wfj), (1.0 - wfr) * wfj,
                          wfr * (1.0 - wfj), wfr * wfj};

  OperatorA op;
  op.w = w;
  op.base.setZero(n, m);
  op.correction.setZero(n, m);
  op.ds.resize(n);
  op.wt.resize(m);
  for (int i = 0; i < n; ++i) op.ds[i] = bnd[i].ds;
  for (int k = 0; k < m; ++k) op.wt[k] = rule.weights[k];

  for (int i = 0; i < n; ++i) {
    const BoundarySample& zeta = bnd[i];
    const std::vector<double> P = kernel.poisson_on(rule, zeta);
    for (int k = 0; k < m; ++k) op.base(i, k) = rule.weights[k] * gw[k] * P[k];

    const double factor = kernel.poisson(w, zeta) * (g1w - gw_mass);
    for (int q = 0; q < 4; ++q) op.correction(i, widx[q]) += wwgt[q] * factor;

    const Complex eta = conf ? std::polar(1.0, zeta.t) : zeta.position;
    const double dp = conf ? std::abs(dom.map_deriv(std::polar(1.0, zeta.t))) : 1.0;
    const double alpha = std::arg(eta);
    double s_angle = (alpha - pm.theta0) / dth;
    s_angle -= std::floor(s_angle / na) * na;
    const int j0 = std::min(static_cast<int>(std::floor(s_angle)), na - 1);
    const int j1 = (j0 + 1) % na;
    const double fj = s_angle - j0;
    for (int ir = 0; ir < nr; ++ir) {
      const int base_k = ir * na;
      double ring_mass = 0.0;
      for (int j = 0; j < na; ++j) ring_mass += P[base_k + j] * dp;
      const Complex ray_pre = std::polar(pm.r[ir], alpha);
      const Complex ray = conf ? dom.map(ray_pre) : ray_pre;
      if (std::norm(ray - w) <= 1e-20) continue;
      double comp = kernel.green(ray, w);
      if (conf) comp *= std::norm(dom.map_deriv(ray_pre));
      const double c = pm.wr[ir] * pm.r[ir] * comp * (1.0 - dth * ring_mass) / dp;
      op.correction(i, base_k + j0) += (1.0 - fj) * c;
      op.correction(i, base_k + j1) += fj * c;
    }
  }
  return op;
}

std::vector<double> apply(const OperatorA& op, std::span<const double> u) {
  if (static_cast<int>(u.size()) != op.cols())
    throw ShapeError("coefficient length does not match the operator");
  const Eigen::Map<const Eigen::VectorXd> uv(u.data(), u.size());
  const Eigen::VectorXd out = op.base * uv + op.correction * uv;
  return {out.data(), out.data() + out.size()};
}

std::vector<double> apply_adjoint(const OperatorA& op, std::span<const double> v) {
  if (static_cast<int>(v.size()) != op.rows())
    throw ShapeError("boundary value length does not match the operator");
  const Eigen::Map<const Eigen::VectorXd> vv(v.data(), v.size());
  const Eigen::VectorXd weighted = op.ds.asDiagonal() * vv;
  const Eigen::VectorXd out =
      op.wt.cwiseInverse().asDiagonal() *
      (op.base.transpose() * weighted + op.correction.transpose() * weighted);
  return {out.data(), out.data() + out.size()};
}

SpectrumReport spectrum(const OperatorA& op) {
  const auto& svd = op.weighted_svd();
  const Eigen::VectorXd& sv = svd.singularValues();
  SpectrumReport rep;
  rep.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double top = sv.size() > 0 ? sv(0) : 0.0;
  rep.degenerate = top <= 0.0;
  const double bottom = sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
  rep.condition = bottom > 0.0 ? top / bottom : std::numeric_limits<double>::infinity();
  rep.rank = 0;
  for (int k = 0; k < sv.size(); ++k)
    if (sv(k) > 1e-12 * top) ++rep.rank;
  return rep;
}

TikhonovSolution solve_tikhonov(const OperatorA& op, std::span<const double> target,
                                double alpha) {
  if (alpha <= 0.0) throw InputError("tikhonov weight must be positive");
  if (static_cast<int>(target.size()) != op.rows())
    throw ShapeError("target length does not match the operator");
  const auto& svd = op.weighted_svd();
  const Eigen::Map<const Eigen::VectorXd> v(target.data(), target.size());

  const Eigen::VectorXd vb = op.ds.array().sqrt().matrix().asDiagonal() * v;
  Eigen::VectorXd y = svd.matrixU().transpose() * vb;
  const Eigen::VectorXd& sv = svd.singularValues();
  for (int k = 0; k < y.size(); ++k) y(k) *= sv(k) / (sv(k) * sv(k) + alpha);
  const Eigen::VectorXd u =
      op.wt.array().rsqrt().matrix().asDiagonal() * (svd.matrixV() * y);

  TikhonovSolution sol;
  sol.u.assign(u.data(), u.data() + u.size());
  const double v_l2 = weighted_l2(op.ds, v);
  const double v_l1 = weighted_l1(op.ds, v);
  auto record = [&](std::span<const double> coeff, double& out_l2, double& out_l1) {
    const std::vector<double> au = apply(op, coeff);
    const Eigen::Map<const Eigen::VectorXd> auv(au.data(), au.size());
    const Eigen::VectorXd r = auv - v;
    out_l2 = safe_ratio(weighted_l2(op.ds, r), v_l2);
    out_l1 = safe_ratio(weighted_l1(op.ds, r), v_l1);
  };
  record(sol.u, sol.residual_l2, sol.residual_l1);
  sol.u_nonneg = sol.u;
  for (double& x : sol.u_nonneg) x = std::max(x, 0.0);
  record(sol.u_nonneg, sol.residual_l2_nonneg, sol.residual_l1_nonneg);
  return sol;
}

}  // namespace ellgrow

#include "ellgrow.h"

#include <exception>
#include <string>
#include <vector>

#include "core/beltrami.hpp"
#include "core/dirichlet.hpp"
#include "core/errors.hpp"
#include "core/geometry.hpp"
#include "core/green.hpp"
#include "core/growth.hpp"
#include "core/inverse.hpp"
#include "core/oracle.hpp"
#include "core/quadrature.hpp"
#include "core/schrodinger.hpp"
#include "core/ufield.hpp"

using namespace ellgrow;

struct eg_domain {
  Domain d;
};
struct eg_kernel {
  GreenKernel k;
};
struct eg_rule {
  AreaRule r;
};
struct eg_operator {
  OperatorA a;
};
struct eg_trajectory {
  std::vector<Snapshot> snaps;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_json;

eg_status fail(eg_status code, const char* what) {
  g_error = what;
  return code;
}

template <typename F>
eg_status guarded(F&& f) {
  try {
    f();
    return EG_OK;
  } catch (const InputError& e) {
    return fail(EG_ERR_INPUT, e.what());
  } catch (const GeometryError& e) {
    return fail(EG_ERR_GEOMETRY, e.what());
  } catch (const DomainError& e) {
    return fail(EG_ERR_DOMAIN, e.what());
  } catch (const QuadratureError& e) {
    return fail(EG_ERR_QUADRATURE, e.what());
  } catch (const SingularityError& e) {
    return fail(EG_ERR_SINGULARITY, e.what());
  } catch (const EpsilonRangeError& e) {
    return fail(EG_ERR_EPSILON, e.what());
  } catch (const ShapeError& e) {
    return fail(EG_ERR_SHAPE, e.what());
  } catch (const KernelError& e) {
    return fail(EG_ERR_KERNEL, e.what());
  } catch (const FitError& e) {
    return fail(EG_ERR_FIT, e.what());
  } catch (const GrowthSignError& e) {
    return fail(EG_ERR_GROWTH_SIGN, e.what());
  } catch (const TopologyError& e) {
    return fail(EG_ERR_TOPOLOGY, e.what());
  } catch (const OracleError& e) {
    return fail(EG_ERR_ORACLE, e.what());
  } catch (const std::exception& e) {
    return fail(EG_ERR_UNKNOWN, e.what());
  } catch (...) {
    return fail(EG_ERR_UNKNOWN, "unknown failure");
  }
}

template <typename T>
const T& need(const T* p) {
  if (!p) throw InputError("null handle");
  return *p;
}

template <typename T>
T* need_out(T* p) {
  if (!p) throw InputError("null output pointer");
  return p;
}

const char* need_str(const char* s) {
  if (!s) throw InputError("null string");
  return s;
}

const BoundarySample& node_at(const GreenKernel& k, int j) {
  if (j < 0 || j >= k.boundary_count())
    throw InputError("boundary node index out of range");
  return k.boundary()[j];
}

UField field_for(const char* name) { return ufield_from_name(need_str(name)); }

}  // namespace

extern "C" {

const char* eg_version(void) { return "0.1.0"; }

const char* eg_last_error(void) { return g_error.c_str(); }

eg_status eg_domain_disk(eg_domain** out) {
  return guarded([&] { *need_out(out) = new eg_domain{Domain::disk()}; });
}

eg_status eg_domain_conformal(const double* coeff_re, const double* coeff_im, int m,
                              eg_domain** out) {
  return guarded([&] {
    need(coeff_re);
    need(coeff_im);
    if (m < 1) throw InputError("conformal map needs at least one coefficient");
    std::vector<Complex> c(m);
    for (int i = 0; i < m; ++i) c[i] = Complex(coeff_re[i], coeff_im[i]);
    *need_out(out) = new eg_domain{Domain::conformal(std::move(c))};
  });
}

eg_status eg_domain_curve(const double* xy, int n, eg_domain** out) {
  return guarded([&] {
    need(xy);
    if (n < 3) throw InputError("curve needs at least three points");
    std::vector<Complex> pts(n);
    for (int i = 0; i < n; ++i) pts[i] = Complex(xy[2 * i], xy[2 * i + 1]);
    *need_out(out) = new eg_domain{Domain::curve(std::move(pts))};
  });
}

eg_status eg_domain_from_json(const char* text, eg_domain** out) {
  return guarded([&] {
    *need_out(out) = new eg_domain{Domain::from_json(need_str(text))};
  });
}

const char* eg_domain_to_json(const eg_domain* dom) {
  if (!dom) {
    g_error = "null handle";
    return nullptr;
  }
  try {
    g_json = dom->d.to_json();
    return g_json.c_str();
  } catch (const std::exception& e) {
    g_error = e.what();
    return nullptr;
  }
}

eg_status eg_domain_contains(const eg_domain* dom, double x, double y, int* out) {
  return guarded([&] {
    *need_out(out) = need(dom).d.contains(Complex(x, y)) ? 1 : 0;
  });
}

void eg_domain_free(eg_domain* dom) { delete dom; }

eg_status eg_kernel_create(const eg_domain* dom, int n_boundary, eg_kernel** out) {
  return guarded([&] {
    *need_out(out) = new eg_kernel{GreenKernel(need(dom).d, n_boundary)};
  });
}

void eg_kernel_free(eg_kernel* k) { delete k; }

eg_status eg_kernel_boundary_count(const eg_kernel* k, int* out) {
  return guarded([&] { *need_out(out) = need(k).k.boundary_count(); });
}

eg_status eg_kernel_boundary(const eg_kernel* k, double* t, double* xy,
                             double* normal_xy, double* ds) {
  return guarded([&] {
    const auto& bnd = need(k).k.boundary();
    for (size_t j = 0; j < bnd.size(); ++j) {
      if (t) t[j] = bnd[j].t;
      if (xy) {
        xy[2 * j] = bnd[j].position.real();
        xy[2 * j + 1] = bnd[j].position.imag();
      }
      if (normal_xy) {
        normal_xy[2 * j] = bnd[j].normal.real();
        normal_xy[2 * j + 1] = bnd[j].normal.imag();
      }
      if (ds) ds[j] = bnd[j].ds;
    }
  });
}

eg_status eg_green(const eg_kernel* k, double zx, double zy, double wx, double wy,
                   double* out) {
  return guarded([&] {
    *need_out(out) = need(k).k.green(Complex(zx, zy), Complex(wx, wy));
  });
}

eg_status eg_poisson(const eg_kernel* k, double zx, double zy, int node, double* out) {
  return guarded([&] {
    const GreenKernel& kk = need(k).k;
    *need_out(out) = kk.poisson(Complex(zx, zy), node_at(kk, node));
  });
}

eg_status eg_poisson_profile(const eg_kernel* k, double wx, double wy, double* out) {
  return guarded([&] {
    const GreenKernel& kk = need(k).k;
    need_out(out);
    for (int j = 0; j < kk.boundary_count(); ++j)
      out[j] = kk.poisson(Complex(wx, wy), kk.boundary()[j]);
  });
}

eg_status eg_green_area_integral(const eg_kernel* k, double wx, double wy,
                                 double* out) {
  return guarded([&] { *need_out(out) = need(k).k.g1(Complex(wx, wy)); });
}

eg_status eg_harmonic_extension(const eg_kernel* k, const double* f, double zx,
                                double zy, double* out) {
  return guarded([&] {
    const GreenKernel& kk = need(k).k;
    need(f);
    const std::span<const double> fs(f, kk.boundary_count());
    *need_out(out) = kk.harmonic_extension(fs, Complex(zx, zy));
  });
}

eg_status eg_rule_create(const eg_domain* dom, int n_radial, int n_angular, double wx,
                         double wy, int use_singularity, eg_rule** out) {
  return guarded([&] {
    std::optional<Complex> sing;
    if (use_singularity) sing = Complex(wx, wy);
    *need_out(out) = new eg_rule{area_rule(need(dom).d, n_radial, n_angular, sing)};
  });
}

void eg_rule_free(eg_rule* r) { delete r; }

eg_status eg_rule_size(const eg_rule* r, int* out) {
  return guarded([&] { *need_out(out) = need(r).r.size(); });
}

eg_status eg_rule_nodes(const eg_rule* r, double* xy) {
  return guarded([&] {
    const AreaRule& rr = need(r).r;
    need_out(xy);
    for (size_t i = 0; i < rr.nodes.size(); ++i) {
      xy[2 * i] = rr.nodes[i].real();
      xy[2 * i + 1] = rr.nodes[i].imag();
    }
  });
}

eg_status eg_rule_weights(const eg_rule* r, double* wt) {
  return guarded([&] {
    const AreaRule& rr = need(r).r;
    need_out(wt);
    for (size_t i = 0; i < rr.weights.size(); ++i) wt[i] = rr.weights[i];
  });
}

eg_status eg_field_eval(const char* name, double x, double y, double* out) {
  return guarded([&] { *need_out(out) = field_for(name).value(Complex(x, y)); });
}

eg_status eg_flux_at(const eg_kernel* k, const eg_rule* r, const char* u, double eps,
                     double wx, double wy, int node, double* out) {
  return guarded([&] {
    const GreenKernel& kk = need(k).k;
    const SchrodingerGreen sg =
        solve_series(kk, need(r).r, field_for(u), eps, Complex(wx, wy));
    *need_out(out) = normal_derivative_exact(sg, node_at(kk, node));
  });
}

eg_status eg_flux_profile(const eg_kernel* k, const eg_rule* r, const char* u,
                          double eps, double wx, double wy, double* out) {
  return guarded([&] {
    const GreenKernel& kk = need(k).k;
    need_out(out);
    const SchrodingerGreen sg =
        solve_series(kk, need(r).r, field_for(u), eps, Complex(wx, wy));
    for (int j = 0; j < kk.boundary_count(); ++j)
      out[j] = normal_derivative_exact(sg, kk.boundary()[j]);
  });
}

eg_status eg_first_variation(const eg_kernel* k, const eg_rule* r, const char* u,
                             double wx, double wy, int node, double* out) {
  return guarded([&] {
    const GreenKernel& kk = need(k).k;
    *need_out(out) = first_variation(kk, need(r).r, field_for(u), Complex(wx, wy),
                                     node_at(kk, node));
  });
}

eg_status eg_second_variation(const eg_kernel* k, const eg_rule* r, const char* u,
                              double wx, double wy, int node, double* out) {
  return guarded([&] {
    const GreenKernel& kk = need(k).k;
    *need_out(out) = second_variation(kk, need(r).r, field_for(u), Complex(wx, wy),
                                      node_at(kk, node));
  });
}

eg_status eg_sweep(const eg_kernel* k, const eg_rule* r, const char* u, double wx,
                   double wy, int node, const double* eps_list, int n_eps,
                   double* base, double* delta1, double* delta2, double* flux_out,
                   double* slope_linear, double* slope_quadratic) {
  return guarded([&] {
    const GreenKernel& kk = need(k).k;
    need(eps_list);
    if (n_eps < 1) throw InputError("empty eps list");
    const VariationReport rep =
        epsilon_sweep(kk, need(r).r, field_for(u), Complex(wx, wy), node_at(kk, node),
                      std::span<const double>(eps_list, n_eps));
    if (base) *base = rep.base;
    if (delta1) *delta1 = rep.delta1;
    if (delta2) *delta2 = rep.delta2;
    if (flux_out)
      for (int i = 0; i < n_eps; ++i) flux_out[i] = rep.flux[i];
    if (slope_linear) *slope_linear = rep.slope_after_linear;
    if (slope_quadratic) *slope_quadratic = rep.slope_after_quadratic;
  });
}

eg_status eg_beltrami_flux_at(const eg_kernel* k, const eg_rule* r, const char* u,
                              double eps, double wx, double wy, int node,
                              double* out) {
  return guarded([&] {
    const GreenKernel& kk = need(k).k;
    *need_out(out) = beltrami_flux(kk, need(r).r, field_for(u), eps, Complex(wx, wy),
                                   node_at(kk, node));
  });
}

eg_status eg_beltrami_flux_profile(const eg_kernel* k, const eg_rule* r, const char* u,
                                   double eps, double wx, double wy, double* out) {
  return guarded([&] {
    const GreenKernel& kk = need(k).k;
    need_out(out);
    const BeltramiSetup setup = beltrami_setup(kk, need(r).r, field_for(u), eps);
    const BeltramiGreen bg = beltrami_green_star(setup, Complex(wx, wy));
    for (int j = 0; j < kk.boundary_count(); ++j)
      out[j] = beltrami_normal_derivative(setup, bg, kk.boundary()[j]);
  });
}

eg_status eg_beltrami_first_variation(const eg_kernel* k, const eg_rule* r,
                                      const char* u, double wx, double wy, int node,
                                      double* out) {
  return guarded([&] {
    const GreenKernel& kk = need(k).k;
    *need_out(out) = beltrami_first_variation(kk, need(r).r, field_for(u),
                                              Complex(wx, wy), node_at(kk, node));
  });
}

eg_status eg_beltrami_monotonicity(const eg_kernel* k, const eg_rule* r, const char* u,
                                   double wx, double wy, double* lhs, double* rhs) {
  return guarded([&] {
    const MonotonicityCheck chk = beltrami_boundary_monotonicity(
        need(k).k, need(r).r, field_for(u), Complex(wx, wy));
    if (lhs) *lhs = chk.lhs;
    if (rhs) *rhs = chk.rhs;
  });
}

eg_status eg_dirichlet_probe(const eg_kernel* k, const eg_rule* r, const double* f,
                             const char* u, double eps, double zx, double zy,
                             double* phi0, double* dphi, double* phi_eps,
                             double* bound) {
  return guarded([&] {
    const GreenKernel& kk = need(k).k;
    need(f);
    const std::span<const double> fs(f, kk.boundary_count());
    const UField uf = field_for(u);
    const Complex z(zx, zy);
    const DirichletProbe probe = solve_perturbed(kk, need(r).r, fs, uf, eps, z);
    if (phi0) *phi0 = probe.phi0;
    if (dphi) *dphi = probe.dphi;
    if (phi_eps) *phi_eps = probe.phi_eps;
    if (bound) *bound = linearization_bound(kk, need(r).r, fs, uf, z);
  });
}

eg_status eg_grow(const eg_domain* initial, eg_growth_op op, const char* u, double eps,
                  double wx, double wy, double dt, double t_end, int snapshot_stride,
                  int quad_radial, int quad_angular, eg_trajectory** out) {
  return guarded([&] {
    GrowthParams p;
    switch (op) {
      case EG_GROWTH_LAPLACE:
        p.op = GrowthOperator::Laplace;
        p.u = u_const(0.0);
        break;
      case EG_GROWTH_SCHRODINGER:
        p.op = GrowthOperator::Schrodinger;
        p.u = field_for(u);
        break;
      case EG_GROWTH_BELTRAMI:
        p.op = GrowthOperator::Beltrami;
        p.u = field_for(u);
        break;
      default:
        throw InputError("unknown growth operator");
    }
    p.eps = eps;
    p.w = Complex(wx, wy);
    p.dt = dt;
    p.t_end = t_end;
    p.snapshot_stride = snapshot_stride;
    p.quad_radial = quad_radial;
    p.quad_angular = quad_angular;
    *need_out(out) = new eg_trajectory{growth_run(need(initial).d, p)};
  });
}

void eg_trajectory_free(eg_trajectory* traj) { delete traj; }

eg_status eg_trajectory_count(const eg_trajectory* traj, int* out) {
  return guarded([&] {
    *need_out(out) = static_cast<int>(need(traj).snaps.size());
  });
}

eg_status eg_trajectory_info(const eg_trajectory* traj, int i, double* t, double* area,
                             double* perimeter, int* n_points) {
  return guarded([&] {
    const auto& snaps = need(traj).snaps;
    if (i < 0 || i >= static_cast<int>(snaps.size()))
      throw InputError("snapshot index out of range");
    if (t) *t = snaps[i].t;
    if (area) *area = snaps[i].area;
    if (perimeter) *perimeter = snaps[i].perimeter;
    if (n_points) *n_points = static_cast<int>(snaps[i].points.size());
  });
}

eg_status eg_trajectory_points(const eg_trajectory* traj, int i, double* xy) {
  return guarded([&] {
    const auto& snaps = need(traj).snaps;
    if (i < 0 || i >= static_cast<int>(snaps.size()))
      throw InputError("snapshot index out of range");
    need_out(xy);
    for (size_t j = 0; j < snaps[i].points.size(); ++j) {
      xy[2 * j] = snaps[i].points[j].real();
      xy[2 * j + 1] = snaps[i].points[j].imag();
    }
  });
}

eg_status eg_operator_assemble(const eg_kernel* k, const eg_rule* r, double wx,
                               double wy, eg_operator** out) {
  return guarded([&] {
    *need_out(out) =
        new eg_operator{assemble(need(k).k, need(r).r, Complex(wx, wy))};
  });
}

void eg_operator_free(eg_operator* op) { delete op; }

eg_status eg_operator_dims(const eg_operator* op, int* rows, int* cols) {
  return guarded([&] {
    if (rows) *rows = need(op).a.rows();
    if (cols) *cols = need(op).a.cols();
  });
}

eg_status eg_operator_entry(const eg_operator* op, int i, int j, double* base,
                            double* corrected) {
  return guarded([&] {
    const OperatorA& a = need(op).a;
    if (i < 0 || i >= a.rows() || j < 0 || j >= a.cols())
      throw InputError("entry index out of range");
    if (base) *base = a.base(i, j);
    if (corrected) *corrected = a.base(i, j) + a.correction(i, j);
  });
}

eg_status eg_operator_apply(const eg_operator* op, const double* u, double* out) {
  return guarded([&] {
    const OperatorA& a = need(op).a;
    need(u);
    need_out(out);
    const std::vector<double> v =
        apply(a, std::span<const double>(u, a.cols()));
    for (size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  });
}

eg_status eg_operator_apply_adjoint(const eg_operator* op, const double* v,
                                    double* out) {
  return guarded([&] {
    const OperatorA& a = need(op).a;
    need(v);
    need_out(out);
    const std::vector<double> u =
        apply_adjoint(a, std::span<const double>(v, a.rows()));
    for (size_t i = 0; i < u.size(); ++i) out[i] = u[i];
  });
}

eg_status eg_operator_spectrum(const eg_operator* op, double* singular_values,
                               double* condition, int* rank, int* degenerate) {
  return guarded([&] {
    const SpectrumReport rep = spectrum(need(op).a);
    if (singular_values)
      for (size_t i = 0; i < rep.singular_values.size(); ++i)
        singular_values[i] = rep.singular_values[i];
    if (condition) *condition = rep.condition;
    if (rank) *rank = rep.rank;
    if (degenerate) *degenerate = rep.degenerate ? 1 : 0;
  });
}

eg_status eg_operator_solve(const eg_operator* op, const double* target, double alpha,
                            double* u, double* res_l2, double* res_l1,
                            double* u_nonneg, double* res_l2_nonneg,
                            double* res_l1_nonneg) {
  return guarded([&] {
    const OperatorA& a = need(op).a;
    need(target);
    const TikhonovSolution sol =
        solve_tikhonov(a, std::span<const double>(target, a.rows()), alpha);
    if (u)
      for (size_t i = 0; i < sol.u.size(); ++i) u[i] = sol.u[i];
    if (res_l2) *res_l2 = sol.residual_l2;
    if (res_l1) *res_l1 = sol.residual_l1;
    if (u_nonneg)
      for (size_t i = 0; i < sol.u_nonneg.size(); ++i) u_nonneg[i] = sol.u_nonneg[i];
    if (res_l2_nonneg) *res_l2_nonneg = sol.residual_l2_nonneg;
    if (res_l1_nonneg) *res_l1_nonneg = sol.residual_l1_nonneg;
  });
}

eg_status eg_bessel_i0(double x, double* out) {
  return guarded([&] { *need_out(out) = bessel_I0(x); });
}

eg_status eg_bessel_flux(double eps, double* out) {
  return guarded([&] { *need_out(out) = bessel_flux(eps); });
}

eg_status eg_fd_flux(int n_r, int n_t, const char* u, double eps, double wx, double wy,
                     double* flux, double* angles) {
  return guarded([&] {
    const UField uf = field_for(u);
    auto q = [&](Complex z) { return eps * uf.value(z); };
    const PolarGridField h = fd_green(n_r, n_t, q, Complex(wx, wy));
    const std::vector<double> fl = fd_green_flux(h, Complex(wx, wy));
    need_out(flux);
    for (size_t j = 0; j < fl.size(); ++j) flux[j] = fl[j];
    if (angles) {
      const std::vector<double> th = h.boundary_angles();
      for (size_t j = 0; j < th.size(); ++j) angles[j] = th[j];
    }
  });
}

eg_status eg_fd_green_eval(int n_r, int n_t, const char* u, double eps, double wx,
                           double wy, double zx, double zy, double* out) {
  return guarded([&] {
    const UField uf = field_for(u);
    auto q = [&](Complex z) { return eps * uf.value(z); };
    const Complex w(wx, wy), z(zx, zy);
    const PolarGridField h = fd_green(n_r, n_t, q, w);
    const GreenKernel disk(Domain::disk(), 16);
    *need_out(out) = disk.green(z, w) + h.eval(z);
  });
}

}  // extern "C"

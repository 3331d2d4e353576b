#ifndef ELLGROW_H
#define ELLGROW_H

/* C interface to the ellgrow library: Green functions of the Laplacian and
 * its Schrodinger / divergence-form perturbations on planar domains, the
 * induced boundary-growth dynamics, and the regularized inverse problem for
 * the perturbation coefficient.
 *
 * Conventions: every function returns eg_status; EG_OK means the outputs
 * were written.  On failure eg_last_error() describes the problem (the
 * pointer stays valid until the next failing call on the same thread).
 * Points are passed as separate x, y doubles; packed arrays interleave
 * coordinates as x0, y0, x1, y1, ...  Coefficient fields u are named by
 * registry strings: "const:0.5", "re" (1 + Re z), "abs2" (|z|^2),
 * "gaussian:sigma:cx,cy". */

#if defined(EG_BUILD)
#define EG_API __attribute__((visibility("default")))
#else
#define EG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum eg_status {
  EG_OK = 0,
  EG_ERR_INPUT = 1,       /* bad argument or unknown field name */
  EG_ERR_GEOMETRY = 2,    /* invalid domain data */
  EG_ERR_DOMAIN = 3,      /* point outside the domain */
  EG_ERR_QUADRATURE = 4,  /* rule construction or clearance failure */
  EG_ERR_SINGULARITY = 5, /* evaluation at the source point */
  EG_ERR_EPSILON = 6,     /* eps outside the admissible range */
  EG_ERR_SHAPE = 7,       /* array length mismatch */
  EG_ERR_KERNEL = 8,      /* series failed to converge */
  EG_ERR_FIT = 9,         /* not enough data for a fit */
  EG_ERR_GROWTH_SIGN = 10,/* inward boundary velocity */
  EG_ERR_TOPOLOGY = 11,   /* boundary self-intersection or lost nesting */
  EG_ERR_ORACLE = 12,     /* reference solver failure */
  EG_ERR_UNKNOWN = 99
} eg_status;

typedef enum eg_growth_op {
  EG_GROWTH_LAPLACE = 0,
  EG_GROWTH_SCHRODINGER = 1,
  EG_GROWTH_BELTRAMI = 2
} eg_growth_op;

typedef struct eg_domain eg_domain;
typedef struct eg_kernel eg_kernel;
typedef struct eg_rule eg_rule;
typedef struct eg_operator eg_operator;
typedef struct eg_trajectory eg_trajectory;

EG_API const char* eg_version(void);
EG_API const char* eg_last_error(void);

/* ---- domains ---- */

EG_API eg_status eg_domain_disk(eg_domain** out);
/* Conformal image of the unit disk under c_1 w + ... + c_m w^m. */
EG_API eg_status eg_domain_conformal(const double* coeff_re, const double* coeff_im,
                                     int m, eg_domain** out);
/* Closed marker curve from n interleaved points, positively oriented. */
EG_API eg_status eg_domain_curve(const double* xy, int n, eg_domain** out);
EG_API eg_status eg_domain_from_json(const char* text, eg_domain** out);
/* Library-owned string, valid until the next call on the same thread;
 * NULL on failure. */
EG_API const char* eg_domain_to_json(const eg_domain* dom);
EG_API eg_status eg_domain_contains(const eg_domain* dom, double x, double y, int* out);
EG_API void eg_domain_free(eg_domain* dom);

/* ---- Green kernel on n_boundary boundary nodes ---- */

EG_API eg_status eg_kernel_create(const eg_domain* dom, int n_boundary, eg_kernel** out);
EG_API void eg_kernel_free(eg_kernel* k);
EG_API eg_status eg_kernel_boundary_count(const eg_kernel* k, int* out);
/* Any output pointer may be NULL.  xy and normal_xy take 2n doubles. */
EG_API eg_status eg_kernel_boundary(const eg_kernel* k, double* t, double* xy,
                                    double* normal_xy, double* ds);
/* g_w(z); nonpositive, zero trace on the boundary. */
EG_API eg_status eg_green(const eg_kernel* k, double zx, double zy, double wx,
                          double wy, double* out);
/* Poisson kernel P(z, zeta_node). */
EG_API eg_status eg_poisson(const eg_kernel* k, double zx, double zy, int node,
                            double* out);
/* P(w, zeta_j) for every boundary node; boundary_count values. */
EG_API eg_status eg_poisson_profile(const eg_kernel* k, double wx, double wy,
                                    double* out);
/* int_D g_w dA */
EG_API eg_status eg_green_area_integral(const eg_kernel* k, double wx, double wy,
                                        double* out);
/* Harmonic extension of boundary data f (boundary_count values) to z. */
EG_API eg_status eg_harmonic_extension(const eg_kernel* k, const double* f,
                                       double zx, double zy, double* out);

/* ---- area quadrature ---- */

/* n_radial x n_angular tensor rule (disk/conformal) or triangulated rule
 * (curve).  With use_singularity nonzero the rule keeps its nodes clear of
 * (wx, wy); pass the source point of any later perturbed solve. */
EG_API eg_status eg_rule_create(const eg_domain* dom, int n_radial, int n_angular,
                                double wx, double wy, int use_singularity,
                                eg_rule** out);
EG_API void eg_rule_free(eg_rule* r);
EG_API eg_status eg_rule_size(const eg_rule* r, int* out);
EG_API eg_status eg_rule_nodes(const eg_rule* r, double* xy);
EG_API eg_status eg_rule_weights(const eg_rule* r, double* wt);

/* Evaluate a named coefficient field. */
EG_API eg_status eg_field_eval(const char* name, double x, double y, double* out);

/* ---- perturbed operator Delta - eps*u ---- */

/* d_n g*_w at one boundary node / at every boundary node. */
EG_API eg_status eg_flux_at(const eg_kernel* k, const eg_rule* r, const char* u,
                            double eps, double wx, double wy, int node, double* out);
EG_API eg_status eg_flux_profile(const eg_kernel* k, const eg_rule* r, const char* u,
                                 double eps, double wx, double wy, double* out);
/* First and second variations of the flux in eps at 0. */
EG_API eg_status eg_first_variation(const eg_kernel* k, const eg_rule* r, const char* u,
                                    double wx, double wy, int node, double* out);
EG_API eg_status eg_second_variation(const eg_kernel* k, const eg_rule* r, const char* u,
                                     double wx, double wy, int node, double* out);
/* Exact fluxes over an eps list plus the log-log orders of the remainders
 * after removing the linear and the linear+quadratic models.  flux_out
 * receives n_eps values; every other output is a single double. */
EG_API eg_status eg_sweep(const eg_kernel* k, const eg_rule* r, const char* u,
                          double wx, double wy, int node, const double* eps_list,
                          int n_eps, double* base, double* delta1, double* delta2,
                          double* flux_out, double* slope_linear,
                          double* slope_quadratic);

/* ---- divergence-form operator div((1 + eps*u) grad .) ---- */

EG_API eg_status eg_beltrami_flux_at(const eg_kernel* k, const eg_rule* r,
                                     const char* u, double eps, double wx, double wy,
                                     int node, double* out);
EG_API eg_status eg_beltrami_flux_profile(const eg_kernel* k, const eg_rule* r,
                                          const char* u, double eps, double wx,
                                          double wy, double* out);
EG_API eg_status eg_beltrami_first_variation(const eg_kernel* k, const eg_rule* r,
                                             const char* u, double wx, double wy,
                                             int node, double* out);
/* Boundary integral of the first variation (lhs) next to the reference
 * value -2 int u d_n g_w ds (rhs). */
EG_API eg_status eg_beltrami_monotonicity(const eg_kernel* k, const eg_rule* r,
                                          const char* u, double wx, double wy,
                                          double* lhs, double* rhs);

/* ---- perturbed Dirichlet problem ---- */

/* f holds boundary data on the kernel's nodes.  Outputs: harmonic value,
 * first variation per unit eps, exact perturbed value, and the a-priori
 * bound |dphi| <= |u|_2 |g_z|_2 |f|_inf.  Any output may be NULL. */
EG_API eg_status eg_dirichlet_probe(const eg_kernel* k, const eg_rule* r,
                                    const double* f, const char* u, double eps,
                                    double zx, double zy, double* phi0, double* dphi,
                                    double* phi_eps, double* bound);

/* ---- boundary growth ---- */

/* Run dt-steps of outward growth of a marker-curve domain until t_end,
 * with boundary velocity d_n g*_w for the chosen operator (u and eps are
 * ignored for EG_GROWTH_LAPLACE).  Snapshots are kept every
 * snapshot_stride steps plus the initial and final states. */
EG_API eg_status eg_grow(const eg_domain* initial, eg_growth_op op, const char* u,
                         double eps, double wx, double wy, double dt, double t_end,
                         int snapshot_stride, int quad_radial, int quad_angular,
                         eg_trajectory** out);
EG_API void eg_trajectory_free(eg_trajectory* traj);
EG_API eg_status eg_trajectory_count(const eg_trajectory* traj, int* out);
EG_API eg_status eg_trajectory_info(const eg_trajectory* traj, int i, double* t,
                                    double* area, double* perimeter, int* n_points);
EG_API eg_status eg_trajectory_points(const eg_trajectory* traj, int i, double* xy);

/* ---- inverse operator A u(zeta) = int u g_w P_zeta dA ---- */

EG_API eg_status eg_operator_assemble(const eg_kernel* k, const eg_rule* r, double wx,
                                      double wy, eg_operator** out);
EG_API void eg_operator_free(eg_operator* op);
EG_API eg_status eg_operator_dims(const eg_operator* op, int* rows, int* cols);
/* Raw kernel entry wt_j g_w(z_j) P(z_j, zeta_i) and the corrected entry. */
EG_API eg_status eg_operator_entry(const eg_operator* op, int i, int j, double* base,
                                   double* corrected);
EG_API eg_status eg_operator_apply(const eg_operator* op, const double* u, double* out);
EG_API eg_status eg_operator_apply_adjoint(const eg_operator* op, const double* v,
                                           double* out);
/* singular_values receives min(rows, cols) entries, descending; any output
 * may be NULL. */
EG_API eg_status eg_operator_spectrum(const eg_operator* op, double* singular_values,
                                      double* condition, int* rank, int* degenerate);
/* Tikhonov solve with weight alpha > 0.  u and u_nonneg receive cols
 * entries; residuals are relative in the boundary L2 / L1 norms.  Any
 * output may be NULL. */
EG_API eg_status eg_operator_solve(const eg_operator* op, const double* target,
                                   double alpha, double* u, double* res_l2,
                                   double* res_l1, double* u_nonneg,
                                   double* res_l2_nonneg, double* res_l1_nonneg);

/* ---- independent reference solvers ---- */

EG_API eg_status eg_bessel_i0(double x, double* out);
/* Flux of the eps-perturbed disk Green function with u = 1, w = 0. */
EG_API eg_status eg_bessel_flux(double eps, double* out);
/* Finite-difference flux profile of d_n g* on the unit disk for potential
 * eps*u, n_t values; angles may be NULL. */
EG_API eg_status eg_fd_flux(int n_r, int n_t, const char* u, double eps, double wx,
                            double wy, double* flux, double* angles);
/* Finite-difference g*_w evaluated at (zx, zy). */
EG_API eg_status eg_fd_green_eval(int n_r, int n_t, const char* u, double eps,
                                  double wx, double wy, double zx, double zy,
                                  double* out);

#ifdef __cplusplus
}
#endif

#endif /* ELLGROW_H */

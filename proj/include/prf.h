/*
 * prf - partial Ricci flow laboratory, C interface.
 *
 * The library simulates the flow of warped product metrics (a forced 1-D heat
 * equation for the warping function), evaluates the curvature identities and
 * convergence estimates attached to it, solves the decoupled eigenvalue ODEs
 * of geodesic Riemannian foliations, and computes the Adams/Ferus numbers.
 *
 * All entry points return prf_status; every other output travels through
 * pointers. Objects are opaque handles released with their _destroy function.
 * On failure, prf_last_error_message() describes the most recent error in the
 * calling thread.
 */
#ifndef PRF_H
#define PRF_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum prf_status {
    PRF_OK = 0,
    PRF_ERR_INVALID_ARGUMENT,
    PRF_ERR_NONPOSITIVE_WARPING,
    PRF_ERR_INSUFFICIENT_SNAPSHOTS,
    PRF_ERR_BOUNDARY_MISMATCH,
    PRF_ERR_INVALID_BOUNDARY,
    PRF_ERR_RESONANCE_UNSOLVABLE,
    PRF_ERR_SINGULAR_DENOMINATOR,
    PRF_ERR_MISSING_SOLUTION,
    PRF_ERR_NONVANISHING_ENDPOINTS,
    PRF_ERR_DIVERGENT_AT_ZERO,
    PRF_ERR_SUPERCRITICAL_M2,
    PRF_ERR_NOT_RESONANT,
    PRF_ERR_NON_INTEGRABLE_BOUNDARY,
    PRF_ERR_BOUND_HYPOTHESIS_VIOLATED,
    PRF_ERR_BLOW_UP,
    PRF_ERR_NON_NEGATIVE_RATE,
    PRF_ERR_TOO_SHORT,
    PRF_ERR_INTERNAL
} prf_status;

const char* prf_status_name(prf_status status);
/* Message for the last failing call on this thread; empty string if none. */
const char* prf_last_error_message(void);
/* Numeric payload of the last error (blow-up time, boundary gap, ...). */
double prf_last_error_detail(void);

/* ---- warped product metrics -------------------------------------------- */

typedef struct prf_metric prf_metric;

/* count = m + 1 uniform samples of the warping function on [0, l]. */
prf_status prf_metric_create(double l, int fiber_dim, const double* phi, int count,
                             prf_metric** out);
void prf_metric_destroy(prf_metric* metric);
int prf_metric_sample_count(const prf_metric* metric);
double prf_metric_length(const prf_metric* metric);
int prf_metric_fiber_dim(const prf_metric* metric);
prf_status prf_metric_values(const prf_metric* metric, double* out /* count */);

/* Pointwise curvature data; arrays of length count. Entries where the
 * curvature quotient is undefined (phi ~ 0) are NaN with available = 0. */
typedef struct prf_curvature prf_curvature;

prf_status prf_curvature_eval(const prf_metric* metric, prf_curvature** out);
void prf_curvature_destroy(prf_curvature* curv);
int prf_curvature_count(const prf_curvature* curv);
prf_status prf_curvature_get(const prf_curvature* curv, double* a, double* rho, double* tau1,
                             double* ric_n, double* k_mix, double* sc_mix,
                             int32_t* available /* any may be NULL */);

typedef struct prf_residual_report {
    double max_residual;
    double rms_residual;
    double lhs_max;
    double rhs_max;
    int64_t points;
} prf_residual_report;

/* Riccati identity a_x = a^2 + rho; quotient_cap <= 0 selects the default
 * trust window (|a| <= 2). */
prf_status prf_check_riccati(const prf_metric* metric, double quotient_cap,
                             prf_residual_report* out);

/* ---- boundary data ------------------------------------------------------ */

typedef struct prf_boundary prf_boundary;

prf_status prf_boundary_constant(double mu0, double mu1, prf_boundary** out);
/* mu_j(t) = mu_tilde_j + delta_j exp(-rate_j t), rates > 0. */
prf_status prf_boundary_exponential(double mu_tilde0, double delta0, double rate0,
                                    double mu_tilde1, double delta1, double rate1,
                                    prf_boundary** out);
/* Uniformly spaced samples of both endpoint values. */
prf_status prf_boundary_tabulated(const double* times, const double* values0,
                                  const double* values1, int count, prf_boundary** out);
void prf_boundary_destroy(prf_boundary* boundary);
prf_status prf_boundary_mu(const prf_boundary* boundary, int endpoint, double t, double* out);
prf_status prf_boundary_mu_tilde(const prf_boundary* boundary, int endpoint, double* out);

/* U(t,x) and f(t,x) = Phi U - dU/dt. */
prf_status prf_lift(const prf_boundary* boundary, double t, double x, double l, double* out);
prf_status prf_forcing(const prf_boundary* boundary, double phi_param, double t, double x,
                       double l, double* out);

/* ---- stationary profiles ------------------------------------------------ */

typedef enum prf_regime {
    PRF_REGIME_SUBCRITICAL_TRIG = 0,
    PRF_REGIME_ZERO,
    PRF_REGIME_NEGATIVE,
    PRF_REGIME_RESONANCE_FAMILY,
    PRF_REGIME_RESONANCE_UNSOLVABLE,
    PRF_REGIME_SUPERCRITICAL
} prf_regime;

typedef struct prf_stationary prf_stationary;

/* Pass has_family_c = 0 when no resonance free constant is supplied. */
prf_status prf_stationary_solve(double phi_param, double l, double mu0, double mu1,
                                int has_family_c, double family_c, prf_stationary** out);
void prf_stationary_destroy(prf_stationary* stationary);
prf_status prf_stationary_regime(const prf_stationary* stationary, prf_regime* out);
prf_status prf_stationary_stable(const prf_stationary* stationary, int* out);
prf_status prf_stationary_has_solution(const prf_stationary* stationary, int* out);
prf_status prf_stationary_evaluate(const prf_stationary* stationary, double x, double* out);
prf_status prf_stationary_sample(const prf_stationary* stationary, int m,
                                 double* out /* m+1 */);
prf_status prf_stationary_residual(const prf_stationary* stationary, double phi_param, int m,
                                   double* out);

/* ---- flow ---------------------------------------------------------------- */

typedef enum prf_backend {
    PRF_BACKEND_FINITE_DIFFERENCE = 0,
    PRF_BACKEND_SPECTRAL = 1
} prf_backend;

typedef struct prf_flow_config {
    double phi_param;
    double t_end;
    double dt;
    int m;               /* grid intervals, must match the initial metric */
    int backend;         /* prf_backend */
    int series_terms;    /* spectral truncation; 0 selects m/2 */
    int snapshot_stride; /* record every this many steps */
} prf_flow_config;

typedef struct prf_trajectory prf_trajectory;

prf_status prf_evolve(const prf_metric* phi0, const prf_boundary* boundary,
                      const prf_flow_config* config, prf_trajectory** out);
void prf_trajectory_destroy(prf_trajectory* trajectory);
int prf_trajectory_snapshot_count(const prf_trajectory* trajectory);
int prf_trajectory_grid_intervals(const prf_trajectory* trajectory);
prf_status prf_trajectory_time(const prf_trajectory* trajectory, int snapshot, double* out);
prf_status prf_trajectory_values(const prf_trajectory* trajectory, int snapshot,
                                 double* out /* m+1 */);
/* diverged flag (0/1) plus the truncation time when set. */
prf_status prf_trajectory_divergence(const prf_trajectory* trajectory, int* diverged,
                                     double* time);
prf_status prf_trajectory_tail_estimate(const prf_trajectory* trajectory, double* out);
/* Max |phi_a - phi_b| over the shared snapshots. */
prf_status prf_trajectory_distance(const prf_trajectory* a, const prf_trajectory* b,
                                   double* out);

/* Sine coefficients (2/l) int f sin(pi j x / l) of endpoint-vanishing samples. */
prf_status prf_sine_coefficients(const double* samples, int count, double l, int terms,
                                 double* out /* terms */);

/* ---- evolution identity checks ------------------------------------------ */

prf_status prf_check_a_evolution(const prf_trajectory* trajectory, double phi_param,
                                 double quotient_cap, prf_residual_report* out);
prf_status prf_check_tau1_evolution(const prf_trajectory* trajectory, int fiber_dim,
                                    double quotient_cap, prf_residual_report* out,
                                    double* form_gap);
prf_status prf_check_rn_evolution(const prf_trajectory* trajectory, double quotient_cap,
                                  prf_residual_report* out);
/* holds = 1 when the two-sided metric envelope is satisfied. */
prf_status prf_check_rn_envelope(const prf_trajectory* trajectory, double c_bound,
                                 int* holds);

/* ---- convergence estimates ----------------------------------------------- */

prf_status prf_nu(const prf_boundary* boundary, double phi_param, double t, double* out);

typedef struct prf_series_constants {
    double m0, m0_tail;
    double m1, m1_tail;
    double m2, m2_tail; /* NaN when Phi >= (pi/l)^2 */
    double m0_res, m0_res_tail;
    double m1_res, m1_res_tail;
} prf_series_constants;

prf_status prf_series_constants_eval(double phi_param, double l, double t, double theta,
                                     prf_series_constants* out);

typedef struct prf_bound_entry {
    double t;
    double theta;
    double observed;
    double bound;
    double margin;
    double truncation_tail;
} prf_bound_entry;

prf_status prf_subcritical_bound(const prf_trajectory* trajectory,
                                 const prf_boundary* boundary, double phi_param, double theta,
                                 double t, prf_bound_entry* out);
prf_status prf_resonance_bound(const prf_trajectory* trajectory, const prf_boundary* boundary,
                               double theta, double t, prf_bound_entry* out);
/* Coefficient of sin(pi x / l) in the resonance limit profile. */
prf_status prf_limit_profile_resonance(const prf_metric* phi0, const prf_boundary* boundary,
                                       double l, double* coefficient);
prf_status prf_ode_envelope(double a, double y0, double nu_sup_left, double nu_sup_right,
                            double t, double theta, double* out);

typedef enum prf_growth_kind {
    PRF_GROWTH_NONE = 0,
    PRF_GROWTH_EXPONENTIAL = 1,
    PRF_GROWTH_LINEAR = 2
} prf_growth_kind;

prf_status prf_divergence_rate(const prf_trajectory* trajectory, int* kind, double* rate,
                               double* slope);
prf_status prf_first_sine_coefficient(const prf_trajectory* trajectory, int snapshot,
                                      double* out);

/* ---- eigenvalue flow of geodesic Riemannian foliations ------------------- */

prf_status prf_eigen_closed_form(double mu0, double phi_param, double t, double* out);
/* has_blow_up = 0 leaves t_star untouched. */
prf_status prf_eigen_blow_up_time(double mu0, double phi_param, int* has_blow_up,
                                  double* t_star);
/* values must hold steps+1 doubles; written count is steps+1 or the halt
 * point. halted_step = -1 when the run completed. */
prf_status prf_eigen_rk4(double mu0, double phi_param, double dt, int64_t steps,
                         double* values, int64_t* written, int64_t* halted_step);
prf_status prf_tsharp_flow(double theta0, double phi_param, double t, double* out);
/* Ric_N(t) for eigenvalues mus[0..n-1] plus the minimum margin of the trace
 * inequality dRic/dt >= (4/n) Ric^2 - 4 Phi Ric over sample times. */
prf_status prf_ric_n_flow(const double* mus, int n, double phi_param, double t,
                          double* value, double* inequality_margin);

/* ---- Adams and Ferus numbers --------------------------------------------- */

typedef struct prf_adams_decomposition {
    uint64_t n;
    uint64_t odd_part;
    int32_t d;
    int32_t c;
    uint64_t rho;
} prf_adams_decomposition;

prf_status prf_adams_rho(uint64_t n, prf_adams_decomposition* out);
prf_status prf_ferus_number(uint64_t l, uint64_t* out);
prf_status prf_ferus_check(uint64_t p, uint64_t n, int* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PRF_H */

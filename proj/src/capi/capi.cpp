#include "prf.h"

#include <cstring>
#include <limits>
#include <optional>
#include <string>

#include "core/bounds.hpp"
#include "core/eigenflow.hpp"
#include "core/errors.hpp"
#include "core/flow.hpp"
#include "core/geometry.hpp"
#include "core/grid.hpp"
#include "core/stationary.hpp"
#include "core/topology.hpp"

struct prf_metric {
    prf::WarpedProductMetric value;
};
struct prf_curvature {
    prf::CurvatureSnapshot value;
};
struct prf_boundary {
    prf::BoundaryData value;
};
struct prf_stationary {
    prf::StationaryResult value;
};
struct prf_trajectory {
    prf::Trajectory value;
};

namespace {

thread_local std::string g_last_message;
thread_local double g_last_detail = 0.0;

prf_status map_code(prf::ErrorCode code) {
    using prf::ErrorCode;
    switch (code) {
        case ErrorCode::InvalidArgument: return PRF_ERR_INVALID_ARGUMENT;
        case ErrorCode::NonPositiveWarping: return PRF_ERR_NONPOSITIVE_WARPING;
        case ErrorCode::InsufficientSnapshots: return PRF_ERR_INSUFFICIENT_SNAPSHOTS;
        case ErrorCode::BoundaryMismatch: return PRF_ERR_BOUNDARY_MISMATCH;
        case ErrorCode::InvalidBoundary: return PRF_ERR_INVALID_BOUNDARY;
        case ErrorCode::ResonanceUnsolvable: return PRF_ERR_RESONANCE_UNSOLVABLE;
        case ErrorCode::SingularDenominator: return PRF_ERR_SINGULAR_DENOMINATOR;
        case ErrorCode::MissingSolution: return PRF_ERR_MISSING_SOLUTION;
        case ErrorCode::NonVanishingEndpoints: return PRF_ERR_NONVANISHING_ENDPOINTS;
        case ErrorCode::DivergentAtZero: return PRF_ERR_DIVERGENT_AT_ZERO;
        case ErrorCode::SupercriticalM2: return PRF_ERR_SUPERCRITICAL_M2;
        case ErrorCode::NotResonant: return PRF_ERR_NOT_RESONANT;
        case ErrorCode::NonIntegrableBoundary: return PRF_ERR_NON_INTEGRABLE_BOUNDARY;
        case ErrorCode::BoundHypothesisViolated: return PRF_ERR_BOUND_HYPOTHESIS_VIOLATED;
        case ErrorCode::BlowUp: return PRF_ERR_BLOW_UP;
        case ErrorCode::NonNegativeRate: return PRF_ERR_NON_NEGATIVE_RATE;
        case ErrorCode::TooShort: return PRF_ERR_TOO_SHORT;
    }
    return PRF_ERR_INTERNAL;
}

template <typename F>
prf_status guarded(F&& body) {
    try {
        body();
        g_last_message.clear();
        g_last_detail = 0.0;
        return PRF_OK;
    } catch (const prf::Error& e) {
        g_last_message = e.what();
        g_last_detail = e.detail();
        return map_code(e.code());
    } catch (const std::exception& e) {
        g_last_message = e.what();
        g_last_detail = 0.0;
        return PRF_ERR_INTERNAL;
    } catch (...) {
        g_last_message = "unknown failure";
        g_last_detail = 0.0;
        return PRF_ERR_INTERNAL;
    }
}

void require(bool condition, const char* message) {
    if (!condition) prf::raise(prf::ErrorCode::InvalidArgument, message);
}

double resolve_cap(double quotient_cap) {
    return quotient_cap > 0.0 ? quotient_cap : prf::kDefaultQuotientCap;
}

prf_residual_report pack(const prf::ResidualReport& rep) {
    return {rep.max_residual, rep.rms_residual, rep.lhs_max, rep.rhs_max,
            static_cast<int64_t>(rep.points)};
}

prf_bound_entry pack(const prf::BoundEntry& entry) {
    return {entry.t, entry.theta, entry.observed, entry.bound, entry.margin,
            entry.truncation_tail};
}

} // namespace

extern "C" {

const char* prf_status_name(prf_status status) {
    switch (status) {
        case PRF_OK: return "Ok";
        case PRF_ERR_INVALID_ARGUMENT: return "InvalidArgument";
        case PRF_ERR_NONPOSITIVE_WARPING: return "NonPositiveWarping";
        case PRF_ERR_INSUFFICIENT_SNAPSHOTS: return "InsufficientSnapshots";
        case PRF_ERR_BOUNDARY_MISMATCH: return "BoundaryMismatch";
        case PRF_ERR_INVALID_BOUNDARY: return "InvalidBoundary";
        case PRF_ERR_RESONANCE_UNSOLVABLE: return "ResonanceUnsolvable";
        case PRF_ERR_SINGULAR_DENOMINATOR: return "SingularDenominator";
        case PRF_ERR_MISSING_SOLUTION: return "MissingSolution";
        case PRF_ERR_NONVANISHING_ENDPOINTS: return "NonVanishingEndpoints";
        case PRF_ERR_DIVERGENT_AT_ZERO: return "DivergentAtZero";
        case PRF_ERR_SUPERCRITICAL_M2: return "SupercriticalM2";
        case PRF_ERR_NOT_RESONANT: return "NotResonant";
        case PRF_ERR_NON_INTEGRABLE_BOUNDARY: return "NonIntegrableBoundary";
        case PRF_ERR_BOUND_HYPOTHESIS_VIOLATED: return "BoundHypothesisViolated";
        case PRF_ERR_BLOW_UP: return "BlowUp";
        case PRF_ERR_NON_NEGATIVE_RATE: return "NonNegativeRate";
        case PRF_ERR_TOO_SHORT: return "TooShort";
        case PRF_ERR_INTERNAL: return "Internal";
    }
    return "Unknown";
}

const char* prf_last_error_message(void) { return g_last_message.c_str(); }
double prf_last_error_detail(void) { return g_last_detail; }

/* ---- metrics ------------------------------------------------------------- */

prf_status prf_metric_create(double l, int fiber_dim, const double* phi, int count,
                             prf_metric** out) {
    return guarded([&] {
        require(out && phi && count >= 5, "need an output handle and >= 5 samples");
        *out = new prf_metric{
            prf::make_metric(l, fiber_dim, std::vector<double>(phi, phi + count))};
    });
}

void prf_metric_destroy(prf_metric* metric) { delete metric; }

int prf_metric_sample_count(const prf_metric* metric) {
    return metric ? static_cast<int>(metric->value.phi.size()) : 0;
}

double prf_metric_length(const prf_metric* metric) { return metric ? metric->value.l : 0.0; }

int prf_metric_fiber_dim(const prf_metric* metric) { return metric ? metric->value.n : 0; }

prf_status prf_metric_values(const prf_metric* metric, double* out) {
    return guarded([&] {
        require(metric && out, "null argument");
        std::memcpy(out, metric->value.phi.data(), metric->value.phi.size() * sizeof(double));
    });
}

prf_status prf_curvature_eval(const prf_metric* metric, prf_curvature** out) {
    return guarded([&] {
        require(metric && out, "null argument");
        *out = new prf_curvature{prf::curvature_snapshot(metric->value)};
    });
}

void prf_curvature_destroy(prf_curvature* curv) { delete curv; }

int prf_curvature_count(const prf_curvature* curv) {
    return curv ? static_cast<int>(curv->value.a.size()) : 0;
}

prf_status prf_curvature_get(const prf_curvature* curv, double* a, double* rho, double* tau1,
                             double* ric_n, double* k_mix, double* sc_mix,
                             int32_t* available) {
    return guarded([&] {
        require(curv, "null curvature");
        const prf::CurvatureSnapshot& s = curv->value;
        const size_t n = s.a.size();
        for (size_t i = 0; i < n; ++i) {
            if (a) a[i] = s.a[i];
            if (rho) rho[i] = s.rho[i];
            if (tau1) tau1[i] = s.tau1[i];
            if (ric_n) ric_n[i] = s.ric_n[i];
            if (k_mix) k_mix[i] = s.k_mix[i];
            if (sc_mix) sc_mix[i] = s.sc_mix[i];
            if (available) available[i] = s.available[i];
        }
    });
}

prf_status prf_check_riccati(const prf_metric* metric, double quotient_cap,
                             prf_residual_report* out) {
    return guarded([&] {
        require(metric && out, "null argument");
        *out = pack(prf::check_riccati(metric->value, resolve_cap(quotient_cap)));
    });
}

/* ---- boundary data -------------------------------------------------------- */

prf_status prf_boundary_constant(double mu0, double mu1, prf_boundary** out) {
    return guarded([&] {
        require(out, "null output");
        *out = new prf_boundary{prf::BoundaryData::constant(mu0, mu1)};
    });
}

prf_status prf_boundary_exponential(double mu_tilde0, double delta0, double rate0,
                                    double mu_tilde1, double delta1, double rate1,
                                    prf_boundary** out) {
    return guarded([&] {
        require(out, "null output");
        *out = new prf_boundary{
            prf::BoundaryData::exponential(mu_tilde0, delta0, rate0, mu_tilde1, delta1, rate1)};
    });
}

prf_status prf_boundary_tabulated(const double* times, const double* values0,
                                  const double* values1, int count, prf_boundary** out) {
    return guarded([&] {
        require(out && times && values0 && values1 && count >= 3, "need >= 3 table rows");
        *out = new prf_boundary{prf::BoundaryData::tabulated(
            std::vector<double>(times, times + count),
            std::vector<double>(values0, values0 + count),
            std::vector<double>(values1, values1 + count))};
    });
}

void prf_boundary_destroy(prf_boundary* boundary) { delete boundary; }

prf_status prf_boundary_mu(const prf_boundary* boundary, int endpoint, double t, double* out) {
    return guarded([&] {
        require(boundary && out && (endpoint == 0 || endpoint == 1), "bad endpoint");
        *out = boundary->value.mu(endpoint, t);
    });
}

prf_status prf_boundary_mu_tilde(const prf_boundary* boundary, int endpoint, double* out) {
    return guarded([&] {
        require(boundary && out && (endpoint == 0 || endpoint == 1), "bad endpoint");
        *out = boundary->value.mu_tilde(endpoint);
    });
}

prf_status prf_lift(const prf_boundary* boundary, double t, double x, double l, double* out) {
    return guarded([&] {
        require(boundary && out, "null argument");
        *out = prf::lift_U(boundary->value, t, x, l);
    });
}

prf_status prf_forcing(const prf_boundary* boundary, double phi_param, double t, double x,
                       double l, double* out) {
    return guarded([&] {
        require(boundary && out, "null argument");
        *out = prf::forcing_term(boundary->value, phi_param, t, x, l);
    });
}

/* ---- stationary profiles --------------------------------------------------- */

prf_status prf_stationary_solve(double phi_param, double l, double mu0, double mu1,
                                int has_family_c, double family_c, prf_stationary** out) {
    return guarded([&] {
        require(out, "null output");
        std::optional<double> c;
        if (has_family_c) c = family_c;
        *out = new prf_stationary{prf::stationary_solution(phi_param, l, mu0, mu1, c)};
    });
}

void prf_stationary_destroy(prf_stationary* stationary) { delete stationary; }

prf_status prf_stationary_regime(const prf_stationary* stationary, prf_regime* out) {
    return guarded([&] {
        require(stationary && out, "null argument");
        *out = static_cast<prf_regime>(stationary->value.regime);
    });
}

prf_status prf_stationary_stable(const prf_stationary* stationary, int* out) {
    return guarded([&] {
        require(stationary && out, "null argument");
        *out = stationary->value.stable_under_flow ? 1 : 0;
    });
}

prf_status prf_stationary_has_solution(const prf_stationary* stationary, int* out) {
    return guarded([&] {
        require(stationary && out, "null argument");
        *out = stationary->value.has_solution() ? 1 : 0;
    });
}

prf_status prf_stationary_evaluate(const prf_stationary* stationary, double x, double* out) {
    return guarded([&] {
        require(stationary && out, "null argument");
        *out = stationary->value.evaluate(x);
    });
}

prf_status prf_stationary_sample(const prf_stationary* stationary, int m, double* out) {
    return guarded([&] {
        require(stationary && out, "null argument");
        const std::vector<double> samples = stationary->value.sample(m);
        std::memcpy(out, samples.data(), samples.size() * sizeof(double));
    });
}

prf_status prf_stationary_residual(const prf_stationary* stationary, double phi_param, int m,
                                   double* out) {
    return guarded([&] {
        require(stationary && out, "null argument");
        *out = prf::stationary_residual(stationary->value, phi_param, m);
    });
}

/* ---- flow -------------------------------------------------------------------- */

prf_status prf_evolve(const prf_metric* phi0, const prf_boundary* boundary,
                      const prf_flow_config* config, prf_trajectory** out) {
    return guarded([&] {
        require(phi0 && boundary && config && out, "null argument");
        prf::FlowConfig cfg;
        cfg.phi_param = config->phi_param;
        cfg.t_end = config->t_end;
        cfg.dt = config->dt;
        cfg.m = config->m;
        cfg.backend = config->backend == PRF_BACKEND_SPECTRAL ? prf::FlowBackend::Spectral
                                                              : prf::FlowBackend::FiniteDifference;
        cfg.series_terms = config->series_terms;
        cfg.snapshot_stride = config->snapshot_stride;
        prf::Trajectory traj = cfg.backend == prf::FlowBackend::Spectral
                                   ? prf::evolve_spectral(phi0->value, boundary->value, cfg)
                                   : prf::evolve_fd(phi0->value, boundary->value, cfg);
        *out = new prf_trajectory{std::move(traj)};
    });
}

void prf_trajectory_destroy(prf_trajectory* trajectory) { delete trajectory; }

int prf_trajectory_snapshot_count(const prf_trajectory* trajectory) {
    return trajectory ? static_cast<int>(trajectory->value.snapshots.size()) : 0;
}

int prf_trajectory_grid_intervals(const prf_trajectory* trajectory) {
    return trajectory ? trajectory->value.grid_intervals() : 0;
}

prf_status prf_trajectory_time(const prf_trajectory* trajectory, int snapshot, double* out) {
    return guarded([&] {
        require(trajectory && out, "null argument");
        require(snapshot >= 0 &&
                    snapshot < static_cast<int>(trajectory->value.times.size()),
                "snapshot index out of range");
        *out = trajectory->value.times[static_cast<size_t>(snapshot)];
    });
}

prf_status prf_trajectory_values(const prf_trajectory* trajectory, int snapshot, double* out) {
    return guarded([&] {
        require(trajectory && out, "null argument");
        require(snapshot >= 0 &&
                    snapshot < static_cast<int>(trajectory->value.snapshots.size()),
                "snapshot index out of range");
        const auto& phi = trajectory->value.snapshots[static_cast<size_t>(snapshot)].phi;
        std::memcpy(out, phi.data(), phi.size() * sizeof(double));
    });
}

prf_status prf_trajectory_divergence(const prf_trajectory* trajectory, int* diverged,
                                     double* time) {
    return guarded([&] {
        require(trajectory, "null trajectory");
        if (diverged) *diverged = trajectory->value.diverged ? 1 : 0;
        if (time) *time = trajectory->value.divergence_time;
    });
}

prf_status prf_trajectory_tail_estimate(const prf_trajectory* trajectory, double* out) {
    return guarded([&] {
        require(trajectory && out, "null argument");
        *out = trajectory->value.spectral_tail_estimate;
    });
}

prf_status prf_trajectory_distance(const prf_trajectory* a, const prf_trajectory* b,
                                   double* out) {
    return guarded([&] {
        require(a && b && out, "null argument");
        *out = prf::sup_distance(a->value, b->value);
    });
}

prf_status prf_sine_coefficients(const double* samples, int count, double l, int terms,
                                 double* out) {
    return guarded([&] {
        require(samples && out && count >= 5 && terms >= 1, "bad arguments");
        const prf::SineSeries series =
            prf::sine_coefficients(std::vector<double>(samples, samples + count), l, terms);
        std::memcpy(out, series.coeffs.data(), series.coeffs.size() * sizeof(double));
    });
}

/* ---- identity checks ----------------------------------------------------------- */

prf_status prf_check_a_evolution(const prf_trajectory* trajectory, double phi_param,
                                 double quotient_cap, prf_residual_report* out) {
    return guarded([&] {
        require(trajectory && out, "null argument");
        *out = pack(
            prf::check_a_evolution(trajectory->value, phi_param, resolve_cap(quotient_cap)));
    });
}

prf_status prf_check_tau1_evolution(const prf_trajectory* trajectory, int fiber_dim,
                                    double quotient_cap, prf_residual_report* out,
                                    double* form_gap) {
    return guarded([&] {
        require(trajectory && out, "null argument");
        const prf::Tau1Report rep =
            prf::check_tau1_evolution(trajectory->value, fiber_dim, resolve_cap(quotient_cap));
        *out = pack(rep.report);
        if (form_gap) *form_gap = rep.form_gap;
    });
}

prf_status prf_check_rn_evolution(const prf_trajectory* trajectory, double quotient_cap,
                                  prf_residual_report* out) {
    return guarded([&] {
        require(trajectory && out, "null argument");
        *out = pack(prf::check_rn_evolution(trajectory->value, resolve_cap(quotient_cap)));
    });
}

prf_status prf_check_rn_envelope(const prf_trajectory* trajectory, double c_bound,
                                 int* holds) {
    return guarded([&] {
        require(trajectory && holds, "null argument");
        *holds = prf::check_rn_envelope(trajectory->value, c_bound) ? 1 : 0;
    });
}

/* ---- convergence estimates -------------------------------------------------------- */

prf_status prf_nu(const prf_boundary* boundary, double phi_param, double t, double* out) {
    return guarded([&] {
        require(boundary && out, "null argument");
        *out = prf::nu_value(boundary->value, phi_param, t);
    });
}

prf_status prf_series_constants_eval(double phi_param, double l, double t, double theta,
                                     prf_series_constants* out) {
    return guarded([&] {
        require(out, "null output");
        const prf::SeriesValue m0 = prf::series_m0(l, t);
        const prf::SeriesValue m1 = prf::series_m1(l, t, theta);
        const prf::SeriesValue m0r = prf::series_m0_resonance(l, t);
        const prf::SeriesValue m1r = prf::series_m1_resonance(l, t, theta);
        out->m0 = m0.value;
        out->m0_tail = m0.tail;
        out->m1 = m1.value;
        out->m1_tail = m1.tail;
        out->m0_res = m0r.value;
        out->m0_res_tail = m0r.tail;
        out->m1_res = m1r.value;
        out->m1_res_tail = m1r.tail;
        try {
            const prf::SeriesValue m2 = prf::series_m2(phi_param, l);
            out->m2 = m2.value;
            out->m2_tail = m2.tail;
        } catch (const prf::Error&) {
            out->m2 = std::numeric_limits<double>::quiet_NaN();
            out->m2_tail = std::numeric_limits<double>::quiet_NaN();
        }
    });
}

prf_status prf_subcritical_bound(const prf_trajectory* trajectory,
                                 const prf_boundary* boundary, double phi_param, double theta,
                                 double t, prf_bound_entry* out) {
    return guarded([&] {
        require(trajectory && boundary && out, "null argument");
        *out = pack(
            prf::subcritical_bound(trajectory->value, boundary->value, phi_param, theta, t));
    });
}

prf_status prf_resonance_bound(const prf_trajectory* trajectory, const prf_boundary* boundary,
                               double theta, double t, prf_bound_entry* out) {
    return guarded([&] {
        require(trajectory && boundary && out, "null argument");
        *out = pack(prf::resonance_bound(trajectory->value, boundary->value, theta, t));
    });
}

prf_status prf_limit_profile_resonance(const prf_metric* phi0, const prf_boundary* boundary,
                                       double l, double* coefficient) {
    return guarded([&] {
        require(phi0 && boundary && coefficient, "null argument");
        *coefficient = prf::limit_profile_resonance(phi0->value, boundary->value, l).coeffs[0];
    });
}

prf_status prf_ode_envelope(double a, double y0, double nu_sup_left, double nu_sup_right,
                            double t, double theta, double* out) {
    return guarded([&] {
        require(out, "null output");
        *out = prf::ode_envelope(a, y0, nu_sup_left, nu_sup_right, t, theta);
    });
}

prf_status prf_divergence_rate(const prf_trajectory* trajectory, int* kind, double* rate,
                               double* slope) {
    return guarded([&] {
        require(trajectory && kind, "null argument");
        const prf::DivergenceReport rep = prf::divergence_rate(trajectory->value);
        *kind = static_cast<int>(rep.kind);
        if (rate) *rate = rep.rate;
        if (slope) *slope = rep.slope;
    });
}

prf_status prf_first_sine_coefficient(const prf_trajectory* trajectory, int snapshot,
                                      double* out) {
    return guarded([&] {
        require(trajectory && out && snapshot >= 0, "null argument");
        *out = prf::first_sine_coefficient(trajectory->value, static_cast<size_t>(snapshot));
    });
}

/* ---- eigenflow ---------------------------------------------------------------------- */

prf_status prf_eigen_closed_form(double mu0, double phi_param, double t, double* out) {
    return guarded([&] {
        require(out, "null output");
        *out = prf::eigen_closed_form(mu0, phi_param, t);
    });
}

prf_status prf_eigen_blow_up_time(double mu0, double phi_param, int* has_blow_up,
                                  double* t_star) {
    return guarded([&] {
        require(has_blow_up, "null output");
        const auto ts = prf::eigen_blow_up_time(mu0, phi_param);
        *has_blow_up = ts.has_value() ? 1 : 0;
        if (ts && t_star) *t_star = *ts;
    });
}

prf_status prf_eigen_rk4(double mu0, double phi_param, double dt, int64_t steps,
                         double* values, int64_t* written, int64_t* halted_step) {
    return guarded([&] {
        require(values && written, "null output");
        const prf::Rk4Trajectory rk = prf::eigen_rk4(mu0, phi_param, dt, steps);
        std::memcpy(values, rk.values.data(), rk.values.size() * sizeof(double));
        *written = static_cast<int64_t>(rk.values.size());
        if (halted_step) *halted_step = rk.halted_step;
    });
}

prf_status prf_tsharp_flow(double theta0, double phi_param, double t, double* out) {
    return guarded([&] {
        require(out, "null output");
        *out = prf::tsharp_eigen_flow(theta0, phi_param, t);
    });
}

prf_status prf_ric_n_flow(const double* mus, int n, double phi_param, double t, double* value,
                          double* inequality_margin) {
    return guarded([&] {
        require(mus && value && n >= 1, "bad arguments");
        prf::EigenFlowState state;
        state.mus.assign(mus, mus + n);
        state.phi_param = phi_param;
        state.n = n;
        const prf::RicNFlowResult result = prf::ric_n_flow(state, t);
        *value = result.value;
        if (inequality_margin) *inequality_margin = result.inequality_margin;
    });
}

/* ---- topology ------------------------------------------------------------------------ */

prf_status prf_adams_rho(uint64_t n, prf_adams_decomposition* out) {
    return guarded([&] {
        require(out, "null output");
        const prf::AdamsDecomposition a = prf::adams_rho(n);
        *out = {a.n, a.odd_part, a.d, a.c, a.rho};
    });
}

prf_status prf_ferus_number(uint64_t l, uint64_t* out) {
    return guarded([&] {
        require(out, "null output");
        *out = prf::ferus_number(l);
    });
}

prf_status prf_ferus_check(uint64_t p, uint64_t n, int* out) {
    return guarded([&] {
        require(out, "null output");
        *out = prf::ferus_check(p, n) ? 1 : 0;
    });
}

} /* extern "C" */

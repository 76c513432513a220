#pragma once

#include <vector>

#include "core/boundary.hpp"
#include "core/grid.hpp"

namespace prf {

enum class FlowBackend { FiniteDifference, Spectral };

struct FlowConfig {
    double phi_param = 0.0;
    double t_end = 1.0;
    double dt = 1e-3;
    int m = 100;            // grid intervals
    FlowBackend backend = FlowBackend::FiniteDifference;
    int series_terms = 0;   // spectral truncation J; 0 selects m/2
    int snapshot_stride = 1;

    void validate() const;
    int resolved_series_terms() const { return series_terms > 0 ? series_terms : m / 2; }
};

// Time-ordered warping-function snapshots produced by one backend. Snapshots
// are recorded every snapshot_stride steps; the final time is always included.
// A run that exceeds 1e300 is truncated at that time and flagged.
struct Trajectory {
    double l = 1.0;
    int n = 1;
    double phi_param = 0.0;
    FlowBackend backend = FlowBackend::FiniteDifference;
    std::vector<double> times;
    std::vector<WarpedProductMetric> snapshots;
    BoundaryData boundary;
    bool diverged = false;
    double divergence_time = 0.0;
    double spectral_tail_estimate = 0.0; // bound on dropped |v_j^0| tail (spectral only)

    int grid_intervals() const { return snapshots.empty() ? 0 : snapshots.front().intervals(); }
};

// Finite sine expansion sum_j c_j sin(pi j x / l); vanishes exactly at x = 0, l.
struct SineSeries {
    double l = 1.0;
    std::vector<double> coeffs; // c_1 .. c_J

    double evaluate(double x) const;
};

// U(t,x) = delta_0(t)(l-x)/l + delta_1(t) x/l with delta_j = mu_j - mu_tilde_j.
double lift_U(const BoundaryData& bd, double t, double x, double l);

// f(t,x) = Phi U - dU/dt, the forcing created by moving Dirichlet data.
double forcing_term(const BoundaryData& bd, double phi_param, double t, double x, double l);

// Coefficients c_j = (2/l) integral_0^l f(s) sin(pi j s / l) ds by composite
// Simpson quadrature on the sample grid. The samples must vanish at the
// endpoints (|value| <= 1e-8 * scale), since the basis does.
SineSeries sine_coefficients(const std::vector<double>& samples, double l, int terms);

// Crank-Nicolson time stepping of d_t phi = phi_xx + Phi phi with time-dependent
// Dirichlet data entering the right side at the half-step time.
Trajectory evolve_fd(const WarpedProductMetric& phi0, const BoundaryData& bd,
                     const FlowConfig& cfg);

// Fourier sine-series backend: subtracts the stationary profile and the
// boundary lift, then integrates each coefficient ODE v_j' = a_j v_j + f_j(t)
// exactly (variation of constants; closed-form step integrals for constant and
// exponential boundary families, per-step Gauss quadrature for tabulated ones).
Trajectory evolve_spectral(const WarpedProductMetric& phi0, const BoundaryData& bd,
                           const FlowConfig& cfg);

// Max over shared snapshot times and grid points of |phi_a - phi_b|.
double sup_distance(const Trajectory& a, const Trajectory& b);

// Max |phi(t_k) - reference| over the grid at snapshot k.
double sup_deviation(const Trajectory& traj, size_t k, const std::vector<double>& reference);

} // namespace prf

#pragma once

#include <vector>

#include "core/boundary.hpp"
#include "core/flow.hpp"

namespace prf {

// nu(t) = |Phi| (|delta_0| + |delta_1|) + |delta_0'| + |delta_1'|, the decay
// budget of the moving boundary data.
double nu_value(const BoundaryData& bd, double phi_param, double t);

// sup of nu over [t1, t2]: closed form (nu is nonincreasing) for constant and
// exponential families, dense sampling for tabulated ones.
double nu_sup(const BoundaryData& bd, double phi_param, double t1, double t2);

// Integral of nu over [t, infinity); closed form for constant/exponential
// families, refused (NonIntegrableBoundary) for tabulated data.
double nu_integral_to_infinity(const BoundaryData& bd, double phi_param, double t);

// One series constant, summed until the next term drops below 1e-15 of the
// partial sum, together with a certified bound on the dropped tail.
struct SeriesValue {
    double value = 0.0;
    double tail = 0.0;
};

SeriesValue series_m0(double l, double t, int max_terms = 1 << 20);
SeriesValue series_m1(double l, double t, double theta, int max_terms = 1 << 20);
SeriesValue series_m2(double phi_param, double l, int max_terms = 1 << 20);
SeriesValue series_m0_resonance(double l, double t, int max_terms = 1 << 20);
SeriesValue series_m1_resonance(double l, double t, double theta, int max_terms = 1 << 20);

// Coefficient-space L2 norm sqrt((2/l) * integral of v0^2), the norm under
// which the sine basis is orthonormal (this is the norm the M0 term needs).
double v0_l2_norm(const std::vector<double>& v0_samples, double l);

struct BoundEntry {
    double t = 0.0;
    double theta = 0.5;
    double observed = 0.0;        // sup_x |phi(t,.) - reference|
    double bound = 0.0;
    double margin = 0.0;          // bound - observed
    double truncation_tail = 0.0; // certified slack from truncated series
};

// Convergence estimate toward the stationary profile, Phi < (pi/l)^2.
BoundEntry subcritical_bound(const Trajectory& traj, const BoundaryData& bd, double phi_param,
                             double theta, double t);

// Convergence estimate toward the limit sine profile at Phi = (pi/l)^2 with
// vanishing boundary limits.
BoundEntry resonance_bound(const Trajectory& traj, const BoundaryData& bd, double theta,
                           double t);

// phi_inf = (v_1^0 + integral_0^inf f_1) sin(pi x / l).
SineSeries limit_profile_resonance(const WarpedProductMetric& phi0, const BoundaryData& bd,
                                   double l);

// |y0| e^{a t} + |a|^-1 e^{(1-theta) a t} sup_[0,theta t]|nu|
//             + |a|^-1 sup_[theta t, t]|nu|, for a < 0.
double ode_envelope(double a, double y0, double nu_sup_left, double nu_sup_right, double t,
                    double theta);

enum class GrowthKind { None, Exponential, Linear };

struct DivergenceReport {
    GrowthKind kind = GrowthKind::None;
    double rate = 0.0;  // exponential: d/dt log sup|phi|
    double slope = 0.0; // linear: d/dt of the first sine coefficient
};

// Classifies the long-time behavior of a trajectory from its tail window.
DivergenceReport divergence_rate(const Trajectory& traj);

// First sine coefficient (2/l) integral phi(t_k, s) sin(pi s / l) ds.
double first_sine_coefficient(const Trajectory& traj, size_t k);

} // namespace prf

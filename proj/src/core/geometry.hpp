#pragma once

#include <vector>

#include "core/flow.hpp"
#include "core/grid.hpp"

namespace prf {

// Pointwise shape and curvature data of a warped product metric:
//   a     = -phi_x / phi   (Weingarten eigenvalue)
//   rho   = -phi_xx / phi  (Jacobi-operator eigenvalue = mixed curvature K)
//   tau1  = n a,  ric_n = n rho,  k_mix = rho,  sc_mix = n rho
// Quotients are defined only where phi exceeds 1e-12 of its sup (entries are
// NaN and flagged unavailable elsewhere; the threshold is relative so the
// snapshot is invariant under phi -> c phi).
struct CurvatureSnapshot {
    std::vector<double> a, rho, tau1, ric_n, k_mix, sc_mix;
    std::vector<char> available;
};

CurvatureSnapshot curvature_snapshot(const WarpedProductMetric& g);

struct ResidualReport {
    double max_residual = 0.0;
    double rms_residual = 0.0;
    double lhs_max = 0.0; // largest |time-derivative side| seen
    double rhs_max = 0.0; // largest |spatial side| seen
    std::size_t points = 0;
};

// Identity residuals are evaluated where the curvature quotient is resolved by
// the grid: |a| <= quotient_cap at the stencil points. Near a zero of phi the
// exact field a ~ -1/(x-x0) makes any fixed-order stencil error blow up like
// h^2/(x-x0)^5, so an uncapped sup-norm would be dominated by points the grid
// cannot represent. The cap keeps the evaluation region fixed under
// refinement, which is what makes observed convergence orders meaningful.
constexpr double kDefaultQuotientCap = 2.0;

// |a_x - (a^2 + rho)| over trusted interior points; exact identity, so the
// residual must vanish at stencil order.
ResidualReport check_riccati(const WarpedProductMetric& g,
                             double quotient_cap = kDefaultQuotientCap);

// |d_t a - (a_xx - 2 a a_x)| with central differences in t and x. Holds for
// any Phi: the normalization enters the flow as a multiple of the identity
// whose N-derivative vanishes, so it cancels from the reduced identity.
ResidualReport check_a_evolution(const Trajectory& traj, double phi_param,
                                 double quotient_cap = kDefaultQuotientCap);

struct Tau1Report {
    ResidualReport report;
    // Largest relative gap between the two printed forms of the tau_1 law,
    // which reduce to the same scalar expression; must sit at round-off.
    double form_gap = 0.0;
};

Tau1Report check_tau1_evolution(const Trajectory& traj, int n,
                                double quotient_cap = kDefaultQuotientCap);

// |d_t rho - (rho_xx - 2 a rho_x)|.
ResidualReport check_rn_evolution(const Trajectory& traj,
                                  double quotient_cap = kDefaultQuotientCap);

// Metric envelope e^{-2Ct} phi(0,x)^2 <= phi(t,x)^2 <= e^{2Ct} phi(0,x)^2 for
// unnormalized (Phi = 0) trajectories whose |rho| stays below c_bound. Throws
// BoundHypothesisViolated if the curvature hypothesis fails.
bool check_rn_envelope(const Trajectory& traj, double c_bound);

} // namespace prf

#pragma once

#include <optional>
#include <vector>

namespace prf {

enum class StationaryRegime {
    SubcriticalTrig,     // 0 < Phi < (pi/l)^2
    Zero,                // Phi = 0
    Negative,            // Phi < 0
    ResonanceFamily,     // Phi = (pi/l)^2, solvable: one-parameter family
    ResonanceUnsolvable, // Phi = (pi/l)^2, mu1 != -mu0
    Supercritical,       // Phi > (pi/l)^2, analytic continuation, unstable
};

const char* regime_name(StationaryRegime regime);

// Solution of phi'' + Phi phi = 0, phi(0) = mu0, phi(l) = mu1, in closed form.
// The supercritical branch keeps the trigonometric formula as a reference point
// for divergence measurements; stable_under_flow records Phi < (pi/l)^2.
struct StationaryResult {
    StationaryRegime regime = StationaryRegime::Zero;
    double phi_param = 0.0;
    double l = 1.0;
    double mu0 = 0.0;
    double mu1 = 0.0;
    std::optional<double> family_c; // free constant, resonance family only
    bool stable_under_flow = false;

    bool has_solution() const;
    double evaluate(double x) const;       // throws MissingSolution when absent
    std::vector<double> sample(int m) const;
};

StationaryResult stationary_solution(double phi_param, double l, double mu0, double mu1,
                                     std::optional<double> family_c = std::nullopt);

// Max over interior grid points of |phi'' + Phi phi| with second-order stencils
// on an m-interval grid, plus exact endpoint interpolation checks.
double stationary_residual(const StationaryResult& result, double phi_param, int m);

// Whether Phi sits on the first resonance (pi/l)^2 within relative tolerance.
bool is_resonant(double phi_param, double l);

} // namespace prf

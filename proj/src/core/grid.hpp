#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "core/errors.hpp"

namespace prf {

// Full state of a warped product metric dx^2 + phi^2(x) g_fiber on [0,l] x M^n:
// the warping function sampled on the uniform grid x_i = i*l/m plus the fiber
// dimension. Everything geometric about the metric is a function of these.
struct WarpedProductMetric {
    double l = 1.0;            // interval length, > 0
    int n = 1;                 // fiber dimension, >= 1
    std::vector<double> phi;   // m+1 samples, all finite
    double dx = 0.0;           // l/m

    int intervals() const { return static_cast<int>(phi.size()) - 1; }
    double x(int i) const { return (l * i) / intervals(); }

    // Validates the type invariants (l > 0, n >= 1, m >= 4, finite nonnegative
    // samples). Flow snapshots skip the nonnegativity check: a divergent run may
    // legitimately leave [0, inf).
    void validate(bool require_nonnegative = true) const;
};

WarpedProductMetric make_metric(double l, int n, std::vector<double> phi);

// Samples f on the uniform (m+1)-point grid over [0,l].
template <typename F>
std::vector<double> sample_on_grid(F&& f, double l, int m) {
    std::vector<double> out(static_cast<size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) out[static_cast<size_t>(i)] = f(l * i / m);
    return out;
}

// Composite Simpson rule on uniformly spaced samples (spacing h). Odd interval
// counts fall back to Simpson 3/8 on the final three cells, keeping O(h^4).
double simpson(const std::vector<double>& samples, double h);

// (e^z - 1)/z, stable near z = 0.
inline double phi1(double z) {
    if (std::abs(z) < 1e-12) return 1.0 + 0.5 * z;
    return std::expm1(z) / z;
}

// (e^z (z - 1) + 1)/z^2 = integral weight of the linear ramp against e^{z s};
// tends to 1/2 at z = 0 and to 0 as z -> -inf.
inline double phi2(double z) {
    if (std::abs(z) < 1e-5) return 0.5 + z / 3.0 + z * z / 8.0;
    return (std::exp(z) * (z - 1.0) + 1.0) / (z * z);
}

// Least squares fit y ~ intercept + slope*x together with the maximum absolute
// deviation of the fit, used for growth-rate estimation and classification.
struct AffineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_abs_dev = 0.0;
};
AffineFit affine_fit(const std::vector<double>& x, const std::vector<double>& y);

} // namespace prf

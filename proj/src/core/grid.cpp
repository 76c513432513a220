#include "core/grid.hpp"

#include <cmath>

namespace prf {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NonPositiveWarping: return "NonPositiveWarping";
        case ErrorCode::InsufficientSnapshots: return "InsufficientSnapshots";
        case ErrorCode::BoundaryMismatch: return "BoundaryMismatch";
        case ErrorCode::InvalidBoundary: return "InvalidBoundary";
        case ErrorCode::ResonanceUnsolvable: return "ResonanceUnsolvable";
        case ErrorCode::SingularDenominator: return "SingularDenominator";
        case ErrorCode::MissingSolution: return "MissingSolution";
        case ErrorCode::NonVanishingEndpoints: return "NonVanishingEndpoints";
        case ErrorCode::DivergentAtZero: return "DivergentAtZero";
        case ErrorCode::SupercriticalM2: return "SupercriticalM2";
        case ErrorCode::NotResonant: return "NotResonant";
        case ErrorCode::NonIntegrableBoundary: return "NonIntegrableBoundary";
        case ErrorCode::BoundHypothesisViolated: return "BoundHypothesisViolated";
        case ErrorCode::BlowUp: return "BlowUp";
        case ErrorCode::NonNegativeRate: return "NonNegativeRate";
        case ErrorCode::TooShort: return "TooShort";
    }
    return "UnknownError";
}

void WarpedProductMetric::validate(bool require_nonnegative) const {
    if (!(l > 0.0)) raise(ErrorCode::InvalidArgument, "interval length must be positive");
    if (n < 1) raise(ErrorCode::InvalidArgument, "fiber dimension must be >= 1");
    if (phi.size() < 5) raise(ErrorCode::InvalidArgument, "need at least m = 4 grid intervals");
    const int m = intervals();
    if (std::abs(dx - l / m) > 0.0)
        raise(ErrorCode::InvalidArgument, "grid spacing must equal l/m exactly");
    for (size_t i = 0; i < phi.size(); ++i) {
        if (!std::isfinite(phi[i]))
            raise(ErrorCode::InvalidArgument, "warping sample is not finite", 0.0,
                  static_cast<long>(i));
        if (require_nonnegative && phi[i] < 0.0)
            raise(ErrorCode::InvalidArgument, "warping samples must be nonnegative", phi[i],
                  static_cast<long>(i));
    }
}

WarpedProductMetric make_metric(double l, int n, std::vector<double> phi) {
    WarpedProductMetric g;
    g.l = l;
    g.n = n;
    g.phi = std::move(phi);
    g.dx = g.phi.size() > 1 ? l / g.intervals() : 0.0;
    // Nonnegativity is enforced where it is load-bearing: boundary data and
    // curvature extraction. Signed samples stay representable (sine-series
    // inputs, divergent runs).
    g.validate(false);
    return g;
}

double simpson(const std::vector<double>& samples, double h) {
    const size_t n = samples.size();
    if (n < 2) raise(ErrorCode::InvalidArgument, "simpson needs at least two samples");
    size_t intervals = n - 1;
    double total = 0.0;
    size_t even_end = intervals; // intervals handled by the 1/3 rule
    if (intervals % 2 != 0) {
        if (intervals < 3) { // single interval: trapezoid is all we have
            return 0.5 * h * (samples[0] + samples[1]);
        }
        even_end = intervals - 3;
    }
    for (size_t i = 0; i + 2 <= even_end; i += 2)
        total += (h / 3.0) * (samples[i] + 4.0 * samples[i + 1] + samples[i + 2]);
    if (even_end != intervals) {
        const size_t b = even_end;
        total += (3.0 * h / 8.0) *
                 (samples[b] + 3.0 * samples[b + 1] + 3.0 * samples[b + 2] + samples[b + 3]);
    }
    return total;
}

AffineFit affine_fit(const std::vector<double>& x, const std::vector<double>& y) {
    AffineFit fit;
    const size_t n = x.size();
    if (n < 2 || y.size() != n) raise(ErrorCode::InvalidArgument, "affine_fit needs paired data");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (det == 0.0) raise(ErrorCode::InvalidArgument, "degenerate abscissae in affine_fit");
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / n;
    for (size_t i = 0; i < n; ++i) {
        const double dev = std::abs(y[i] - (fit.intercept + fit.slope * x[i]));
        if (dev > fit.max_abs_dev) fit.max_abs_dev = dev;
    }
    return fit;
}

} // namespace prf

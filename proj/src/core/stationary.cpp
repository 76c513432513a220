#include "core/stationary.hpp"

#include <cmath>
#include <numbers>

#include "core/errors.hpp"
#include "core/grid.hpp"

namespace prf {

namespace {

constexpr double kResonanceRelTol = 1e-12;
constexpr double kDenominatorTol = 1e-12;

double critical_value(double l) {
    const double k = std::numbers::pi / l;
    return k * k;
}

} // namespace

const char* regime_name(StationaryRegime regime) {
    switch (regime) {
        case StationaryRegime::SubcriticalTrig: return "SubcriticalTrig";
        case StationaryRegime::Zero: return "Zero";
        case StationaryRegime::Negative: return "Negative";
        case StationaryRegime::ResonanceFamily: return "ResonanceFamily";
        case StationaryRegime::ResonanceUnsolvable: return "ResonanceUnsolvable";
        case StationaryRegime::Supercritical: return "Supercritical";
    }
    return "Unknown";
}

bool is_resonant(double phi_param, double l) {
    const double crit = critical_value(l);
    return std::abs(phi_param - crit) <= kResonanceRelTol * crit;
}

bool StationaryResult::has_solution() const {
    if (regime == StationaryRegime::ResonanceUnsolvable) return false;
    if (regime == StationaryRegime::ResonanceFamily) return family_c.has_value();
    return true;
}

double StationaryResult::evaluate(double x) const {
    if (!has_solution())
        raise(ErrorCode::MissingSolution, "no stationary solution in this regime");
    // Closed forms interpolate the boundary data exactly; honor that in floating
    // point as well.
    if (x == 0.0) return mu0;
    if (x == l) return mu1;
    switch (regime) {
        case StationaryRegime::Zero:
            return mu0 + (mu1 - mu0) * (x / l);
        case StationaryRegime::SubcriticalTrig:
        case StationaryRegime::Supercritical: {
            const double k = std::sqrt(phi_param);
            return (mu1 * std::sin(k * x) + mu0 * std::sin(k * (l - x))) / std::sin(k * l);
        }
        case StationaryRegime::Negative: {
            const double k = std::sqrt(-phi_param);
            return (mu1 * std::sinh(k * x) + mu0 * std::sinh(k * (l - x))) / std::sinh(k * l);
        }
        case StationaryRegime::ResonanceFamily: {
            const double u = std::numbers::pi * x / l;
            return *family_c * std::sin(u) + mu0 * std::cos(u);
        }
        case StationaryRegime::ResonanceUnsolvable: break;
    }
    raise(ErrorCode::MissingSolution, "no stationary solution in this regime");
}

std::vector<double> StationaryResult::sample(int m) const {
    if (m < 4) raise(ErrorCode::InvalidArgument, "need at least m = 4 grid intervals");
    return sample_on_grid([this](double x) { return evaluate(x); }, l, m);
}

StationaryResult stationary_solution(double phi_param, double l, double mu0, double mu1,
                                     std::optional<double> family_c) {
    if (!(l > 0.0)) raise(ErrorCode::InvalidArgument, "interval length must be positive");
    if (mu0 < 0.0 || mu1 < 0.0)
        raise(ErrorCode::InvalidBoundary, "boundary limits must be nonnegative");

    StationaryResult out;
    out.phi_param = phi_param;
    out.l = l;
    out.mu0 = mu0;
    out.mu1 = mu1;
    const double crit = critical_value(l);
    out.stable_under_flow = phi_param < crit && !is_resonant(phi_param, l);

    if (is_resonant(phi_param, l)) {
        const bool solvable = std::abs(mu1 + mu0) <= kResonanceRelTol * std::max(1.0, mu0);
        out.regime = solvable ? StationaryRegime::ResonanceFamily
                              : StationaryRegime::ResonanceUnsolvable;
        if (solvable) out.family_c = family_c;
        return out;
    }
    if (phi_param < 0.0) {
        out.regime = StationaryRegime::Negative;
    } else if (phi_param == 0.0) {
        out.regime = StationaryRegime::Zero;
    } else if (phi_param < crit) {
        out.regime = StationaryRegime::SubcriticalTrig;
    } else {
        // Past the first resonance the same formula continues analytically unless
        // Phi sits on a higher resonance where the denominator degenerates.
        if (std::abs(std::sin(std::sqrt(phi_param) * l)) < kDenominatorTol)
            raise(ErrorCode::SingularDenominator,
                  "sin(sqrt(Phi) l) vanishes: higher resonance");
        out.regime = StationaryRegime::Supercritical;
    }
    return out;
}

double stationary_residual(const StationaryResult& result, double phi_param, int m) {
    if (!result.has_solution())
        raise(ErrorCode::MissingSolution, "no stationary solution to test");
    const std::vector<double> f = result.sample(m);
    const double h = result.l / m;
    double max_resid = 0.0;
    for (int i = 1; i < m; ++i) {
        const double second = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
        max_resid = std::max(max_resid, std::abs(second + phi_param * f[i]));
    }
    max_resid = std::max(max_resid, std::abs(result.evaluate(0.0) - result.mu0));
    max_resid = std::max(max_resid, std::abs(result.evaluate(result.l) - result.mu1));
    return max_resid;
}

} // namespace prf

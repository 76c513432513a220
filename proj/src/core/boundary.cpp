#include "core/boundary.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace prf {

namespace {

void validate_table(const std::vector<double>& times, const std::vector<double>& values) {
    if (times.size() < 3 || times.size() != values.size())
        raise(ErrorCode::InvalidBoundary, "tabulated family needs >= 3 paired entries");
    const double step = times[1] - times[0];
    if (!(step > 0.0)) raise(ErrorCode::InvalidBoundary, "table times must increase");
    for (size_t k = 1; k < times.size(); ++k) {
        const double d = times[k] - times[k - 1];
        if (std::abs(d - step) > 1e-9 * std::max(1.0, std::abs(step)))
            raise(ErrorCode::InvalidBoundary, "table times must be uniformly spaced");
    }
    for (double v : values)
        if (!std::isfinite(v)) raise(ErrorCode::InvalidBoundary, "table values must be finite");
}

// Index of the table cell whose quadratic stencil covers t.
size_t stencil_start(const std::vector<double>& times, double t) {
    const double step = times[1] - times[0];
    const double pos = (t - times.front()) / step;
    long k = std::lround(std::floor(pos));
    k = std::clamp(k, 0l, static_cast<long>(times.size()) - 3);
    return static_cast<size_t>(k);
}

} // namespace

double BoundaryEndpoint::mu(double t) const {
    switch (family) {
        case BoundaryFamily::Constant: return mu_tilde;
        case BoundaryFamily::ExponentialApproach: return mu_tilde + delta0 * std::exp(-rate * t);
        case BoundaryFamily::Tabulated: {
            if (t < times.front() - 1e-12 || t > times.back() + 1e-12)
                raise(ErrorCode::InvalidBoundary, "time outside tabulated horizon", t);
            // Local quadratic through three consecutive nodes: second order in the
            // table spacing, consistent with the difference rule used for dmu.
            const size_t k = stencil_start(times, t);
            const double t0 = times[k], t1 = times[k + 1], t2 = times[k + 2];
            const double y0 = values[k], y1 = values[k + 1], y2 = values[k + 2];
            const double w0 = (t - t1) * (t - t2) / ((t0 - t1) * (t0 - t2));
            const double w1 = (t - t0) * (t - t2) / ((t1 - t0) * (t1 - t2));
            const double w2 = (t - t0) * (t - t1) / ((t2 - t0) * (t2 - t1));
            return w0 * y0 + w1 * y1 + w2 * y2;
        }
    }
    raise(ErrorCode::InvalidBoundary, "unknown boundary family");
}

double BoundaryEndpoint::dmu(double t) const {
    switch (family) {
        case BoundaryFamily::Constant: return 0.0;
        case BoundaryFamily::ExponentialApproach:
            return -rate * delta0 * std::exp(-rate * t);
        case BoundaryFamily::Tabulated: {
            if (t < times.front() - 1e-12 || t > times.back() + 1e-12)
                raise(ErrorCode::InvalidBoundary, "time outside tabulated horizon", t);
            const size_t k = stencil_start(times, t);
            const double t0 = times[k], t1 = times[k + 1], t2 = times[k + 2];
            const double y0 = values[k], y1 = values[k + 1], y2 = values[k + 2];
            const double d0 = (2.0 * t - t1 - t2) / ((t0 - t1) * (t0 - t2));
            const double d1 = (2.0 * t - t0 - t2) / ((t1 - t0) * (t1 - t2));
            const double d2 = (2.0 * t - t0 - t1) / ((t2 - t0) * (t2 - t1));
            return d0 * y0 + d1 * y1 + d2 * y2;
        }
    }
    raise(ErrorCode::InvalidBoundary, "unknown boundary family");
}

BoundaryData BoundaryData::constant(double mu0, double mu1) {
    BoundaryData bd;
    bd.endpoint[0] = {BoundaryFamily::Constant, mu0, 0.0, 1.0, {}, {}};
    bd.endpoint[1] = {BoundaryFamily::Constant, mu1, 0.0, 1.0, {}, {}};
    return bd;
}

BoundaryData BoundaryData::exponential(double mu_tilde0, double delta0, double rate0,
                                       double mu_tilde1, double delta1, double rate1) {
    if (!(rate0 > 0.0) || !(rate1 > 0.0))
        raise(ErrorCode::InvalidBoundary, "exponential approach needs positive rates");
    BoundaryData bd;
    bd.endpoint[0] = {BoundaryFamily::ExponentialApproach, mu_tilde0, delta0, rate0, {}, {}};
    bd.endpoint[1] = {BoundaryFamily::ExponentialApproach, mu_tilde1, delta1, rate1, {}, {}};
    return bd;
}

BoundaryData BoundaryData::tabulated(std::vector<double> times, std::vector<double> values0,
                                     std::vector<double> values1) {
    validate_table(times, values0);
    validate_table(times, values1);
    BoundaryData bd;
    bd.endpoint[0] = {BoundaryFamily::Tabulated, values0.back(), 0.0, 1.0, times, values0};
    bd.endpoint[1] = {BoundaryFamily::Tabulated, values1.back(), 0.0, 1.0, std::move(times),
                      std::move(values1)};
    return bd;
}

bool BoundaryData::has_tabulated() const {
    return endpoint[0].family == BoundaryFamily::Tabulated ||
           endpoint[1].family == BoundaryFamily::Tabulated;
}

void BoundaryData::validate_horizon(double t_end) const {
    for (int j = 0; j < 2; ++j) {
        const BoundaryEndpoint& e = endpoint[j];
        switch (e.family) {
            case BoundaryFamily::Constant:
                if (e.mu_tilde < 0.0)
                    raise(ErrorCode::InvalidBoundary, "mu must stay nonnegative");
                break;
            case BoundaryFamily::ExponentialApproach:
                // mu(t) is monotone between mu_tilde + delta0 and mu_tilde.
                if (e.mu_tilde < 0.0 || e.mu_tilde + e.delta0 < 0.0)
                    raise(ErrorCode::InvalidBoundary, "mu must stay nonnegative");
                break;
            case BoundaryFamily::Tabulated: {
                if (e.times.front() > 0.0 || e.times.back() < t_end)
                    raise(ErrorCode::InvalidBoundary, "table does not cover the run horizon",
                          t_end);
                for (int k = 0; k <= 1000; ++k) {
                    const double t = t_end * k / 1000.0;
                    if (e.mu(t) < 0.0)
                        raise(ErrorCode::InvalidBoundary, "mu must stay nonnegative", t);
                }
                break;
            }
        }
    }
}

} // namespace prf

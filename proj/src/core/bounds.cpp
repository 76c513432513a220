#include "core/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/stationary.hpp"

namespace prf {

namespace {

constexpr double kSeriesRelTol = 1e-15;
constexpr int kNuSamples = 1000;
const double kPi = std::numbers::pi;

// sum_{j >= j0} exp(-c (j^2 - shift)) for c > 0, with a Gaussian-comparison
// bound on the dropped tail: sum_{j > J} <= exp(-c (J^2 - shift)) / (2 c J).
SeriesValue exp_series(double c, double shift, int j0, int max_terms) {
    if (!(c > 0.0)) raise(ErrorCode::DivergentAtZero, "series constants require t > 0");
    SeriesValue out;
    int last = j0 - 1;
    for (int j = j0; j < j0 + max_terms; ++j) {
        const double term = std::exp(-c * (static_cast<double>(j) * j - shift));
        out.value += term;
        last = j;
        if (term < kSeriesRelTol * out.value) break;
    }
    // Gaussian comparison: sum_{j > last} <= int_last^inf e^{-c(x^2-shift)} dx.
    const double J = static_cast<double>(last);
    out.tail = std::exp(-c * (J * J - shift)) / (2.0 * c * J);
    return out;
}

size_t snapshot_index_at(const Trajectory& traj, double t) {
    for (size_t k = 0; k < traj.times.size(); ++k)
        if (std::abs(traj.times[k] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return k;
    raise(ErrorCode::InvalidArgument, "no trajectory snapshot at the requested time", t);
}

void require_theta(double theta) {
    if (!(theta > 0.0) || !(theta < 1.0))
        raise(ErrorCode::InvalidArgument, "theta must lie in (0,1)", theta);
}

std::vector<double> v0_samples(const Trajectory& traj, const BoundaryData& bd,
                               const std::vector<double>& phi_tilde, double offset0,
                               double offset1) {
    if (traj.snapshots.empty() || traj.times.front() != 0.0)
        raise(ErrorCode::InvalidArgument, "trajectory must start at t = 0");
    const auto& p0 = traj.snapshots.front().phi;
    const int m = traj.grid_intervals();
    const double l = traj.l;
    const double d0 = bd.mu(0, 0.0) - offset0;
    const double d1 = bd.mu(1, 0.0) - offset1;
    std::vector<double> v0(p0.size());
    for (int i = 0; i <= m; ++i) {
        const double x = l * i / m;
        v0[static_cast<size_t>(i)] =
            p0[static_cast<size_t>(i)] - phi_tilde[static_cast<size_t>(i)] -
            (d0 * (l - x) / l + d1 * x / l);
    }
    return v0;
}

} // namespace

double nu_value(const BoundaryData& bd, double phi_param, double t) {
    return std::abs(phi_param) * (std::abs(bd.delta(0, t)) + std::abs(bd.delta(1, t))) +
           std::abs(bd.dmu(0, t)) + std::abs(bd.dmu(1, t));
}

double nu_sup(const BoundaryData& bd, double phi_param, double t1, double t2) {
    if (t2 < t1) raise(ErrorCode::InvalidArgument, "empty interval for nu sup");
    if (bd.monotone_decay()) return nu_value(bd, phi_param, t1);
    double out = 0.0;
    for (int k = 0; k <= kNuSamples; ++k) {
        const double t = t1 + (t2 - t1) * k / kNuSamples;
        out = std::max(out, nu_value(bd, phi_param, t));
    }
    return out;
}

double nu_integral_to_infinity(const BoundaryData& bd, double phi_param, double t) {
    if (bd.has_tabulated())
        raise(ErrorCode::NonIntegrableBoundary,
              "cannot certify the improper nu integral from a finite table");
    double total = 0.0;
    for (int j = 0; j < 2; ++j) {
        const BoundaryEndpoint& e = bd.endpoint[j];
        if (e.family == BoundaryFamily::ExponentialApproach)
            total += (std::abs(phi_param) + e.rate) * std::abs(e.delta0) *
                     std::exp(-e.rate * t) / e.rate;
    }
    return total;
}

SeriesValue series_m0(double l, double t, int max_terms) {
    if (!(t > 0.0)) raise(ErrorCode::DivergentAtZero, "M0 diverges at t <= 0", t);
    const double c = 2.0 * (kPi / l) * (kPi / l) * t;
    SeriesValue s = exp_series(c, 1.0, 1, max_terms);
    SeriesValue out;
    out.value = std::sqrt(s.value);
    out.tail = s.tail / (2.0 * out.value);
    return out;
}

SeriesValue series_m1(double l, double t, double theta, int max_terms) {
    if (!(t > 0.0)) raise(ErrorCode::DivergentAtZero, "M1 diverges at t <= 0", t);
    require_theta(theta);
    const double c = (1.0 - theta) * (kPi / l) * (kPi / l) * t;
    SeriesValue s = exp_series(c, 1.0, 1, max_terms);
    s.value *= 6.0 / kPi;
    s.tail *= 6.0 / kPi;
    return s;
}

SeriesValue series_m2(double phi_param, double l, int max_terms) {
    const double crit = (kPi / l) * (kPi / l);
    if (phi_param >= crit || is_resonant(phi_param, l))
        raise(ErrorCode::SupercriticalM2, "M2 requires Phi < (pi/l)^2", phi_param);
    SeriesValue out;
    int last = 0;
    for (int j = 1; j <= max_terms; ++j) {
        const double kj = kPi * j / l;
        const double term = 1.0 / (j * (kj * kj - phi_param));
        out.value += term;
        last = j;
        if (term < kSeriesRelTol * out.value) break;
    }
    // 1/(j ((pi j / l)^2 - Phi)) <= (l/pi)^2 / ((1 - q) j^3) with q = Phi (l/pi)^2 < 1,
    // and sum_{j > J} j^-3 <= 1/(2 J^2).
    const double q = std::max(0.0, phi_param * (l / kPi) * (l / kPi));
    const double J = static_cast<double>(last);
    out.tail = (l / kPi) * (l / kPi) / ((1.0 - q) * 2.0 * J * J);
    out.value *= 6.0 / kPi;
    out.tail *= 6.0 / kPi;
    return out;
}

SeriesValue series_m0_resonance(double l, double t, int max_terms) {
    if (!(t > 0.0)) raise(ErrorCode::DivergentAtZero, "M0~ diverges at t <= 0", t);
    const double c = 2.0 * (kPi / l) * (kPi / l) * t;
    SeriesValue s = exp_series(c, 4.0, 2, max_terms);
    SeriesValue out;
    out.value = std::sqrt(s.value);
    out.tail = s.tail / (2.0 * out.value);
    return out;
}

SeriesValue series_m1_resonance(double l, double t, double theta, int max_terms) {
    if (!(t > 0.0)) raise(ErrorCode::DivergentAtZero, "M1~ diverges at t <= 0", t);
    require_theta(theta);
    const double c = (1.0 - theta) * (kPi / l) * (kPi / l) * t;
    return exp_series(c, 4.0, 2, max_terms);
}

double v0_l2_norm(const std::vector<double>& v0, double l) {
    std::vector<double> sq(v0.size());
    for (size_t i = 0; i < v0.size(); ++i) sq[i] = v0[i] * v0[i];
    const double h = l / (static_cast<double>(v0.size()) - 1.0);
    return std::sqrt(std::max(0.0, (2.0 / l) * simpson(sq, h)));
}

BoundEntry subcritical_bound(const Trajectory& traj, const BoundaryData& bd, double phi_param,
                             double theta, double t) {
    require_theta(theta);
    if (!(t > 0.0)) raise(ErrorCode::DivergentAtZero, "bound is evaluated for t > 0 only", t);
    const double l = traj.l;
    const double k1sq = (kPi / l) * (kPi / l);
    const SeriesValue m2 = series_m2(phi_param, l); // also rejects Phi >= (pi/l)^2

    StationaryResult st = stationary_solution(phi_param, l, bd.mu_tilde(0), bd.mu_tilde(1));
    const std::vector<double> phi_tilde = st.sample(traj.grid_intervals());

    const size_t k = snapshot_index_at(traj, t);
    const double observed = sup_deviation(traj, k, phi_tilde);

    const std::vector<double> v0 =
        v0_samples(traj, bd, phi_tilde, bd.mu_tilde(0), bd.mu_tilde(1));
    const double v0_norm = v0_l2_norm(v0, l);

    const SeriesValue m0 = series_m0(l, t);
    const SeriesValue m1 = series_m1(l, t, theta);
    const double decay = std::exp((phi_param - k1sq) * t);
    const double decay_1mt = std::exp((1.0 - theta) * (phi_param - k1sq) * t);
    const double nu_early = nu_sup(bd, phi_param, 0.0, theta * t);
    const double nu_late = nu_sup(bd, phi_param, theta * t, t);

    BoundEntry entry;
    entry.t = t;
    entry.theta = theta;
    entry.observed = observed;
    entry.bound = std::max(std::abs(bd.delta(0, t)), std::abs(bd.delta(1, t))) +
                  m0.value * decay * v0_norm +
                  m1.value * decay_1mt * nu_early / (k1sq - phi_param) + m2.value * nu_late;
    entry.truncation_tail = m0.tail * decay * v0_norm +
                            m1.tail * decay_1mt * nu_early / (k1sq - phi_param) +
                            m2.tail * nu_late;
    entry.margin = entry.bound - entry.observed;
    return entry;
}

SineSeries limit_profile_resonance(const WarpedProductMetric& phi0, const BoundaryData& bd,
                                   double l) {
    for (int j = 0; j < 2; ++j) {
        if (std::abs(bd.mu_tilde(j)) > 1e-12)
            raise(ErrorCode::NotResonant, "limit profile requires vanishing boundary limits");
        if (bd.endpoint[j].family == BoundaryFamily::Tabulated)
            raise(ErrorCode::NonIntegrableBoundary,
                  "improper forcing integral needs an analytic family");
    }
    const int m = phi0.intervals();
    std::vector<double> v0(phi0.phi.size());
    for (int i = 0; i <= m; ++i) {
        const double x = l * i / m;
        v0[static_cast<size_t>(i)] = phi0.phi[static_cast<size_t>(i)] -
                                     (bd.mu(0, 0.0) * (l - x) / l + bd.mu(1, 0.0) * x / l);
    }
    const double v1_0 = sine_coefficients(v0, l, 1).coeffs[0];

    // integral_0^inf f_1 with f_1 = (2/pi)(g_0 + g_1), g_j = Phi delta_j - delta_j'.
    const double phi_param = (kPi / l) * (kPi / l);
    double f1_integral = 0.0;
    for (int j = 0; j < 2; ++j) {
        const BoundaryEndpoint& e = bd.endpoint[j];
        if (e.family == BoundaryFamily::ExponentialApproach)
            f1_integral += (2.0 / kPi) * (phi_param + e.rate) * e.delta0 / e.rate;
    }

    SineSeries out;
    out.l = l;
    out.coeffs = {v1_0 + f1_integral};
    return out;
}

BoundEntry resonance_bound(const Trajectory& traj, const BoundaryData& bd, double theta,
                           double t) {
    require_theta(theta);
    if (!(t > 0.0)) raise(ErrorCode::DivergentAtZero, "bound is evaluated for t > 0 only", t);
    const double l = traj.l;
    if (!is_resonant(traj.phi_param, l))
        raise(ErrorCode::NotResonant, "resonance bound requires Phi = (pi/l)^2",
              traj.phi_param);
    const double k1sq = (kPi / l) * (kPi / l);

    const SineSeries profile = limit_profile_resonance(traj.snapshots.front(), bd, l);
    const int m = traj.grid_intervals();
    const std::vector<double> reference =
        sample_on_grid([&profile](double x) { return profile.evaluate(x); }, l, m);

    const size_t k = snapshot_index_at(traj, t);
    const double observed = sup_deviation(traj, k, reference);

    const std::vector<double> zero(static_cast<size_t>(m) + 1, 0.0);
    const std::vector<double> v0 = v0_samples(traj, bd, zero, 0.0, 0.0);
    const double v0_norm = v0_l2_norm(v0, l);

    const SeriesValue m0 = series_m0_resonance(l, t);
    const SeriesValue m1 = series_m1_resonance(l, t, theta);
    const double nu_early = nu_sup(bd, k1sq, 0.0, theta * t);
    const double nu_late = nu_sup(bd, k1sq, theta * t, t);
    const double geom = 2.0 * l * l / (kPi * kPi * kPi);

    BoundEntry entry;
    entry.t = t;
    entry.theta = theta;
    entry.observed = observed;
    entry.bound = (6.0 / kPi) * nu_integral_to_infinity(bd, k1sq, t) +
                  std::max(std::abs(bd.delta(0, t)), std::abs(bd.delta(1, t))) +
                  m0.value * std::exp(-3.0 * k1sq * t) * v0_norm +
                  m1.value * geom * std::exp(-3.0 * (1.0 - theta) * k1sq * t) * nu_early +
                  0.75 * geom * nu_late;
    entry.truncation_tail = m0.tail * std::exp(-3.0 * k1sq * t) * v0_norm +
                            m1.tail * geom * std::exp(-3.0 * (1.0 - theta) * k1sq * t) * nu_early;
    entry.margin = entry.bound - entry.observed;
    return entry;
}

double ode_envelope(double a, double y0, double nu_sup_left, double nu_sup_right, double t,
                    double theta) {
    if (a >= 0.0) raise(ErrorCode::NonNegativeRate, "envelope requires a < 0", a);
    require_theta(theta);
    if (t < 0.0) raise(ErrorCode::InvalidArgument, "t must be >= 0", t);
    return std::abs(y0) * std::exp(a * t) +
           std::exp((1.0 - theta) * a * t) * nu_sup_left / std::abs(a) +
           nu_sup_right / std::abs(a);
}

double first_sine_coefficient(const Trajectory& traj, size_t k) {
    if (k >= traj.snapshots.size()) raise(ErrorCode::InvalidArgument, "snapshot out of range");
    const auto& p = traj.snapshots[k].phi;
    const int m = traj.grid_intervals();
    const double l = traj.l;
    std::vector<double> integrand(p.size());
    for (int i = 0; i <= m; ++i)
        integrand[static_cast<size_t>(i)] =
            p[static_cast<size_t>(i)] * std::sin(kPi * i / double(m));
    return (2.0 / l) * simpson(integrand, l / m);
}

DivergenceReport divergence_rate(const Trajectory& traj) {
    const size_t count = traj.snapshots.size();
    // Tail window: drop the first 40% as transient.
    const size_t start = static_cast<size_t>(std::ceil(0.4 * count));
    if (count < 3 || count - start < 20)
        raise(ErrorCode::TooShort, "need at least 20 snapshots after the transient window");

    std::vector<double> ts, sup, lnsup, c1;
    for (size_t k = start; k < count; ++k) {
        double s = 0.0;
        for (double v : traj.snapshots[k].phi) s = std::max(s, std::abs(v));
        ts.push_back(traj.times[k]);
        sup.push_back(s);
        c1.push_back(first_sine_coefficient(traj, k));
    }

    DivergenceReport rep;
    const double s0 = sup.front();
    const double s1 = sup.back();
    if (s1 <= 1.2 * std::max(s0, 1e-300)) {
        rep.kind = GrowthKind::None;
        return rep;
    }
    // Saturating runs (convergence toward a larger limit profile) grow early
    // and flatten; genuine divergence keeps growing across the tail.
    const double s_mid = sup[sup.size() / 2];
    if (s1 <= 1.1 * std::max(s_mid, 1e-300)) {
        rep.kind = GrowthKind::None;
        return rep;
    }

    for (double s : sup) {
        if (s <= 0.0) { // cannot take logs; bounded-at-zero counts as no growth
            rep.kind = GrowthKind::None;
            return rep;
        }
    }
    lnsup.resize(sup.size());
    for (size_t i = 0; i < sup.size(); ++i) lnsup[i] = std::log(sup[i]);

    const AffineFit exp_fit = affine_fit(ts, lnsup);
    const AffineFit lin_fit = affine_fit(ts, c1);
    const double exp_range =
        *std::max_element(lnsup.begin(), lnsup.end()) - *std::min_element(lnsup.begin(), lnsup.end());
    const double lin_range =
        *std::max_element(c1.begin(), c1.end()) - *std::min_element(c1.begin(), c1.end());
    const double exp_dev = exp_fit.max_abs_dev / std::max(exp_range, 1e-300);
    const double lin_dev = lin_fit.max_abs_dev / std::max(lin_range, 1e-300);

    if (exp_dev <= 0.02 || (lin_dev > 0.02 && exp_dev <= lin_dev)) {
        rep.kind = GrowthKind::Exponential;
        rep.rate = exp_fit.slope;
    } else {
        rep.kind = GrowthKind::Linear;
        rep.slope = lin_fit.slope;
    }
    return rep;
}

} // namespace prf

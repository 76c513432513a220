#include "core/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/stationary.hpp"

namespace prf {

namespace {

constexpr double kOverflowCap = 1e300;
constexpr double kBoundaryMatchTol = 1e-8;

struct EffectiveReference {
    std::vector<double> phi_tilde; // sampled reference profile
    double offset[2] = {0.0, 0.0}; // delta_eff_j(t) = mu_j(t) - offset[j]
};

// Reference profile the sine expansion is taken against. At the first resonance
// the stationary problem is met with phi_tilde = 0 (solvable family with
// mu_tilde = 0, or no solution at all), so the whole boundary value acts as the
// moving lift.
EffectiveReference effective_reference(const BoundaryData& bd, double phi_param, double l,
                                       int m) {
    EffectiveReference ref;
    if (is_resonant(phi_param, l)) {
        ref.phi_tilde.assign(static_cast<size_t>(m) + 1, 0.0);
        return ref;
    }
    StationaryResult st = stationary_solution(phi_param, l, bd.mu_tilde(0), bd.mu_tilde(1));
    ref.phi_tilde = st.sample(m);
    ref.offset[0] = bd.mu_tilde(0);
    ref.offset[1] = bd.mu_tilde(1);
    return ref;
}

double lift_from_deltas(double d0, double d1, double x, double l) {
    return d0 * (l - x) / l + d1 * x / l;
}

void check_initial_match(const WarpedProductMetric& phi0, const BoundaryData& bd) {
    const double gap0 = std::abs(phi0.phi.front() - bd.mu(0, 0.0));
    const double gap1 = std::abs(phi0.phi.back() - bd.mu(1, 0.0));
    const double gap = std::max(gap0, gap1);
    if (gap > kBoundaryMatchTol)
        raise(ErrorCode::BoundaryMismatch, "phi0 endpoints disagree with mu_j(0)", gap);
}

double max_abs(const std::vector<double>& v) {
    double out = 0.0;
    for (double x : v) out = std::max(out, std::abs(x));
    return out;
}

// Estimated bound on the dropped coefficient tail, from the observed algebraic
// decay of the trailing computed coefficients.
double tail_estimate(const std::vector<double>& coeffs) {
    const int j_hi = static_cast<int>(coeffs.size());
    if (j_hi < 8) return 0.0;
    const double c_hi = std::abs(coeffs[coeffs.size() - 1]);
    const double scale = max_abs(coeffs);
    if (c_hi <= 1e-14 * std::max(1.0, scale)) return 0.0;
    const int j_lo = j_hi / 2;
    const double c_lo = std::abs(coeffs[static_cast<size_t>(j_lo) - 1]);
    if (c_lo <= 0.0) return c_hi * j_hi;
    const double p = std::log(c_lo / c_hi) / std::log(static_cast<double>(j_hi) / j_lo);
    if (p > 1.2) return c_hi * j_hi / (p - 1.0);
    return c_hi * j_hi; // decay too slow to certify much
}

} // namespace

void FlowConfig::validate() const {
    if (!(dt > 0.0)) raise(ErrorCode::InvalidArgument, "dt must be positive");
    if (!(t_end >= dt)) raise(ErrorCode::InvalidArgument, "t_end must be at least dt");
    if (m < 8) raise(ErrorCode::InvalidArgument, "need at least m = 8 grid intervals");
    if (resolved_series_terms() < 4)
        raise(ErrorCode::InvalidArgument, "need at least 4 sine-series terms");
    if (snapshot_stride < 1) raise(ErrorCode::InvalidArgument, "snapshot_stride must be >= 1");
}

double SineSeries::evaluate(double x) const {
    if (x == 0.0 || x == l) return 0.0;
    double acc = 0.0;
    for (size_t j = coeffs.size(); j-- > 0;)
        acc += coeffs[j] * std::sin(std::numbers::pi * (j + 1) * x / l);
    return acc;
}

double lift_U(const BoundaryData& bd, double t, double x, double l) {
    return lift_from_deltas(bd.delta(0, t), bd.delta(1, t), x, l);
}

double forcing_term(const BoundaryData& bd, double phi_param, double t, double x, double l) {
    const double d0 = bd.delta(0, t), d1 = bd.delta(1, t);
    const double dd0 = bd.dmu(0, t), dd1 = bd.dmu(1, t);
    return (phi_param * d0 - dd0) + (x / l) * (phi_param * (d1 - d0) + dd0 - dd1);
}

SineSeries sine_coefficients(const std::vector<double>& samples, double l, int terms) {
    if (terms < 1) raise(ErrorCode::InvalidArgument, "need at least one series term");
    if (samples.size() < 5) raise(ErrorCode::InvalidArgument, "need at least 5 samples");
    const double scale = std::max(1.0, max_abs(samples));
    if (std::abs(samples.front()) > 1e-8 * scale || std::abs(samples.back()) > 1e-8 * scale)
        raise(ErrorCode::NonVanishingEndpoints,
              "sine series requires samples vanishing at the endpoints",
              std::max(std::abs(samples.front()), std::abs(samples.back())));
    const int m = static_cast<int>(samples.size()) - 1;
    const double h = l / m;
    SineSeries out;
    out.l = l;
    out.coeffs.resize(static_cast<size_t>(terms));
    std::vector<double> integrand(samples.size());
    for (int j = 1; j <= terms; ++j) {
        for (int i = 0; i <= m; ++i)
            integrand[static_cast<size_t>(i)] =
                samples[static_cast<size_t>(i)] * std::sin(std::numbers::pi * j * i / double(m));
        out.coeffs[static_cast<size_t>(j) - 1] = (2.0 / l) * simpson(integrand, h);
    }
    return out;
}

Trajectory evolve_fd(const WarpedProductMetric& phi0, const BoundaryData& bd,
                     const FlowConfig& cfg) {
    cfg.validate();
    phi0.validate(false);
    if (phi0.intervals() != cfg.m)
        raise(ErrorCode::InvalidArgument, "initial metric grid does not match config");
    bd.validate_horizon(cfg.t_end);
    check_initial_match(phi0, bd);

    const int m = cfg.m;
    const double l = phi0.l;
    const double h = l / m;
    const long steps = std::llround(cfg.t_end / cfg.dt);
    const double dt = cfg.dt;
    const double r = dt / (2.0 * h * h);
    const double diag_a = 1.0 + dt / (h * h) - 0.5 * cfg.phi_param * dt;
    const double diag_b = 1.0 - dt / (h * h) + 0.5 * cfg.phi_param * dt;

    Trajectory traj;
    traj.l = l;
    traj.n = phi0.n;
    traj.phi_param = cfg.phi_param;
    traj.backend = FlowBackend::FiniteDifference;
    traj.boundary = bd;
    traj.times.push_back(0.0);
    traj.snapshots.push_back(phi0);

    const int nu = m - 1; // interior unknowns
    // Thomas forward-elimination factors are constant; precompute them.
    std::vector<double> cprime(static_cast<size_t>(nu));
    std::vector<double> inv_denom(static_cast<size_t>(nu));
    cprime[0] = -r / diag_a;
    inv_denom[0] = 1.0 / diag_a;
    for (int i = 1; i < nu; ++i) {
        const double denom = diag_a + r * cprime[static_cast<size_t>(i) - 1];
        inv_denom[static_cast<size_t>(i)] = 1.0 / denom;
        cprime[static_cast<size_t>(i)] = -r / denom;
    }

    std::vector<double> u = phi0.phi;
    std::vector<double> rhs(static_cast<size_t>(nu)), work(static_cast<size_t>(nu));

    auto record = [&](double t, const std::vector<double>& state) {
        WarpedProductMetric g;
        g.l = l;
        g.n = phi0.n;
        g.phi = state;
        g.dx = h;
        traj.times.push_back(t);
        traj.snapshots.push_back(std::move(g));
    };

    for (long k = 0; k < steps; ++k) {
        const double t_half = (k + 0.5) * dt;
        const double t_next = (k + 1) * dt;
        for (int i = 1; i < m; ++i)
            rhs[static_cast<size_t>(i) - 1] =
                diag_b * u[static_cast<size_t>(i)] +
                r * (u[static_cast<size_t>(i) - 1] + u[static_cast<size_t>(i) + 1]);
        // Boundary rows: both CN levels of the Dirichlet value collapse onto
        // the half-step value, replacing the u[0] / u[m] terms added above.
        rhs[0] += r * (2.0 * bd.mu(0, t_half) - u.front());
        rhs[static_cast<size_t>(nu) - 1] += r * (2.0 * bd.mu(1, t_half) - u.back());

        work[0] = rhs[0] * inv_denom[0];
        for (int i = 1; i < nu; ++i)
            work[static_cast<size_t>(i)] =
                (rhs[static_cast<size_t>(i)] + r * work[static_cast<size_t>(i) - 1]) *
                inv_denom[static_cast<size_t>(i)];
        for (int i = nu - 2; i >= 0; --i)
            work[static_cast<size_t>(i)] -=
                cprime[static_cast<size_t>(i)] * work[static_cast<size_t>(i) + 1];
        for (int i = 1; i < m; ++i) u[static_cast<size_t>(i)] = work[static_cast<size_t>(i) - 1];
        u.front() = bd.mu(0, t_next);
        u.back() = bd.mu(1, t_next);

        double amax = 0.0;
        bool finite = true;
        for (double v : u) {
            if (!std::isfinite(v)) { finite = false; break; }
            amax = std::max(amax, std::abs(v));
        }
        if (!finite || amax > kOverflowCap) {
            traj.diverged = true;
            traj.divergence_time = t_next;
            break;
        }
        if ((k + 1) % cfg.snapshot_stride == 0 || k + 1 == steps) record(t_next, u);
    }
    return traj;
}

Trajectory evolve_spectral(const WarpedProductMetric& phi0, const BoundaryData& bd,
                           const FlowConfig& cfg) {
    cfg.validate();
    phi0.validate(false);
    if (phi0.intervals() != cfg.m)
        raise(ErrorCode::InvalidArgument, "initial metric grid does not match config");
    bd.validate_horizon(cfg.t_end);
    check_initial_match(phi0, bd);

    const int m = cfg.m;
    const double l = phi0.l;
    const double h = l / m;
    const double phi_param = cfg.phi_param;
    const int terms = cfg.resolved_series_terms();
    const long steps = std::llround(cfg.t_end / cfg.dt);
    const double dt = cfg.dt;
    const double pi = std::numbers::pi;

    const EffectiveReference ref = effective_reference(bd, phi_param, l, m);

    std::vector<double> v0(phi0.phi.size());
    for (int i = 0; i <= m; ++i) {
        const double x = l * i / m;
        v0[static_cast<size_t>(i)] =
            phi0.phi[static_cast<size_t>(i)] - ref.phi_tilde[static_cast<size_t>(i)] -
            lift_from_deltas(bd.mu(0, 0.0) - ref.offset[0], bd.mu(1, 0.0) - ref.offset[1], x, l);
    }
    SineSeries series = sine_coefficients(v0, l, terms);
    std::vector<double> v = series.coeffs;

    Trajectory traj;
    traj.l = l;
    traj.n = phi0.n;
    traj.phi_param = phi_param;
    traj.backend = FlowBackend::Spectral;
    traj.boundary = bd;
    traj.spectral_tail_estimate = tail_estimate(v);
    traj.times.push_back(0.0);
    traj.snapshots.push_back(phi0);

    // Mode rates, step factors and the sine table (exact zeros at endpoints).
    std::vector<double> rate(static_cast<size_t>(terms));
    std::vector<double> decay(static_cast<size_t>(terms));
    std::vector<double> w_phi1(static_cast<size_t>(terms));
    std::vector<double> w_phi2(static_cast<size_t>(terms));
    for (int j = 1; j <= terms; ++j) {
        const double kj = pi * j / l;
        const double a = phi_param - kj * kj;
        rate[static_cast<size_t>(j) - 1] = a;
        decay[static_cast<size_t>(j) - 1] = std::exp(a * dt);
        w_phi1[static_cast<size_t>(j) - 1] = phi1(a * dt);
        w_phi2[static_cast<size_t>(j) - 1] = phi2(a * dt);
    }
    std::vector<double> sin_table(static_cast<size_t>(terms) * (m + 1), 0.0);
    for (int j = 1; j <= terms; ++j)
        for (int i = 1; i < m; ++i)
            sin_table[(static_cast<size_t>(j) - 1) * (m + 1) + i] = std::sin(pi * j * i / double(m));

    // Step integral of exp(a (dt - s)) g_k(t_n + s) over [0, dt] with
    // g_k = Phi * delta_eff_k - delta_k'. For the analytic families the
    // integral is exact and splits into a constant plus a decaying part with
    // per-mode coefficients:
    //   I_k,j(t_n) = k_const[j] + k_exp[j] * exp(-rate_k * t_n).
    // Tabulated data uses a product rule with the exact kernel and a linear
    // interpolant of g between the step endpoints; plain quadrature points
    // cannot see the O(1/|a|) boundary layer of stiff modes, this rule is
    // uniformly accurate in a*dt.
    struct EndpointPlan {
        bool tabulated = false;
        double exp_rate = 0.0;
        std::vector<double> k_const;
        std::vector<double> k_exp;
    };
    EndpointPlan plan[2];
    for (int k = 0; k < 2; ++k) {
        const BoundaryEndpoint& e = bd.endpoint[k];
        if (e.family == BoundaryFamily::Tabulated) {
            plan[k].tabulated = true;
            continue;
        }
        plan[k].k_const.resize(static_cast<size_t>(terms));
        plan[k].k_exp.assign(static_cast<size_t>(terms), 0.0);
        const double base = e.mu_tilde - ref.offset[k]; // constant part of delta_eff
        for (int j = 1; j <= terms; ++j) {
            const size_t jj = static_cast<size_t>(j) - 1;
            plan[k].k_const[jj] = phi_param * base * dt * w_phi1[jj];
            if (e.family == BoundaryFamily::ExponentialApproach) {
                const double a = rate[jj];
                plan[k].exp_rate = e.rate;
                plan[k].k_exp[jj] = (phi_param + e.rate) * e.delta0 * decay[jj] * dt *
                                    phi1(-(a + e.rate) * dt);
            }
        }
    }

    const auto endpoint_integral = [&](const EndpointPlan& pl, size_t jj, double exp_factor,
                                       double g0, double g1) {
        if (!pl.tabulated) return pl.k_const[jj] + pl.k_exp[jj] * exp_factor;
        return dt * (g1 * w_phi1[jj] + (g0 - g1) * w_phi2[jj]);
    };

    auto record = [&](double t) {
        WarpedProductMetric g;
        g.l = l;
        g.n = phi0.n;
        g.dx = h;
        g.phi.resize(static_cast<size_t>(m) + 1);
        const double d0 = bd.mu(0, t) - ref.offset[0];
        const double d1 = bd.mu(1, t) - ref.offset[1];
        for (int i = 0; i <= m; ++i) {
            double acc = ref.phi_tilde[static_cast<size_t>(i)] +
                         lift_from_deltas(d0, d1, l * i / m, l);
            for (int j = 0; j < terms; ++j)
                acc += v[static_cast<size_t>(j)] *
                       sin_table[static_cast<size_t>(j) * (m + 1) + i];
            g.phi[static_cast<size_t>(i)] = acc;
        }
        g.phi.front() = bd.mu(0, t);
        g.phi.back() = bd.mu(1, t);
        traj.times.push_back(t);
        traj.snapshots.push_back(std::move(g));
    };

    for (long k = 0; k < steps; ++k) {
        const double t_n = k * dt;
        const double t_next = (k + 1) * dt;
        double exp_factor[2] = {0.0, 0.0};
        double g0[2] = {0.0, 0.0}, g1[2] = {0.0, 0.0};
        for (int e = 0; e < 2; ++e) {
            if (plan[e].tabulated) {
                const BoundaryEndpoint& ep = bd.endpoint[e];
                g0[e] = phi_param * (ep.mu(t_n) - ref.offset[e]) - ep.dmu(t_n);
                g1[e] = phi_param * (ep.mu(t_next) - ref.offset[e]) - ep.dmu(t_next);
            } else if (plan[e].exp_rate != 0.0) {
                exp_factor[e] = std::exp(-plan[e].exp_rate * t_n);
            }
        }
        bool overflow = false;
        for (int j = 1; j <= terms; ++j) {
            const size_t jj = static_cast<size_t>(j) - 1;
            const double left = endpoint_integral(plan[0], jj, exp_factor[0], g0[0], g1[0]);
            const double right = endpoint_integral(plan[1], jj, exp_factor[1], g0[1], g1[1]);
            const double forced =
                (2.0 / (pi * j)) * (left + (j % 2 == 1 ? 1.0 : -1.0) * right);
            double& vj = v[jj];
            vj = decay[jj] * vj + forced;
            if (!std::isfinite(vj) || std::abs(vj) > kOverflowCap) overflow = true;
        }
        if (overflow) {
            traj.diverged = true;
            traj.divergence_time = t_next;
            break;
        }
        if ((k + 1) % cfg.snapshot_stride == 0 || k + 1 == steps) record(t_next);
    }
    return traj;
}

double sup_distance(const Trajectory& a, const Trajectory& b) {
    const size_t count = std::min(a.snapshots.size(), b.snapshots.size());
    if (count == 0) return 0.0;
    double out = 0.0;
    for (size_t k = 0; k < count; ++k) {
        if (std::abs(a.times[k] - b.times[k]) > 1e-12 * std::max(1.0, std::abs(a.times[k])))
            raise(ErrorCode::InvalidArgument, "trajectories have mismatched snapshot times");
        const auto& pa = a.snapshots[k].phi;
        const auto& pb = b.snapshots[k].phi;
        if (pa.size() != pb.size())
            raise(ErrorCode::InvalidArgument, "trajectories have mismatched grids");
        for (size_t i = 0; i < pa.size(); ++i)
            out = std::max(out, std::abs(pa[i] - pb[i]));
    }
    return out;
}

double sup_deviation(const Trajectory& traj, size_t k, const std::vector<double>& reference) {
    if (k >= traj.snapshots.size())
        raise(ErrorCode::InvalidArgument, "snapshot index out of range");
    const auto& p = traj.snapshots[k].phi;
    if (p.size() != reference.size())
        raise(ErrorCode::InvalidArgument, "reference grid mismatch");
    double out = 0.0;
    for (size_t i = 0; i < p.size(); ++i) out = std::max(out, std::abs(p[i] - reference[i]));
    return out;
}

} // namespace prf

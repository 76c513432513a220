#include "core/geometry.hpp"

#include <cmath>
#include <limits>

namespace prf {

namespace {

constexpr double kAvailabilityRelTol = 1e-12;

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

struct EvolutionContext {
    const Trajectory* traj = nullptr;
    std::vector<CurvatureSnapshot> snaps;
    double dt_snap = 0.0;
    int m = 0;
    double h = 0.0;
};

EvolutionContext prepare_evolution(const Trajectory& traj) {
    if (traj.snapshots.size() < 3)
        raise(ErrorCode::InsufficientSnapshots,
              "evolution checks need at least three snapshots");
    EvolutionContext ctx;
    ctx.traj = &traj;
    ctx.m = traj.grid_intervals();
    ctx.h = traj.l / ctx.m;
    ctx.snaps.reserve(traj.snapshots.size());
    for (const auto& g : traj.snapshots) ctx.snaps.push_back(curvature_snapshot(g));
    return ctx;
}

bool uniform_triple(const Trajectory& traj, size_t k, double* dt_out) {
    const double d1 = traj.times[k] - traj.times[k - 1];
    const double d2 = traj.times[k + 1] - traj.times[k];
    if (std::abs(d2 - d1) > 1e-9 * std::max(d1, d2)) return false;
    *dt_out = d1;
    return true;
}

// Walks every interior time level / trusted grid point and hands the callback
// the three curvature snapshots around it.
template <typename F>
ResidualReport evolution_sweep(const EvolutionContext& ctx, double cap, F&& residual_at) {
    ResidualReport rep;
    double sum_sq = 0.0;
    bool any_uniform = false;
    for (size_t k = 1; k + 1 < ctx.snaps.size(); ++k) {
        double dt = 0.0;
        if (!uniform_triple(*ctx.traj, k, &dt)) continue;
        any_uniform = true;
        const CurvatureSnapshot& prev = ctx.snaps[k - 1];
        const CurvatureSnapshot& cur = ctx.snaps[k];
        const CurvatureSnapshot& next = ctx.snaps[k + 1];
        for (int i = 2; i <= ctx.m - 2; ++i) {
            bool trusted = true;
            for (int di = -1; di <= 1 && trusted; ++di) {
                const size_t ii = static_cast<size_t>(i + di);
                if (!prev.available[ii] || !cur.available[ii] || !next.available[ii] ||
                    std::abs(cur.a[ii]) > cap)
                    trusted = false;
            }
            if (!trusted) continue;
            const auto [lhs, rhs] = residual_at(prev, cur, next, static_cast<size_t>(i), dt);
            const double r = std::abs(lhs - rhs);
            rep.max_residual = std::max(rep.max_residual, r);
            rep.lhs_max = std::max(rep.lhs_max, std::abs(lhs));
            rep.rhs_max = std::max(rep.rhs_max, std::abs(rhs));
            sum_sq += r * r;
            ++rep.points;
        }
    }
    if (!any_uniform)
        raise(ErrorCode::InsufficientSnapshots,
              "no uniformly spaced snapshot triple to difference in time");
    if (rep.points > 0) rep.rms_residual = std::sqrt(sum_sq / rep.points);
    return rep;
}

} // namespace

CurvatureSnapshot curvature_snapshot(const WarpedProductMetric& g) {
    g.validate(false);
    const int m = g.intervals();
    const double h = g.dx;
    const auto& p = g.phi;

    double sup = 0.0;
    for (double v : p) sup = std::max(sup, std::abs(v));
    const double threshold = kAvailabilityRelTol * sup;

    for (int i = 1; i < m; ++i)
        if (p[static_cast<size_t>(i)] <= 0.0)
            raise(ErrorCode::NonPositiveWarping,
                  "warping function not positive at an interior grid point",
                  p[static_cast<size_t>(i)], i);

    CurvatureSnapshot out;
    const size_t count = p.size();
    out.a.assign(count, quiet_nan());
    out.rho.assign(count, quiet_nan());
    out.available.assign(count, 0);

    const auto usable = [&](int i) { return p[static_cast<size_t>(i)] > threshold; };

    for (int i = 1; i < m; ++i) {
        if (!usable(i)) continue;
        const size_t ii = static_cast<size_t>(i);
        out.a[ii] = -(p[ii + 1] - p[ii - 1]) / (2.0 * h * p[ii]);
        out.rho[ii] = -(p[ii + 1] - 2.0 * p[ii] + p[ii - 1]) / (h * h * p[ii]);
        out.available[ii] = 1;
    }
    if (usable(0)) {
        out.a[0] = -(-3.0 * p[0] + 4.0 * p[1] - p[2]) / (2.0 * h * p[0]);
        out.rho[0] = -(2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3]) / (h * h * p[0]);
        out.available[0] = 1;
    }
    if (usable(m)) {
        const size_t e = static_cast<size_t>(m);
        out.a[e] = -(3.0 * p[e] - 4.0 * p[e - 1] + p[e - 2]) / (2.0 * h * p[e]);
        out.rho[e] = -(2.0 * p[e] - 5.0 * p[e - 1] + 4.0 * p[e - 2] - p[e - 3]) / (h * h * p[e]);
        out.available[e] = 1;
    }

    out.tau1.resize(count);
    out.ric_n.resize(count);
    out.k_mix = out.rho;
    out.sc_mix.resize(count);
    for (size_t i = 0; i < count; ++i) {
        out.tau1[i] = g.n * out.a[i];
        out.ric_n[i] = g.n * out.rho[i];
        out.sc_mix[i] = g.n * out.rho[i];
    }
    return out;
}

ResidualReport check_riccati(const WarpedProductMetric& g, double quotient_cap) {
    const CurvatureSnapshot snap = curvature_snapshot(g);
    const int m = g.intervals();
    const double h = g.dx;
    ResidualReport rep;
    double sum_sq = 0.0;
    // Restrict to points whose whole stencil is made of central-difference
    // quotients; mixing the one-sided endpoint values into d/dx would drop the
    // difference to first order.
    for (int i = 2; i <= m - 2; ++i) {
        const size_t ii = static_cast<size_t>(i);
        bool trusted = snap.available[ii - 1] && snap.available[ii] && snap.available[ii + 1];
        for (int di = -1; di <= 1 && trusted; ++di)
            if (std::abs(snap.a[ii + static_cast<size_t>(di + 1) - 1]) > quotient_cap)
                trusted = false;
        if (!trusted) continue;
        const double da = (snap.a[ii + 1] - snap.a[ii - 1]) / (2.0 * h);
        const double rhs = snap.a[ii] * snap.a[ii] + snap.rho[ii];
        const double r = std::abs(da - rhs);
        rep.max_residual = std::max(rep.max_residual, r);
        rep.lhs_max = std::max(rep.lhs_max, std::abs(da));
        rep.rhs_max = std::max(rep.rhs_max, std::abs(rhs));
        sum_sq += r * r;
        ++rep.points;
    }
    if (rep.points > 0) rep.rms_residual = std::sqrt(sum_sq / rep.points);
    return rep;
}

ResidualReport check_a_evolution(const Trajectory& traj, double /*phi_param*/,
                                 double quotient_cap) {
    EvolutionContext ctx = prepare_evolution(traj);
    const double h = ctx.h;
    return evolution_sweep(ctx, quotient_cap,
                           [h](const CurvatureSnapshot& prev, const CurvatureSnapshot& cur,
                               const CurvatureSnapshot& next, size_t i, double dt) {
                               const double lhs = (next.a[i] - prev.a[i]) / (2.0 * dt);
                               const double axx =
                                   (cur.a[i + 1] - 2.0 * cur.a[i] + cur.a[i - 1]) / (h * h);
                               const double ax = (cur.a[i + 1] - cur.a[i - 1]) / (2.0 * h);
                               return std::pair<double, double>(lhs,
                                                                axx - 2.0 * cur.a[i] * ax);
                           });
}

Tau1Report check_tau1_evolution(const Trajectory& traj, int n, double quotient_cap) {
    if (n < 1) raise(ErrorCode::InvalidArgument, "fiber dimension must be >= 1");
    if (n != traj.n)
        raise(ErrorCode::InvalidArgument,
              "requested fiber dimension disagrees with the trajectory metrics", n);
    EvolutionContext ctx = prepare_evolution(traj);
    const double h = ctx.h;
    Tau1Report out;
    double gap = 0.0;
    out.report = evolution_sweep(
        ctx, quotient_cap,
        [h, n, &gap](const CurvatureSnapshot& prev, const CurvatureSnapshot& cur,
                     const CurvatureSnapshot& next, size_t i, double dt) {
            // Route 1: the mean-curvature law via the tau1 / Ric_N fields.
            const double lhs1 = (next.tau1[i] - prev.tau1[i]) / (2.0 * dt);
            const double txx = (cur.tau1[i + 1] - 2.0 * cur.tau1[i] + cur.tau1[i - 1]) / (h * h);
            const double tx = (cur.tau1[i + 1] - cur.tau1[i - 1]) / (2.0 * h);
            const double rhs1 = txx - (2.0 / n) * cur.tau1[i] * tx;
            // Route 2: n times the reduced Weingarten law. Both printed forms
            // collapse to this expression; the two routes must agree to round-off.
            const double lhs2 = n * (next.a[i] - prev.a[i]) / (2.0 * dt);
            const double axx = (cur.a[i + 1] - 2.0 * cur.a[i] + cur.a[i - 1]) / (h * h);
            const double ax = (cur.a[i + 1] - cur.a[i - 1]) / (2.0 * h);
            const double rhs2 = n * (axx - 2.0 * cur.a[i] * ax);
            const double f1 = lhs1 - rhs1;
            const double f2 = lhs2 - rhs2;
            // Round-off scale of the leaf terms feeding the two routes; the
            // stencil divisions amplify rounding even where the sums cancel.
            const double mag =
                (std::abs(next.tau1[i]) + std::abs(prev.tau1[i])) / (2.0 * dt) +
                (std::abs(cur.tau1[i + 1]) + 2.0 * std::abs(cur.tau1[i]) +
                 std::abs(cur.tau1[i - 1])) / (h * h) +
                (2.0 / n) * std::abs(cur.tau1[i]) *
                    (std::abs(cur.tau1[i + 1]) + std::abs(cur.tau1[i - 1])) / (2.0 * h) +
                1e-300;
            gap = std::max(gap, std::abs(f1 - f2) / mag);
            return std::pair<double, double>(lhs1, rhs1);
        });
    out.form_gap = gap;
    return out;
}

ResidualReport check_rn_evolution(const Trajectory& traj, double quotient_cap) {
    EvolutionContext ctx = prepare_evolution(traj);
    const double h = ctx.h;
    return evolution_sweep(ctx, quotient_cap,
                           [h](const CurvatureSnapshot& prev, const CurvatureSnapshot& cur,
                               const CurvatureSnapshot& next, size_t i, double dt) {
                               const double lhs = (next.rho[i] - prev.rho[i]) / (2.0 * dt);
                               const double rxx =
                                   (cur.rho[i + 1] - 2.0 * cur.rho[i] + cur.rho[i - 1]) / (h * h);
                               const double rx = (cur.rho[i + 1] - cur.rho[i - 1]) / (2.0 * h);
                               return std::pair<double, double>(lhs,
                                                                rxx - 2.0 * cur.a[i] * rx);
                           });
}

bool check_rn_envelope(const Trajectory& traj, double c_bound) {
    if (traj.phi_param != 0.0)
        raise(ErrorCode::InvalidArgument,
              "the metric envelope applies to unnormalized (Phi = 0) runs only");
    if (traj.snapshots.empty())
        raise(ErrorCode::InsufficientSnapshots, "empty trajectory");
    if (c_bound < 0.0) raise(ErrorCode::InvalidArgument, "c_bound must be >= 0");

    // Hypothesis first: sup |rho| <= c_bound wherever the quotient is defined.
    for (size_t k = 0; k < traj.snapshots.size(); ++k) {
        const CurvatureSnapshot snap = curvature_snapshot(traj.snapshots[k]);
        for (size_t i = 0; i < snap.rho.size(); ++i) {
            if (!snap.available[i]) continue;
            if (std::abs(snap.rho[i]) > c_bound)
                raise(ErrorCode::BoundHypothesisViolated,
                      "|rho| exceeds the assumed curvature bound", traj.times[k],
                      static_cast<long>(i));
        }
    }

    const auto& phi0 = traj.snapshots.front().phi;
    for (size_t k = 0; k < traj.snapshots.size(); ++k) {
        const double t = traj.times[k];
        const double lo = std::exp(-2.0 * c_bound * t);
        const double hi = std::exp(2.0 * c_bound * t);
        const auto& p = traj.snapshots[k].phi;
        for (size_t i = 0; i < p.size(); ++i) {
            const double g0 = phi0[i] * phi0[i];
            const double gt = p[i] * p[i];
            const double slack = 1e-12 * std::max(1.0, std::max(g0, gt));
            if (gt < lo * g0 - slack || gt > hi * g0 + slack) return false;
        }
    }
    return true;
}

} // namespace prf

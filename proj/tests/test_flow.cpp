#include "doctest.h"

#include <cmath>
#include <numbers>

#include "core/errors.hpp"
#include "core/flow.hpp"
#include "core/stationary.hpp"

using namespace prf;

namespace {

const double pi = std::numbers::pi;

WarpedProductMetric sine_mode(double l, int n, int m, int mode, double amplitude) {
    return make_metric(
        l, n, sample_on_grid([&](double x) { return amplitude * std::sin(pi * mode * x / l); },
                             l, m));
}

FlowConfig basic_config(double phi_param, double t_end, double dt, int m, FlowBackend backend,
                        int stride) {
    FlowConfig cfg;
    cfg.phi_param = phi_param;
    cfg.t_end = t_end;
    cfg.dt = dt;
    cfg.m = m;
    cfg.backend = backend;
    cfg.snapshot_stride = stride;
    return cfg;
}

} // namespace

TEST_CASE("lift evaluates the linear interpolation of the boundary offsets") {
    // Frozen offsets delta = (1, 3) on l = 2: the tabulated-free way to get a
    // constant delta is an exponential family evaluated at t = 0.
    BoundaryData bd = BoundaryData::exponential(0.0, 1.0, 1.0, 0.0, 3.0, 1.0);
    CHECK(lift_U(bd, 0.0, 1.0, 2.0) == doctest::Approx(2.0));
    CHECK(lift_U(bd, 0.0, 0.0, 2.0) == doctest::Approx(1.0));

    BoundaryData constant = BoundaryData::constant(2.0, 5.0);
    for (double x : {0.0, 0.7, 1.0}) CHECK(lift_U(constant, 3.0, x, 1.0) == 0.0);

    BoundaryData decay = BoundaryData::exponential(0.0, 1.0, 1.0, 0.0, 0.0, 1.0);
    CHECK(lift_U(decay, 2.0, 0.0, 1.0) == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("forcing term") {
    BoundaryData constant = BoundaryData::constant(1.0, 2.0);
    for (double x : {0.0, 0.4, 1.0}) CHECK(forcing_term(constant, 3.0, 1.0, x, 1.0) == 0.0);

    // Phi = 0, delta_0 = e^{-t}, delta_1 = 0 at x = 0: f = -delta_0' = e^{-t}.
    BoundaryData decay = BoundaryData::exponential(0.0, 1.0, 1.0, 0.0, 0.0, 1.0);
    CHECK(forcing_term(decay, 0.0, 1.5, 0.0, 1.0) == doctest::Approx(std::exp(-1.5)));

    // Phi = 1 with both offsets frozen at c: f = Phi c everywhere. A nearly
    // frozen offset is an exponential with negligible rate, evaluated at t = 0.
    const double c = 0.7;
    BoundaryData frozen_offsets = BoundaryData::exponential(0.0, c, 1e-8, 0.0, c, 1e-8);
    for (double x : {0.0, 0.3, 1.0})
        CHECK(forcing_term(frozen_offsets, 1.0, 0.0, x, 1.0) ==
              doctest::Approx(c).epsilon(1e-6));
}

TEST_CASE("sine coefficients recover pure modes") {
    const int m = 200;
    const std::vector<double> s1 =
        sample_on_grid([](double x) { return std::sin(pi * x); }, 1.0, m);
    const SineSeries c = sine_coefficients(s1, 1.0, 8);
    CHECK(c.coeffs[0] == doctest::Approx(1.0).epsilon(1e-8));
    for (size_t j = 1; j < c.coeffs.size(); ++j) CHECK(std::abs(c.coeffs[j]) < 1e-8);
}

TEST_CASE("sine coefficients of a two-mode sum") {
    const int m = 400;
    const std::vector<double> s = sample_on_grid(
        [](double x) { return std::sin(2 * pi * x) + 0.5 * std::sin(3 * pi * x); }, 1.0, m);
    const SineSeries c = sine_coefficients(s, 1.0, 6);
    CHECK(std::abs(c.coeffs[0]) < 1e-6);
    CHECK(c.coeffs[1] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(c.coeffs[2] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(std::abs(c.coeffs[3]) < 1e-6);
}

TEST_CASE("sine coefficients of x(1-x) match the closed-form integrals") {
    const int m = 400;
    const std::vector<double> s = sample_on_grid([](double x) { return x * (1.0 - x); }, 1.0, m);
    const SineSeries c = sine_coefficients(s, 1.0, 5);
    for (int j = 1; j <= 5; ++j) {
        const double expected = (j % 2 == 1) ? 8.0 / std::pow(pi * j, 3) : 0.0;
        CHECK(std::abs(c.coeffs[static_cast<size_t>(j) - 1] - expected) < 1e-6);
    }
}

TEST_CASE("sine coefficients demand vanishing endpoints") {
    const std::vector<double> bad =
        sample_on_grid([](double x) { return std::cos(pi * x); }, 1.0, 64);
    CHECK_THROWS_AS(sine_coefficients(bad, 1.0, 4), Error);
}

TEST_CASE("series evaluation vanishes exactly at the endpoints") {
    SineSeries s;
    s.l = 2.0;
    s.coeffs = {1.0, -0.5, 0.25};
    CHECK(s.evaluate(0.0) == 0.0);
    CHECK(s.evaluate(2.0) == 0.0);
    CHECK(s.evaluate(1.0) != 0.0);
}

TEST_CASE("heat-mode decay matches the exact solution (both backends)") {
    const int m = 200;
    const WarpedProductMetric phi0 = sine_mode(1.0, 1, m, 1, 1.0);
    const BoundaryData bd = BoundaryData::constant(0.0, 0.0);
    const FlowConfig cfg = basic_config(0.0, 1.0, 1e-4, m, FlowBackend::FiniteDifference, 500);

    const Trajectory fd = evolve_fd(phi0, bd, cfg);
    const Trajectory sp = evolve_spectral(phi0, bd, cfg);
    const std::vector<double> exact = sample_on_grid(
        [](double x) { return std::exp(-pi * pi) * std::sin(pi * x); }, 1.0, m);

    CHECK(sup_deviation(fd, fd.snapshots.size() - 1, exact) < 1e-4);
    CHECK(sup_deviation(sp, sp.snapshots.size() - 1, exact) < 1e-6);
    CHECK(sup_distance(fd, sp) < 1e-3);
}

TEST_CASE("resonant neutral mode is frozen by the spectral backend") {
    // With Phi = (pi/l)^2 the first mode rate vanishes identically.
    const int m = 200;
    const WarpedProductMetric phi0 = sine_mode(1.0, 1, m, 1, 1.0);
    const BoundaryData bd = BoundaryData::constant(0.0, 0.0);
    const FlowConfig cfg = basic_config(pi * pi, 1.0, 1e-3, m, FlowBackend::Spectral, 100);
    const Trajectory sp = evolve_spectral(phi0, bd, cfg);
    CHECK(sup_deviation(sp, sp.snapshots.size() - 1, phi0.phi) < 1e-6);

    // Crank-Nicolson sees the discrete mode eigenvalue instead of pi^2, so the
    // neutral mode drifts at the spatial discretization order: (pi^4 h^2/12) t.
    const FlowConfig cfg_fd = basic_config(pi * pi, 1.0, 1e-4, 400, FlowBackend::FiniteDifference, 1000);
    const WarpedProductMetric phi0_fine = sine_mode(1.0, 1, 400, 1, 1.0);
    const Trajectory fd = evolve_fd(phi0_fine, bd, cfg_fd);
    CHECK(sup_deviation(fd, fd.snapshots.size() - 1, phi0_fine.phi) < 1e-4);
}

TEST_CASE("stationary solutions are fixed points") {
    // Phi = 0 has a linear stationary profile, an exact fixed point of the
    // discrete scheme as well.
    const double l = 2.0;
    const StationaryResult st = stationary_solution(0.0, l, 1.0, 3.0);
    const int m = 64;
    const WarpedProductMetric phi0 = make_metric(l, 1, st.sample(m));
    const BoundaryData bd = BoundaryData::constant(1.0, 3.0);
    const FlowConfig cfg = basic_config(0.0, 10.0, 1e-2, m, FlowBackend::FiniteDifference, 100);
    const Trajectory fd = evolve_fd(phi0, bd, cfg);
    for (size_t k = 0; k < fd.snapshots.size(); ++k)
        CHECK(sup_deviation(fd, k, phi0.phi) < 1e-6);

    // Trigonometric stationary profile: the sampled profile differs from the
    // discrete fixed point by O(h^2/gap), so preservation to 1e-6 needs a
    // finer grid.
    const double phi_param = 0.25 * pi * pi;
    const StationaryResult trig = stationary_solution(phi_param, 1.0, 1.0, 2.0);
    const int mf = 1000;
    const WarpedProductMetric tphi0 = make_metric(1.0, 1, trig.sample(mf));
    const FlowConfig tcfg =
        basic_config(phi_param, 10.0, 1e-2, mf, FlowBackend::FiniteDifference, 200);
    const Trajectory tfd = evolve_fd(tphi0, BoundaryData::constant(1.0, 2.0), tcfg);
    for (size_t k = 0; k < tfd.snapshots.size(); ++k)
        CHECK(sup_deviation(tfd, k, tphi0.phi) < 1e-6);

    // The spectral backend holds any stationary profile to quadrature accuracy.
    const int ms = 200;
    const WarpedProductMetric sphi0 = make_metric(1.0, 1, trig.sample(ms));
    const FlowConfig scfg = basic_config(phi_param, 10.0, 1e-2, ms, FlowBackend::Spectral, 200);
    const Trajectory sp = evolve_spectral(sphi0, BoundaryData::constant(1.0, 2.0), scfg);
    for (size_t k = 0; k < sp.snapshots.size(); ++k)
        CHECK(sup_deviation(sp, k, sphi0.phi) < 1e-8);
}

TEST_CASE("constant boundaries make every spectral mode a pure exponential") {
    const double phi_param = 2.0;
    const int m = 128;
    const StationaryResult st = stationary_solution(phi_param, 1.0, 1.0, 2.0);
    std::vector<double> init = st.sample(m);
    for (int i = 0; i <= m; ++i)
        init[static_cast<size_t>(i)] +=
            std::sin(pi * i / double(m)) + 0.3 * std::sin(2.0 * pi * i / double(m));
    const WarpedProductMetric phi0 = make_metric(1.0, 1, init);
    const BoundaryData bd = BoundaryData::constant(1.0, 2.0);
    const FlowConfig cfg = basic_config(phi_param, 0.7, 1e-3, m, FlowBackend::Spectral, 700);
    const Trajectory sp = evolve_spectral(phi0, bd, cfg);

    const double a1 = phi_param - pi * pi;
    const double a2 = phi_param - 4.0 * pi * pi;
    const std::vector<double> expected = sample_on_grid(
        [&](double x) {
            return st.evaluate(x) + std::exp(a1 * 0.7) * std::sin(pi * x) +
                   0.3 * std::exp(a2 * 0.7) * std::sin(2.0 * pi * x);
        },
        1.0, m);
    CHECK(sup_deviation(sp, sp.snapshots.size() - 1, expected) < 1e-7);
}

TEST_CASE("backends agree on a forced subcritical run") {
    const double phi_param = 0.5 * pi * pi;
    const int m = 100;
    const BoundaryData bd = BoundaryData::exponential(1.0, 0.5, 1.0, 2.0, 0.5, 1.0);
    const StationaryResult st = stationary_solution(phi_param, 1.0, 1.0, 2.0);
    std::vector<double> init = st.sample(m);
    for (int i = 0; i <= m; ++i) {
        const double x = i / double(m);
        init[static_cast<size_t>(i)] += 0.3 * x * (1.0 - x) + lift_U(bd, 0.0, x, 1.0);
    }
    const WarpedProductMetric phi0 = make_metric(1.0, 1, init);
    const FlowConfig cfg = basic_config(phi_param, 2.0, 1e-3, m, FlowBackend::FiniteDifference, 200);
    const Trajectory fd = evolve_fd(phi0, bd, cfg);
    const Trajectory sp = evolve_spectral(phi0, bd, cfg);
    CHECK(sup_distance(fd, sp) < 5e-4);
}

TEST_CASE("tabulated boundary data reproduces its analytic source") {
    const double phi_param = 1.0;
    const int m = 64;
    // Table sampled from mu_0(t) = 1 + 0.4 e^{-t}, mu_1(t) = 2 (dense table).
    std::vector<double> times, v0, v1;
    for (int k = 0; k <= 4000; ++k) {
        const double t = 2.0 * k / 4000.0;
        times.push_back(t);
        v0.push_back(1.0 + 0.4 * std::exp(-t));
        v1.push_back(2.0);
    }
    const BoundaryData tab = BoundaryData::tabulated(times, v0, v1);
    const BoundaryData exact = BoundaryData::exponential(1.0, 0.4, 1.0, 2.0, 0.0, 1.0);

    const StationaryResult st = stationary_solution(phi_param, 1.0, 1.0, 2.0);
    std::vector<double> init = st.sample(m);
    for (int i = 0; i <= m; ++i) {
        const double x = i / double(m);
        init[static_cast<size_t>(i)] += 0.4 * (1.0 - x); // lift at t = 0
    }
    const WarpedProductMetric phi0 = make_metric(1.0, 1, init);
    FlowConfig cfg = basic_config(phi_param, 2.0, 1e-3, m, FlowBackend::Spectral, 250);
    // The two runs expand against different stationary references (the table's
    // limit is its last entry), so match the truncation to the full grid.
    cfg.series_terms = m;
    const Trajectory a = evolve_spectral(phi0, tab, cfg);
    const Trajectory b = evolve_spectral(phi0, exact, cfg);
    CHECK(sup_distance(a, b) < 1e-6);
}

TEST_CASE("evolution is linear in initial and boundary data") {
    const int m = 64;
    const double alpha = 0.6, beta = 1.7;
    const auto run = [&](double mu0, double mu1, double amp) {
        std::vector<double> init(static_cast<size_t>(m) + 1);
        for (int i = 0; i <= m; ++i) {
            const double x = i / double(m);
            init[static_cast<size_t>(i)] =
                mu0 + (mu1 - mu0) * x + amp * std::sin(pi * x);
        }
        const WarpedProductMetric phi0 = make_metric(1.0, 1, init);
        return evolve_fd(phi0, BoundaryData::constant(mu0, mu1),
                         basic_config(0.7, 1.0, 1e-3, m, FlowBackend::FiniteDifference, 100));
    };
    const Trajectory ta = run(1.0, 2.0, 1.0);
    const Trajectory tb = run(0.5, 0.0, -0.3);
    const Trajectory tc = run(alpha * 1.0 + beta * 0.5, alpha * 2.0, alpha * 1.0 - beta * 0.3);
    for (size_t k = 0; k < tc.snapshots.size(); ++k) {
        double max_err = 0.0, scale = 0.0;
        for (size_t i = 0; i < tc.snapshots[k].phi.size(); ++i) {
            const double combo =
                alpha * ta.snapshots[k].phi[i] + beta * tb.snapshots[k].phi[i];
            max_err = std::max(max_err, std::abs(combo - tc.snapshots[k].phi[i]));
            scale = std::max(scale, std::abs(combo));
        }
        CHECK(max_err <= 1e-8 * std::max(1.0, scale));
    }
}

TEST_CASE("FD order of accuracy in joint refinement is ~2") {
    const BoundaryData bd = BoundaryData::constant(0.0, 0.0);
    std::vector<double> errors;
    for (int level = 0; level < 3; ++level) {
        const int m = 50 << level;
        const double dt = 8e-3 / (1 << level);
        const WarpedProductMetric phi0 = sine_mode(1.0, 1, m, 1, 1.0);
        const Trajectory fd = evolve_fd(
            phi0, bd, basic_config(0.0, 1.0, dt, m, FlowBackend::FiniteDifference, 1 << 20));
        const std::vector<double> exact = sample_on_grid(
            [](double x) { return std::exp(-pi * pi) * std::sin(pi * x); }, 1.0, m);
        errors.push_back(sup_deviation(fd, fd.snapshots.size() - 1, exact));
    }
    for (size_t k = 0; k + 1 < errors.size(); ++k) {
        const double order = std::log2(errors[k] / errors[k + 1]);
        CHECK(order >= 1.8);
    }
}

TEST_CASE("discrete positivity") {
    const int m = 50;
    const double dt = 2.0 / (m * m); // keep the CN explicit part nonnegative
    std::vector<double> init(static_cast<size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) {
        const double x = i / double(m);
        init[static_cast<size_t>(i)] = 0.1 + x * (1.0 - x);
    }
    const WarpedProductMetric phi0 = make_metric(1.0, 1, init);
    for (double phi_param : {0.0, -2.0}) {
        const Trajectory fd =
            evolve_fd(phi0, BoundaryData::constant(0.1, 0.1),
                      basic_config(phi_param, 1.0, dt, m, FlowBackend::FiniteDifference, 100));
        for (const auto& g : fd.snapshots)
            for (double v : g.phi) CHECK(v >= -1e-8);
    }
    // For Phi > 0 positivity holds for the tilted field e^{-Phi t} phi.
    const double phi_param = 2.0;
    const Trajectory fd =
        evolve_fd(phi0, BoundaryData::constant(0.1, 0.1),
                  basic_config(phi_param, 1.0, dt, m, FlowBackend::FiniteDifference, 100));
    for (size_t k = 0; k < fd.snapshots.size(); ++k) {
        double scale = 0.0;
        for (double v : fd.snapshots[k].phi) scale = std::max(scale, std::abs(v));
        for (double v : fd.snapshots[k].phi)
            CHECK(std::exp(-phi_param * fd.times[k]) * v >= -1e-8 * std::max(1.0, scale));
    }
}

TEST_CASE("snapshot boundary values equal the Dirichlet data") {
    const int m = 64;
    const BoundaryData bd = BoundaryData::exponential(1.0, 0.5, 2.0, 0.5, 0.25, 1.0);
    std::vector<double> init(static_cast<size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) {
        const double x = i / double(m);
        init[static_cast<size_t>(i)] = (1.5) * (1.0 - x) + 0.75 * x;
    }
    const WarpedProductMetric phi0 = make_metric(1.0, 1, init);
    for (FlowBackend backend : {FlowBackend::FiniteDifference, FlowBackend::Spectral}) {
        const FlowConfig cfg = basic_config(0.0, 1.0, 1e-3, m, backend, 100);
        const Trajectory tr = backend == FlowBackend::FiniteDifference
                                  ? evolve_fd(phi0, bd, cfg)
                                  : evolve_spectral(phi0, bd, cfg);
        for (size_t k = 0; k < tr.snapshots.size(); ++k) {
            CHECK(tr.snapshots[k].phi.front() ==
                  doctest::Approx(bd.mu(0, tr.times[k])).epsilon(1e-12));
            CHECK(tr.snapshots[k].phi.back() ==
                  doctest::Approx(bd.mu(1, tr.times[k])).epsilon(1e-12));
        }
    }
}

TEST_CASE("initial data must match the boundary data") {
    const int m = 32;
    const WarpedProductMetric phi0 = sine_mode(1.0, 1, m, 1, 1.0);
    const BoundaryData bd = BoundaryData::constant(1.0, 1.0);
    const FlowConfig cfg = basic_config(0.0, 0.1, 1e-3, m, FlowBackend::FiniteDifference, 10);
    CHECK_THROWS_AS(evolve_fd(phi0, bd, cfg), Error);
    try {
        evolve_fd(phi0, bd, cfg);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BoundaryMismatch);
        CHECK(e.detail() == doctest::Approx(1.0));
    }
}

TEST_CASE("supercritical overflow truncates the run with a divergence marker") {
    const int m = 32;
    const WarpedProductMetric phi0 = sine_mode(1.0, 1, m, 1, 1.0);
    const BoundaryData bd = BoundaryData::constant(0.0, 0.0);
    const FlowConfig cfg =
        basic_config(60.0 * pi * pi, 2.0, 1e-3, m, FlowBackend::FiniteDifference, 50);
    const Trajectory fd = evolve_fd(phi0, bd, cfg);
    CHECK(fd.diverged);
    CHECK(fd.divergence_time < 2.0);
    CHECK(fd.times.back() <= fd.divergence_time);
    const Trajectory sp = evolve_spectral(phi0, bd, cfg);
    CHECK(sp.diverged);
    CHECK(std::abs(sp.divergence_time - fd.divergence_time) < 0.05);
}

TEST_CASE("config validation") {
    FlowConfig cfg;
    cfg.dt = -1.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = FlowConfig{};
    cfg.m = 4;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = FlowConfig{};
    cfg.snapshot_stride = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

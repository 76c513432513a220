#include "doctest.h"

#include <cmath>
#include <random>

#include "core/eigenflow.hpp"
#include "core/errors.hpp"

using namespace prf;

TEST_CASE("fixed point mu0 = Phi") {
    for (double t : {-5.0, -1.0, 0.0, 1.0, 5.0})
        CHECK(eigen_closed_form(1.0, 1.0, t) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("limits of the interior orbit") {
    // mu0 = Phi/2 relaxes to Phi backwards and to 0 forwards.
    CHECK(std::abs(eigen_closed_form(0.5, 1.0, -10.0) - 1.0) < 1e-15);
    CHECK(std::abs(eigen_closed_form(0.5, 1.0, 10.0)) < 1e-15);
}

TEST_CASE("closed form matches RK4 on the global-existence region") {
    const double phi = 1.0, mu0 = 0.5, dt = 1e-3;
    const long steps = 5000;
    const Rk4Trajectory rk = eigen_rk4(mu0, phi, dt, steps);
    REQUIRE_FALSE(rk.blow_up_suspected());
    double max_err = 0.0;
    for (long k = 0; k <= steps; ++k)
        max_err = std::max(max_err,
                           std::abs(rk.values[static_cast<size_t>(k)] -
                                    eigen_closed_form(mu0, phi, k * dt)));
    CHECK(max_err < 1e-8);
}

TEST_CASE("RK4 converges at fourth order") {
    const double phi = 2.0, mu0 = 1.2, t = 2.0;
    const double exact = eigen_closed_form(mu0, phi, t);
    double prev_err = 0.0;
    for (int level = 0; level < 3; ++level) {
        const double dt = 0.02 / (1 << level);
        const long steps = std::lround(t / dt);
        const Rk4Trajectory rk = eigen_rk4(mu0, phi, dt, steps);
        const double err = std::abs(rk.values.back() - exact);
        if (level > 0) CHECK(prev_err / err > 12.0); // ~16 for order 4
        prev_err = err;
    }
}

TEST_CASE("blow-up detection for mu0 > Phi") {
    const double mu0 = 2.0, phi = 1.0;
    const auto t_star = eigen_blow_up_time(mu0, phi);
    REQUIRE(t_star.has_value());
    CHECK(*t_star == doctest::Approx(std::log(2.0) / 4.0).epsilon(1e-14));
    CHECK_THROWS_AS(eigen_closed_form(mu0, phi, *t_star + 0.01), Error);

    // RK4 escapes at the same time.
    const double dt = 1e-6;
    const Rk4Trajectory rk = eigen_rk4(mu0, phi, dt, std::lround(2.0 * *t_star / dt));
    REQUIRE(rk.blow_up_suspected());
    CHECK(std::abs(rk.halted_step * dt - *t_star) < 1e-4);
}

TEST_CASE("blow-up also occurs for Phi <= 0") {
    CHECK(eigen_blow_up_time(1.0, 0.0).value() == doctest::Approx(0.25));
    CHECK(eigen_blow_up_time(1.0, -1.0).has_value());
    CHECK_THROWS_AS(eigen_closed_form(1.0, 0.0, 0.3), Error);
    // Before the blow-up time the Phi = 0 hyperbola is exact.
    CHECK(eigen_closed_form(1.0, 0.0, 0.2) == doctest::Approx(1.0 / (1.0 - 0.8)));
}

TEST_CASE("tsharp eigenvalue flow is the square root of the mu flow") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    std::uniform_real_distribution<double> phis(0.2, 5.0);
    std::uniform_real_distribution<double> times(-3.0, 3.0);
    for (int k = 0; k < 100; ++k) {
        const double phi = phis(rng);
        const double theta0 = std::sqrt(unit(rng) * phi);
        const double t = times(rng);
        const double th = tsharp_eigen_flow(theta0, phi, t);
        CHECK(th * th == doctest::Approx(eigen_closed_form(theta0 * theta0, phi, t))
                             .epsilon(1e-13));
    }
    // theta -> 0 as t -> infinity below the fixed point.
    CHECK(tsharp_eigen_flow(1.0, 2.0, 20.0) < 1e-8);
    // theta0 = sqrt(Phi) is stationary (Phi chosen so theta0^2 == Phi exactly;
    // one ulp above Phi the ODE genuinely escapes in finite time).
    const double theta0 = std::sqrt(2.0);
    CHECK(tsharp_eigen_flow(theta0, theta0 * theta0, 7.0) ==
          doctest::Approx(theta0).epsilon(1e-12));
}

TEST_CASE("tsharp ODE dtheta/dt = 2 theta (theta^2 - Phi) against RK4") {
    const double phi = 1.5, theta0 = 0.7, dt = 1e-4, t_end = 3.0;
    double th = theta0;
    const auto rhs = [phi](double x) { return 2.0 * x * (x * x - phi); };
    const long steps = std::lround(t_end / dt);
    for (long k = 0; k < steps; ++k) {
        const double k1 = rhs(th);
        const double k2 = rhs(th + 0.5 * dt * k1);
        const double k3 = rhs(th + 0.5 * dt * k2);
        const double k4 = rhs(th + dt * k3);
        th += (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    CHECK(std::abs(th - tsharp_eigen_flow(theta0, phi, t_end)) < 1e-8);
}

TEST_CASE("positivity and monotonicity on (0, Phi]") {
    const double phi = 3.0;
    for (double frac : {0.1, 0.35, 0.8, 0.99}) {
        const double mu0 = frac * phi;
        double prev = mu0;
        for (double t = 0.1; t <= 5.0; t += 0.1) {
            const double mu = eigen_closed_form(mu0, phi, t);
            CHECK(mu > 0.0);
            CHECK(mu <= phi);
            CHECK(mu < prev);
            prev = mu;
        }
    }
}

TEST_CASE("ric_n_flow sums modes and verifies the trace inequality") {
    EigenFlowState state;
    state.phi_param = 1.0;
    state.n = 2;
    state.mus = {0.5, 0.5};
    const RicNFlowResult at0 = ric_n_flow(state, 0.0);
    CHECK(at0.value == doctest::Approx(1.0));
    const RicNFlowResult later = ric_n_flow(state, 2.0);
    CHECK(later.value == doctest::Approx(2.0 * eigen_closed_form(0.5, 1.0, 2.0)));
    CHECK(later.inequality_margin >= -1e-10);

    // Equal eigenvalues make the Cauchy-Schwarz inequality an identity; mixed
    // spectra give strictly positive margin.
    EigenFlowState mixed;
    mixed.phi_param = 2.0;
    mixed.n = 4;
    mixed.mus = {0.3, 0.9, 1.4, 1.9};
    const RicNFlowResult r = ric_n_flow(mixed, 3.0);
    CHECK(r.inequality_margin >= -1e-10);
}

TEST_CASE("random admissible states satisfy the trace inequality at many times") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        EigenFlowState state;
        state.phi_param = 0.5 + 4.0 * unit(rng);
        state.n = 4;
        state.mus.clear();
        for (int i = 0; i < 4; ++i) state.mus.push_back(unit(rng) * state.phi_param);
        const RicNFlowResult r = ric_n_flow(state, 4.0, 1000);
        CHECK(r.inequality_margin >= -1e-10);
    }
}

TEST_CASE("state validation") {
    EigenFlowState odd_all_positive;
    odd_all_positive.phi_param = 1.0;
    odd_all_positive.n = 3;
    odd_all_positive.mus = {0.1, 0.2, 0.3};
    CHECK_THROWS_AS(odd_all_positive.validate(), Error);

    // Odd n is fine once a zero mode freezes.
    EigenFlowState degenerate;
    degenerate.phi_param = 1.0;
    degenerate.n = 3;
    degenerate.mus = {0.1, 0.2, 0.0};
    CHECK_NOTHROW(degenerate.validate());
    const RicNFlowResult r = ric_n_flow(degenerate, 1.0);
    CHECK(r.value == doctest::Approx(eigen_closed_form(0.1, 1.0, 1.0) +
                                     eigen_closed_form(0.2, 1.0, 1.0)));
}
